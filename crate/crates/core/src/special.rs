//! Constructive special cases: outerplanar stories, one-reroute realizations
//! for window 5, and good-embedding diagnostics.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use thiserror::Error;

use crate::embedding::{
    enumerate_with_bound, find_planar_rotation, trace_faces, Embedding, EmbeddingError, Placement,
    DEFAULT_VERTEX_BOUND,
};
use crate::solver::{Certificate, Reroute, SolveError};
use crate::story::{k5_window, window_graph, GraphStory, Vertex};
use crate::weighted::WeightedEmbedding;

/// Embedding with every vertex on the outer face, if the graph is outerplanar.
///
/// Uses the apex test: `G` is outerplanar iff `G` plus a vertex adjacent to
/// everything is planar. Removing the apex leaves all vertices on its face.
pub fn outerplanar_embedding(vertices: &[Vertex], edges: &[(Vertex, Vertex)]) -> Option<Embedding> {
    if vertices.is_empty() {
        return Some(Embedding::empty());
    }
    let apex = vertices.iter().copied().max().unwrap_or(0) + 1;
    let mut vs = vertices.to_vec();
    vs.push(apex);
    let mut es = edges.to_vec();
    es.extend(vertices.iter().map(|&v| (v, apex)));
    let rot = find_planar_rotation(&vs, &es)?;
    let first = rot[&apex][0];
    let placement = Placement { vertex: apex, outer: Some((apex, first)), host: None };
    let with_apex = trace_faces(&rot, &[placement]).ok()?;
    let removal = with_apex.remove_vertex(apex).ok()?;
    debug_assert_eq!(removal.merged, removal.embedding.outer());
    Some(removal.embedding)
}

/// Certificate of restrictions of an outerplanar embedding, all spare points
/// kept in the outer face. `None` when `G` is not outerplanar.
pub fn outerplanar_certificate(story: &GraphStory) -> Option<Certificate> {
    let vs: Vec<Vertex> = story.vertices().collect();
    let phi = outerplanar_embedding(&vs, story.edges())?;
    let first = story.omega().min(story.n());
    let mut entries = Vec::new();
    for i in first..=story.n() {
        let w = window_graph(story, i).expect("window index in range");
        let keep: BTreeSet<Vertex> = w.vertices().into_iter().collect();
        let e = phi.restrict(&keep).expect("restriction of a valid embedding");
        let mut weights = vec![0; e.face_count()];
        weights[e.outer()] = story.k();
        entries.push(WeightedEmbedding { embedding: e, weights });
    }
    Some(Certificate { story: story.clone(), first, entries, reroutes: Vec::new() })
}

#[derive(Debug, Error)]
pub enum RerouteError {
    #[error("window {0} induces K5")]
    ContainsK5(u32),
    #[error("one-reroute realization needs window 5 and k = 0")]
    Unsupported,
    #[error("no single reroute reaches a usable face at step {0}")]
    Stuck(u32),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

/// Per-window embeddings plus the reroute log of a one-reroute realization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RerouteRealization {
    pub story: GraphStory,
    /// Embeddings of windows `min(5, n)..=n`.
    pub embeddings: Vec<Embedding>,
    pub reroutes: Vec<Reroute>,
}

impl RerouteRealization {
    pub fn certificate(&self) -> Certificate {
        let entries = self.embeddings.iter().cloned().map(WeightedEmbedding::zero).collect();
        Certificate {
            story: self.story.clone(),
            first: self.story.omega().min(self.story.n()),
            entries,
            reroutes: self.reroutes.clone(),
        }
    }
}

type Extensions = HashMap<Embedding, Vec<(Embedding, usize)>>;
type ArrivalKey = (Vec<Vertex>, Vec<(Vertex, Vertex)>, Vertex);

/// Advances a window-5 realization by one arrival, memoizing the embeddings of
/// each arrival graph grouped by what remains after removing the new vertex.
#[derive(Default)]
pub struct RerouteStepper {
    cache: HashMap<ArrivalKey, Extensions>,
}

impl RerouteStepper {
    pub fn new() -> Self {
        Self::default()
    }

    fn extensions(
        &mut self,
        vertices: Vec<Vertex>,
        edges: Vec<(Vertex, Vertex)>,
        v_in: Vertex,
    ) -> Result<&Extensions, RerouteError> {
        let key = (vertices, edges, v_in);
        if !self.cache.contains_key(&key) {
            let mut map: Extensions = HashMap::new();
            for e in enumerate_with_bound(&key.0, &key.1, DEFAULT_VERTEX_BOUND)? {
                let r = e.remove_vertex(v_in)?;
                map.entry(r.embedding).or_default().push((e, r.merged));
            }
            self.cache.insert(key.clone(), map);
        }
        Ok(&self.cache[&key])
    }

    /// Removes `v_out`, then places `v_in` adjacent to `nbrs` at the freed
    /// point, moving that point across one edge when its face is unusable.
    pub fn step(
        &mut self,
        prev: &Embedding,
        v_out: Vertex,
        v_in: Vertex,
        nbrs: &[Vertex],
    ) -> Result<(Embedding, Option<Reroute>), RerouteError> {
        let r = prev.remove_vertex(v_out)?;
        let common = r.embedding;
        let f = r.merged;
        let mut vertices: Vec<Vertex> = common.vertices().collect();
        vertices.push(v_in);
        let mut edges = common.edges();
        edges.extend(nbrs.iter().map(|&u| (u.min(v_in), u.max(v_in))));
        edges.sort_unstable();
        let ext = self.extensions(vertices, edges, v_in)?;
        let Some(cands) = ext.get(&common) else { return Err(RerouteError::Stuck(v_in)) };
        if let Some((e, _)) = cands.iter().find(|(_, g)| *g == f) {
            return Ok((e.clone(), None));
        }
        for (e, g) in cands {
            if let Some(edge) = shared_edge(&common, f, *g) {
                let log = Reroute { step: v_in, edge: [edge.0, edge.1], from_face: f, to_face: *g };
                return Ok((e.clone(), Some(log)));
            }
        }
        Err(RerouteError::Stuck(v_in))
    }
}

/// Smallest edge with one side on face `f` and the other on face `g`.
pub fn shared_edge(e: &Embedding, f: usize, g: usize) -> Option<(Vertex, Vertex)> {
    e.edges().into_iter().find(|&(a, b)| {
        let (x, y) = (e.face_of_dart((a, b)), e.face_of_dart((b, a)));
        (x == Some(f) && y == Some(g)) || (x == Some(g) && y == Some(f))
    })
}

/// Realizes a minimal window-5 story allowing one edge reroute per step.
pub fn one_reroute_realize(story: &GraphStory) -> Result<RerouteRealization, RerouteError> {
    if story.omega() != 5 || story.k() != 0 {
        return Err(RerouteError::Unsupported);
    }
    if let Some(i) = k5_window(story) {
        return Err(RerouteError::ContainsK5(i));
    }
    let first = story.n().min(5);
    let w = window_graph(story, first).expect("window index in range");
    let start = enumerate_with_bound(&w.vertices(), &w.edges, DEFAULT_VERTEX_BOUND)?
        .into_iter()
        .next()
        .expect("K5-free window on five vertices is planar");
    let mut embeddings = vec![start];
    let mut reroutes = Vec::new();
    let mut stepper = RerouteStepper::new();
    for i in 6..=story.n() {
        let nbrs: Vec<Vertex> = story.neighbors(i).into_iter().filter(|&u| u < i && u > i - 5).collect();
        let (next, log) = stepper.step(embeddings.last().expect("nonempty"), i - 5, i, &nbrs)?;
        embeddings.push(next);
        reroutes.extend(log);
    }
    Ok(RerouteRealization { story: story.clone(), embeddings, reroutes })
}

/// Outcome of [`reroute_state_sweep`].
#[derive(Debug, Clone, Default)]
pub struct SweepReport {
    pub states: usize,
    pub transitions: usize,
    pub reroutes: usize,
    /// Failing state and arrival neighbourhood.
    pub failures: Vec<(Embedding, Vec<Vertex>)>,
}

/// Applies the reroute step to every embedding of every graph on `1..=5` and
/// every K5-free arrival neighbourhood, closing over successors relabelled
/// back to `1..=5`. The step depends only on this relabelled window, so the
/// sweep covers every K5-free window-5 story regardless of length.
pub fn reroute_state_sweep() -> SweepReport {
    let pairs: Vec<(Vertex, Vertex)> = (1..=5).flat_map(|a| (a + 1..=5).map(move |b| (a, b))).collect();
    let vs = [1, 2, 3, 4, 5];
    let mut queue = Vec::new();
    for mask in 0u32..(1 << pairs.len()) - 1 {
        let edges: Vec<_> = (0..pairs.len()).filter(|i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
        queue.extend(enumerate_with_bound(&vs, &edges, DEFAULT_VERTEX_BOUND).expect("K5-free graphs are planar"));
    }
    let mut seen: std::collections::HashSet<Embedding> = queue.iter().cloned().collect();
    let mut stepper = RerouteStepper::new();
    let mut report = SweepReport::default();
    while let Some(state) = queue.pop() {
        report.states += 1;
        let kept: Vec<(Vertex, Vertex)> = state.edges().into_iter().filter(|&(a, _)| a != 1).collect();
        for nmask in 0u32..16 {
            let nbrs: Vec<Vertex> = (0..4).filter(|b| nmask >> b & 1 == 1).map(|b| b + 2).collect();
            if nbrs.len() == 4 && kept.len() == 6 {
                continue;
            }
            report.transitions += 1;
            match stepper.step(&state, 1, 6, &nbrs) {
                Ok((next, log)) => {
                    report.reroutes += usize::from(log.is_some());
                    let next = next.relabel(|v| v - 1);
                    if seen.insert(next.clone()) {
                        queue.push(next);
                    }
                }
                Err(_) => report.failures.push((state.clone(), nbrs)),
            }
        }
    }
    report
}

/// Whether the two vertices share some window.
pub fn coeval(story: &GraphStory, u: Vertex, v: Vertex) -> bool {
    u.abs_diff(v) < story.omega()
}

/// Whether two edges share some window.
pub fn coeval_edges(story: &GraphStory, a: (Vertex, Vertex), b: (Vertex, Vertex)) -> bool {
    let lo = a.0.min(a.1).min(b.0.min(b.1));
    let hi = a.0.max(a.1).max(b.0.max(b.1));
    hi - lo < story.omega()
}

/// A cycle enclosing a vertex that shares a window with every cycle vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CriticalCycle {
    /// Starts at the smallest vertex, second vertex smaller than the last.
    pub cycle: Vec<Vertex>,
    /// Smallest enclosed coeval vertex.
    pub witness: Vertex,
    /// Whether the cycle bounds the outer face.
    pub external: bool,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
    }
}

/// Whether `v` lies on the bounded side of cycle `cycle` in `emb`.
pub fn encloses(emb: &Embedding, cycle: &[Vertex], v: Vertex) -> bool {
    let on_cycle: BTreeSet<(Vertex, Vertex)> = (0..cycle.len())
        .map(|i| {
            let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            (a.min(b), a.max(b))
        })
        .collect();
    let mut dsu = Dsu((0..emb.face_count()).collect());
    for (a, b) in emb.edges() {
        if on_cycle.contains(&(a, b)) {
            continue;
        }
        let x = emb.face_of_dart((a, b)).expect("dart has a face");
        let y = emb.face_of_dart((b, a)).expect("dart has a face");
        dsu.union(x, y);
    }
    let face = match emb.rotation(v).and_then(|r| r.first().copied()) {
        Some(u) => emb.face_of_dart((v, u)),
        None => emb.face_of_isolated(v),
    };
    let Some(face) = face else { return false };
    dsu.find(face) != dsu.find(emb.outer())
}

fn simple_cycles(vertices: &BTreeSet<Vertex>, adj: &BTreeMap<Vertex, Vec<Vertex>>) -> Vec<Vec<Vertex>> {
    fn dfs(
        start: Vertex,
        v: Vertex,
        path: &mut Vec<Vertex>,
        vertices: &BTreeSet<Vertex>,
        adj: &BTreeMap<Vertex, Vec<Vertex>>,
        out: &mut Vec<Vec<Vertex>>,
    ) {
        for &u in adj.get(&v).into_iter().flatten() {
            if !vertices.contains(&u) || u < start {
                continue;
            }
            if u == start {
                if path.len() >= 3 && path[1] < path[path.len() - 1] {
                    out.push(path.clone());
                }
            } else if !path.contains(&u) {
                path.push(u);
                dfs(start, u, path, vertices, adj, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    for &s in vertices {
        dfs(s, s, &mut vec![s], vertices, adj, &mut out);
    }
    out
}

/// All critical cycles of `emb`, each with its smallest witness.
pub fn critical_cycles(story: &GraphStory, emb: &Embedding) -> Vec<CriticalCycle> {
    let mut adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for &(a, b) in story.edges() {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut found: BTreeMap<Vec<Vertex>, Vertex> = BTreeMap::new();
    for v in story.vertices() {
        let near: BTreeSet<Vertex> = story.vertices().filter(|&u| u != v && coeval(story, u, v)).collect();
        for cycle in simple_cycles(&near, &adj) {
            if encloses(emb, &cycle, v) {
                found.entry(cycle).or_insert(v);
            }
        }
    }
    let outer: BTreeSet<Vertex> = emb.faces()[emb.outer()].vertices();
    found
        .into_iter()
        .map(|(cycle, witness)| {
            let external = is_face_boundary(emb, emb.outer(), &cycle) && outer.len() == cycle.len();
            CriticalCycle { cycle, witness, external }
        })
        .collect()
}

fn is_face_boundary(emb: &Embedding, face: usize, cycle: &[Vertex]) -> bool {
    (0..cycle.len()).all(|i| {
        let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        emb.face_of_dart((a, b)) == Some(face) || emb.face_of_dart((b, a)) == Some(face)
    })
}

/// Planar embeddings have no crossings, so goodness reduces to the absence of
/// critical cycles.
pub fn is_good_embedding(story: &GraphStory, emb: &Embedding) -> bool {
    critical_cycles(story, emb).is_empty()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoodSearch {
    Found(Embedding),
    /// No planar embedding of `G` is good; a good one with crossings may exist.
    PlanarSearchExhausted,
}

/// First good embedding of `G` in key order.
pub fn search_good_embedding(story: &GraphStory) -> Result<GoodSearch, SolveError> {
    let vs: Vec<Vertex> = story.vertices().collect();
    let all = enumerate_with_bound(&vs, story.edges(), DEFAULT_VERTEX_BOUND)?;
    Ok(match all.into_par_iter().find_first(|e| is_good_embedding(story, e)) {
        Some(e) => GoodSearch::Found(e),
        None => GoodSearch::PlanarSearchExhausted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_cycle_story, gen_path_story, gen_sp_unrealizable};
    use crate::solver::{realize, verify_certificate};

    fn complete(n: u32) -> Vec<(Vertex, Vertex)> {
        (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).collect()
    }

    #[test]
    fn outerplanar_cases() {
        let (c8, _) = gen_cycle_story(8, 5).unwrap();
        let cert = outerplanar_certificate(&c8).unwrap();
        assert!(verify_certificate(&c8, &cert).ok);
        let fan = GraphStory::new(7, 5, 0, (2..=5).map(|v| (1, v)).chain((2..7).map(|v| (v, v + 1)))).unwrap();
        let cert = outerplanar_certificate(&fan).unwrap();
        assert!(verify_certificate(&fan, &cert).ok);
        let k4 = GraphStory::new(4, 4, 0, complete(4)).unwrap();
        assert!(outerplanar_certificate(&k4).is_none());
        let p = gen_path_story(9, 5).unwrap().with_k(2);
        assert!(verify_certificate(&p, &outerplanar_certificate(&p).unwrap()).ok);
    }

    #[test]
    fn reroute_cases() {
        let k5 = GraphStory::new(5, 5, 0, complete(5)).unwrap();
        assert!(matches!(one_reroute_realize(&k5), Err(RerouteError::ContainsK5(5))));
        let k4 = GraphStory::new(4, 4, 0, complete(4)).unwrap();
        assert!(matches!(one_reroute_realize(&k4), Err(RerouteError::Unsupported)));
        let k4 = GraphStory::new(5, 5, 0, complete(4)).unwrap();
        assert!(one_reroute_realize(&k4).unwrap().reroutes.is_empty());
        let sp = gen_sp_unrealizable(5).unwrap();
        assert!(realize(&sp).unwrap().is_none());
        let rr = one_reroute_realize(&sp).unwrap();
        assert!(!rr.reroutes.is_empty());
        assert!(verify_certificate(&sp, &rr.certificate()).ok);
    }

    #[test]
    fn exhaustive_reroute_sweep() {
        let r = reroute_state_sweep();
        assert!(r.failures.is_empty(), "{} failures", r.failures.len());
        assert!(r.reroutes > 0);
    }

    #[test]
    fn coevality() {
        let s = gen_path_story(10, 5).unwrap();
        assert!(coeval(&s, 1, 5));
        assert!(!coeval(&s, 1, 6));
        assert!(coeval(&s, 3, 3));
        assert!(coeval_edges(&s, (1, 2), (4, 5)));
        assert!(!coeval_edges(&s, (1, 2), (5, 6)));
    }

    #[test]
    fn nested_cycle_is_critical() {
        // Triangle 1-2-3 around vertex 4 joined to all three.
        let s = GraphStory::new(4, 4, 0, complete(4)).unwrap();
        let vs = [1, 2, 3, 4];
        let embs = enumerate_with_bound(&vs, s.edges(), 12).unwrap();
        let inner = embs
            .iter()
            .find(|e| {
                let outer = &e.faces()[e.outer()];
                !outer.contains_vertex(4)
            })
            .unwrap();
        let cc = critical_cycles(&s, inner);
        assert_eq!(cc, vec![CriticalCycle { cycle: vec![1, 2, 3], witness: 4, external: true }]);
        assert!(!is_good_embedding(&s, inner));
        // Every embedding of K4 encloses one vertex in a triangle.
        assert_eq!(search_good_embedding(&s).unwrap(), GoodSearch::PlanarSearchExhausted);
        let (c8, _) = gen_cycle_story(8, 5).unwrap();
        assert!(matches!(search_good_embedding(&c8).unwrap(), GoodSearch::Found(_)));
    }

    #[test]
    fn cubic_fixture_cycles() {
        let s = crate::generators::cubic_fixture();
        let vs: Vec<Vertex> = s.vertices().collect();
        let embs = enumerate_with_bound(&vs, s.edges(), 12).unwrap();
        let counts: Vec<usize> = embs.iter().map(|e| critical_cycles(&s, e).len()).collect();
        assert!(counts.contains(&2));
        assert!(counts.contains(&0));
        for e in &embs {
            let cc = critical_cycles(&s, e);
            let external_free = cc.iter().all(|c| !c.external);
            for c in &cc {
                assert!(encloses(e, &c.cycle, c.witness));
                assert!(c.cycle.iter().all(|&u| coeval(&s, u, c.witness)));
                if external_free {
                    assert!((6..=8).contains(&c.cycle.len()));
                }
            }
        }
        let GoodSearch::Found(good) = search_good_embedding(&s).unwrap() else { panic!("good embedding expected") };
        let cert = crate::solver::restriction_certificate(&s, &good).unwrap().expect("good embedding supports");
        assert!(verify_certificate(&s, &cert).ok);
    }

    #[test]
    fn outerplanar_embeddings_are_good() {
        let (c8, _) = gen_cycle_story(8, 5).unwrap();
        let vs: Vec<Vertex> = c8.vertices().collect();
        let phi = outerplanar_embedding(&vs, c8.edges()).unwrap();
        assert!(is_good_embedding(&c8, &phi));
    }
}
