//! Layered search for compatible sequences of weighted embeddings.
//!
//! Layer `i` (from `omega` to `n`) holds weighted embeddings of `G_i`. Two
//! nodes in consecutive layers are linked when removing the departing vertex
//! from the first and the arriving vertex from the second gives the same
//! weighted embedding, so links are found by an equality join on removal keys.

use std::collections::{BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::{enumerate_with_bound, Embedding, EmbeddingError, DEFAULT_VERTEX_BOUND};
use crate::story::{self, all_windows_planar, window_graph, GraphStory, StoryDoc, StoryError, Vertex};
use crate::weighted::{carry_weights, compatible, compositions, WeightError, WeightedDoc, WeightedEmbedding};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("window {0} is not planar")]
    WindowNonPlanar(u32),
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("oracle caps exceeded: {0}")]
    CapsExceeded(String),
    #[error(transparent)]
    Embedding(EmbeddingError),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

impl From<EmbeddingError> for SolveError {
    fn from(e: EmbeddingError) -> Self {
        match e {
            EmbeddingError::BoundExceeded { got, bound } => {
                SolveError::BoundExceeded(format!("window has {got} vertices, bound is {bound}"))
            }
            other => SolveError::Embedding(other),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Largest number of reachable nodes allowed in one layer.
    pub max_layer: usize,
    /// Largest window handed to the embedding enumerator.
    pub vertex_bound: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { max_layer: 4_000_000, vertex_bound: DEFAULT_VERTEX_BOUND }
    }
}

/// One rerouting step of a 1-reroute realization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reroute {
    /// Arrival index `i` at which the edge is redrawn.
    pub step: u32,
    pub edge: [Vertex; 2],
    /// Faces of the common embedding of `G_{i-1}` and `G_i` holding the free
    /// point before and after the reroute.
    pub from_face: usize,
    pub to_face: usize,
}

/// A compatible sequence of weighted embeddings for windows `first..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub story: GraphStory,
    pub first: u32,
    pub entries: Vec<WeightedEmbedding>,
    pub reroutes: Vec<Reroute>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateDoc {
    story: StoryDoc,
    first_window: u32,
    embeddings: Vec<WeightedDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    reroutes: Vec<Reroute>,
}

#[derive(Debug, Error)]
pub enum CertificateParseError {
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("certificate story: {0}")]
    Story(#[from] StoryError),
    #[error("certificate entry: {0}")]
    Entry(#[from] WeightError),
}

impl Certificate {
    /// Window index of entry `idx`.
    pub fn window(&self, idx: usize) -> u32 {
        self.first + idx as u32
    }

    pub fn to_json(&self) -> String {
        let doc = CertificateDoc {
            story: self.story.to_doc(),
            first_window: self.first,
            embeddings: self.entries.iter().map(|w| w.to_doc()).collect(),
            reroutes: self.reroutes.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CertificateParseError> {
        let doc: CertificateDoc =
            serde_json::from_str(text).map_err(|e| CertificateParseError::Malformed(e.to_string()))?;
        let story = story::from_doc(doc.story)?.story;
        let entries = doc.embeddings.iter().map(WeightedEmbedding::from_doc).collect::<Result<_, _>>()?;
        Ok(Certificate { story, first: doc.first_window, entries, reroutes: doc.reroutes })
    }
}

/// Per-layer counts gathered during a solve.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub layer_sizes: Vec<usize>,
    pub embedding_counts: Vec<usize>,
}

type RemovalKey = (u32, Vec<u32>);

struct Node {
    emb: u32,
    weights: Vec<u32>,
    in_key: Option<RemovalKey>,
    out_key: Option<RemovalKey>,
}

fn window_vertices(story: &GraphStory, i: u32) -> (Vec<Vertex>, Vec<(Vertex, Vertex)>) {
    let w = window_graph(story, i).expect("window index in range");
    (w.vertices(), w.edges)
}

/// Runs the layered search with embeddings of each window supplied by `provider`.
fn layered(
    story: &GraphStory,
    cfg: &SolverConfig,
    provider: &(dyn Fn(u32) -> Result<Vec<Embedding>, SolveError> + Sync),
    stats: &mut SolveStats,
) -> Result<Option<Vec<WeightedEmbedding>>, SolveError> {
    let (n, omega, k) = (story.n(), story.omega(), story.k());
    if n <= omega {
        let embs = provider(n)?;
        stats.embedding_counts.push(embs.len());
        let Some(e) = embs.into_iter().next() else { return Ok(None) };
        let weights = compositions(e.face_count(), k).into_iter().min().expect("one composition");
        stats.layer_sizes.push(1);
        return Ok(Some(vec![WeightedEmbedding { embedding: e, weights }]));
    }
    let mut layers: Vec<(Vec<Embedding>, Vec<Node>)> = Vec::new();
    let mut interner: HashMap<Embedding, u32> = HashMap::new();
    for i in omega..=n {
        let embs = provider(i)?;
        stats.embedding_counts.push(embs.len());
        let v_in = i;
        let v_out = i + 1 - omega;
        let out_removals: Vec<Option<crate::embedding::Removal>> = if i < n {
            embs.par_iter().map(|e| e.remove_vertex(v_out).map(Some)).collect::<Result<_, _>>()?
        } else {
            vec![None; embs.len()]
        };
        let mut nodes: Vec<Node> = if i == omega {
            let per: Vec<Vec<Node>> = embs
                .par_iter()
                .enumerate()
                .map(|(ei, e)| {
                    compositions(e.face_count(), k)
                        .into_iter()
                        .map(|weights| Node { emb: ei as u32, weights, in_key: None, out_key: None })
                        .collect()
                })
                .collect();
            per.into_iter().flatten().collect()
        } else {
            let prev = &layers.last().expect("previous layer").1;
            let mut targets: HashMap<u32, BTreeSet<Vec<u32>>> = HashMap::new();
            for nd in prev {
                let (id, w) = nd.out_key.clone().expect("out key on inner layer");
                targets.entry(id).or_default().insert(w);
            }
            let interner_ref = &interner;
            let targets_ref = &targets;
            let per: Result<Vec<Vec<Node>>, SolveError> = embs
                .par_iter()
                .enumerate()
                .map(|(ei, e)| {
                    let r = e.remove_vertex(v_in)?;
                    let Some(&id) = interner_ref.get(&r.embedding) else { return Ok(Vec::new()) };
                    let Some(ws) = targets_ref.get(&id) else { return Ok(Vec::new()) };
                    let mut out = Vec::new();
                    for target in ws {
                        let spare = target[r.merged];
                        if spare == 0 {
                            continue;
                        }
                        for spread in compositions(r.incident.len(), spare - 1) {
                            let mut weights = vec![0; e.face_count()];
                            for f in 0..weights.len() {
                                weights[f] = match r.incident.iter().position(|&x| x == f) {
                                    Some(p) => spread[p],
                                    None => target[r.face_map[f]],
                                };
                            }
                            debug_assert_eq!(carry_weights(&r, &weights), *target);
                            out.push(Node {
                                emb: ei as u32,
                                weights,
                                in_key: Some((id, target.clone())),
                                out_key: None,
                            });
                        }
                    }
                    Ok(out)
                })
                .collect();
            per?.into_iter().flatten().collect()
        };
        if nodes.len() > cfg.max_layer {
            return Err(SolveError::BoundExceeded(format!(
                "layer {i} has {} nodes, cap is {}",
                nodes.len(),
                cfg.max_layer
            )));
        }
        stats.layer_sizes.push(nodes.len());
        if nodes.is_empty() {
            return Ok(None);
        }
        interner = HashMap::new();
        if i < n {
            let mut ids = vec![0u32; embs.len()];
            for (ei, r) in out_removals.iter().enumerate() {
                let r = r.as_ref().expect("removal computed");
                let next = interner.len() as u32;
                ids[ei] = *interner.entry(r.embedding.clone()).or_insert(next);
            }
            for nd in &mut nodes {
                let r = out_removals[nd.emb as usize].as_ref().expect("removal computed");
                nd.out_key = Some((ids[nd.emb as usize], carry_weights(r, &nd.weights)));
            }
        }
        layers.push((embs, nodes));
    }
    Ok(Some(extract_smallest(&layers)))
}

/// Lexicographically smallest path: mark nodes that reach the last layer, then
/// walk forward picking the smallest useful successor.
fn extract_smallest(layers: &[(Vec<Embedding>, Vec<Node>)]) -> Vec<WeightedEmbedding> {
    let m = layers.len();
    let mut useful: Vec<Vec<bool>> = layers.iter().map(|(_, ns)| vec![false; ns.len()]).collect();
    useful[m - 1].iter_mut().for_each(|u| *u = true);
    for li in (0..m - 1).rev() {
        let keys: HashSet<&RemovalKey> = layers[li + 1]
            .1
            .iter()
            .zip(&useful[li + 1])
            .filter(|(_, &u)| u)
            .map(|(nd, _)| nd.in_key.as_ref().expect("in key"))
            .collect();
        for (ni, nd) in layers[li].1.iter().enumerate() {
            useful[li][ni] = keys.contains(nd.out_key.as_ref().expect("out key"));
        }
    }
    // Embeddings are sorted by key, so (embedding index, weights) orders nodes
    // exactly as their weighted keys do.
    let order = |nd: &Node| (nd.emb, nd.weights.clone());
    let mut path = Vec::with_capacity(m);
    let mut want: Option<RemovalKey> = None;
    for li in 0..m {
        let best = layers[li]
            .1
            .iter()
            .zip(&useful[li])
            .filter(|(nd, &u)| u && want.as_ref().is_none_or(|w| nd.in_key.as_ref() == Some(w)))
            .map(|(nd, _)| nd)
            .min_by_key(|nd| order(nd))
            .expect("useful successor exists");
        path.push(WeightedEmbedding {
            embedding: layers[li].0[best.emb as usize].clone(),
            weights: best.weights.clone(),
        });
        want = best.out_key.clone();
    }
    path
}

fn first_window(story: &GraphStory) -> u32 {
    story.omega().min(story.n())
}

/// Decides realizability; returns the smallest certificate when realizable.
pub fn realize(story: &GraphStory) -> Result<Option<Certificate>, SolveError> {
    realize_with(story, &SolverConfig::default()).map(|(c, _)| c)
}

pub fn realize_with(story: &GraphStory, cfg: &SolverConfig) -> Result<(Option<Certificate>, SolveStats), SolveError> {
    if let Some(i) = all_windows_planar(story) {
        return Err(SolveError::WindowNonPlanar(i));
    }
    let bound = cfg.vertex_bound;
    let provider = |i: u32| -> Result<Vec<Embedding>, SolveError> {
        let (vs, es) = window_vertices(story, i);
        Ok(enumerate_with_bound(&vs, &es, bound)?)
    };
    let mut stats = SolveStats::default();
    let entries = layered(story, cfg, &provider, &mut stats)?;
    let cert = entries.map(|entries| Certificate {
        story: story.clone(),
        first: first_window(story),
        entries,
        reroutes: Vec::new(),
    });
    Ok((cert, stats))
}

/// Smallest `k <= k_max` for which the story is realizable.
pub fn min_k(story: &GraphStory, k_max: u32) -> Result<Option<u32>, SolveError> {
    min_k_with(story, k_max, &SolverConfig::default()).map(|r| r.map(|(k, _)| k))
}

pub fn min_k_with(story: &GraphStory, k_max: u32, cfg: &SolverConfig) -> Result<Option<(u32, Certificate)>, SolveError> {
    for k in 0..=k_max {
        if let (Some(c), _) = realize_with(&story.with_k(k), cfg)? {
            return Ok(Some((k, c)));
        }
    }
    Ok(None)
}

/// Outcome of certificate verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub ok: bool,
    pub failure: Option<String>,
}

impl VerifyReport {
    fn fail(msg: String) -> Self {
        VerifyReport { ok: false, failure: Some(msg) }
    }
}

/// Re-checks a certificate from the definitions alone.
pub fn verify_certificate(story: &GraphStory, cert: &Certificate) -> VerifyReport {
    let s = &cert.story;
    if (s.n(), s.omega(), s.k(), s.edges()) != (story.n(), story.omega(), story.k(), story.edges()) {
        return VerifyReport::fail("certificate story header differs from the story".into());
    }
    let first = first_window(story);
    if cert.first != first {
        return VerifyReport::fail(format!("first window is {}, expected {first}", cert.first));
    }
    let expected = (story.n() - first + 1) as usize;
    if cert.entries.len() != expected {
        return VerifyReport::fail(format!("{} entries, expected {expected}", cert.entries.len()));
    }
    for (idx, w) in cert.entries.iter().enumerate() {
        let i = cert.window(idx);
        let (vs, es) = window_vertices(story, i);
        if let Err(e) = w.embedding.validate(&vs, &es) {
            return VerifyReport::fail(format!("entry {idx} (window {i}): {e}"));
        }
        if w.weights.len() != w.embedding.face_count() {
            return VerifyReport::fail(format!("entry {idx} (window {i}): weights do not match faces"));
        }
        if w.total() != story.k() {
            return VerifyReport::fail(format!(
                "entry {idx} (window {i}): total weight {}, expected {}",
                w.total(),
                story.k()
            ));
        }
    }
    let mut rerouted: HashMap<u32, &Reroute> = HashMap::new();
    for r in &cert.reroutes {
        if rerouted.insert(r.step, r).is_some() {
            return VerifyReport::fail(format!("more than one reroute at step {}", r.step));
        }
        if r.step <= cert.first || r.step > story.n() {
            return VerifyReport::fail(format!("reroute at step {} outside the sequence", r.step));
        }
    }
    for idx in 1..cert.entries.len() {
        let i = cert.window(idx);
        if let Some(r) = rerouted.get(&i) {
            if let Err(msg) = check_reroute(&cert.entries[idx - 1], &cert.entries[idx], i - story.omega(), r) {
                return VerifyReport::fail(format!("reroute at step {i}: {msg}"));
            }
            continue;
        }
        match compatible(&cert.entries[idx - 1], &cert.entries[idx], i - story.omega(), i) {
            Ok(true) => {}
            Ok(false) => {
                return VerifyReport::fail(format!("entries {} and {idx} (windows {} and {i}) are not compatible", idx - 1, i - 1))
            }
            Err(e) => return VerifyReport::fail(format!("entries {} and {idx}: {e}", idx - 1)),
        }
    }
    VerifyReport { ok: true, failure: None }
}

/// A rerouted step keeps the common embedding and moves the freed point from
/// the face left by the departing vertex to an adjacent face across `r.edge`.
fn check_reroute(prev: &WeightedEmbedding, next: &WeightedEmbedding, v_out: Vertex, r: &Reroute) -> Result<(), String> {
    let a = prev.embedding.remove_vertex(v_out).map_err(|e| e.to_string())?;
    let b = next.embedding.remove_vertex(r.step).map_err(|e| e.to_string())?;
    if a.embedding != b.embedding {
        return Err("common embedding differs".into());
    }
    if (a.merged, b.merged) != (r.from_face, r.to_face) {
        return Err(format!(
            "logged faces {} -> {} but removals give {} -> {}",
            r.from_face, r.to_face, a.merged, b.merged
        ));
    }
    let [x, y] = r.edge;
    let common = &a.embedding;
    let sides = (common.face_of_dart((x, y)), common.face_of_dart((y, x)));
    let (f, g) = (Some(r.from_face), Some(r.to_face));
    if sides != (f, g) && sides != (g, f) {
        return Err(format!("edge ({x}, {y}) does not separate the logged faces"));
    }
    if prev.weights.iter().any(|&w| w != 0) || next.weights.iter().any(|&w| w != 0) {
        return Err("reroutes are only defined for minimal stories".into());
    }
    Ok(())
}

pub const ORACLE_MAX_N: u32 = 12;
pub const ORACLE_MAX_SIGMA: u32 = 5;

/// Depth-first oracle: full layers, compatibility recomputed pairwise.
pub fn brute_force_realize(story: &GraphStory) -> Result<Option<Certificate>, SolveError> {
    if story.n() > ORACLE_MAX_N || story.sigma() > ORACLE_MAX_SIGMA {
        return Err(SolveError::CapsExceeded(format!(
            "n = {}, omega + k = {} (caps {ORACLE_MAX_N}, {ORACLE_MAX_SIGMA})",
            story.n(),
            story.sigma()
        )));
    }
    if all_windows_planar(story).is_some() {
        return Ok(None);
    }
    let first = first_window(story);
    let mut layers: Vec<Vec<WeightedEmbedding>> = Vec::new();
    for i in first..=story.n() {
        let (vs, es) = window_vertices(story, i);
        let mut all: Vec<WeightedEmbedding> = enumerate_with_bound(&vs, &es, DEFAULT_VERTEX_BOUND)?
            .into_iter()
            .flat_map(|e| {
                compositions(e.face_count(), story.k())
                    .into_iter()
                    .map(move |weights| WeightedEmbedding { embedding: e.clone(), weights })
            })
            .collect();
        all.sort_by_key(|w| w.key());
        layers.push(all);
    }
    let mut dead: Vec<Vec<bool>> = layers.iter().map(|l| vec![false; l.len()]).collect();
    let mut path = Vec::new();
    fn dfs(
        li: usize,
        ni: usize,
        layers: &[Vec<WeightedEmbedding>],
        dead: &mut Vec<Vec<bool>>,
        path: &mut Vec<usize>,
        first: u32,
        omega: u32,
    ) -> Result<bool, SolveError> {
        path.push(ni);
        if li + 1 == layers.len() {
            return Ok(true);
        }
        let i = first + li as u32 + 1;
        for nj in 0..layers[li + 1].len() {
            if dead[li + 1][nj] {
                continue;
            }
            if compatible(&layers[li][ni], &layers[li + 1][nj], i - omega, i)?
                && dfs(li + 1, nj, layers, dead, path, first, omega)?
            {
                return Ok(true);
            }
        }
        dead[li][ni] = true;
        path.pop();
        Ok(false)
    }
    for ni in 0..layers[0].len() {
        if dfs(0, ni, &layers, &mut dead, &mut path, first, story.omega())? {
            let entries = path.iter().enumerate().map(|(li, &ni)| layers[li][ni].clone()).collect();
            return Ok(Some(Certificate { story: story.clone(), first, entries, reroutes: Vec::new() }));
        }
    }
    Ok(None)
}

/// An embedding of `G` whose restrictions to the windows carry a compatible
/// chain of weight distributions.
pub fn find_supporting_embedding(story: &GraphStory) -> Result<Option<Embedding>, SolveError> {
    find_supporting_with(story, &SolverConfig::default())
}

pub fn find_supporting_with(story: &GraphStory, cfg: &SolverConfig) -> Result<Option<Embedding>, SolveError> {
    let vs: Vec<Vertex> = story.vertices().collect();
    let all = match enumerate_with_bound(&vs, story.edges(), cfg.vertex_bound) {
        Ok(v) => v,
        Err(EmbeddingError::NonPlanar) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let found = all
        .par_iter()
        .map(|phi| supports(story, cfg, phi))
        .find_first(|r| !matches!(r, Ok(false)));
    match found {
        None => Ok(None),
        Some(Err(e)) => Err(e),
        Some(Ok(_)) => {
            let idx = all
                .iter()
                .position(|phi| matches!(supports(story, cfg, phi), Ok(true)))
                .expect("found above");
            Ok(Some(all[idx].clone()))
        }
    }
}

/// Whether `phi` is a supporting embedding of the story.
pub fn supports(story: &GraphStory, cfg: &SolverConfig, phi: &Embedding) -> Result<bool, SolveError> {
    let provider = |i: u32| -> Result<Vec<Embedding>, SolveError> {
        let w = window_graph(story, i).expect("window index in range");
        let keep: BTreeSet<Vertex> = w.vertices().into_iter().collect();
        Ok(vec![phi.restrict(&keep)?])
    };
    let mut stats = SolveStats::default();
    Ok(layered(story, cfg, &provider, &mut stats)?.is_some())
}

/// Certificate made of the restrictions of `phi` to each window, if one exists.
pub fn restriction_certificate(story: &GraphStory, phi: &Embedding) -> Result<Option<Certificate>, SolveError> {
    let provider = |i: u32| -> Result<Vec<Embedding>, SolveError> {
        let w = window_graph(story, i).expect("window index in range");
        let keep: BTreeSet<Vertex> = w.vertices().into_iter().collect();
        Ok(vec![phi.restrict(&keep)?])
    };
    let mut stats = SolveStats::default();
    let entries = layered(story, &SolverConfig::default(), &provider, &mut stats)?;
    Ok(entries.map(|entries| Certificate { story: story.clone(), first: first_window(story), entries, reroutes: Vec::new() }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: u32, omega: u32, k: u32) -> GraphStory {
        GraphStory::new(n, omega, k, (1..n).map(|i| (i, i + 1))).unwrap()
    }

    #[test]
    fn path_story_realizable_and_verified() {
        let s = path(10, 5, 0);
        let c = realize(&s).unwrap().expect("path is realizable");
        assert_eq!(c.entries.len(), 6);
        assert!(verify_certificate(&s, &c).ok);
        let back = Certificate::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn tampering_is_detected() {
        let s = path(8, 3, 1);
        let c = realize(&s).unwrap().unwrap();
        let mut bumped = c.clone();
        bumped.entries[1].weights[0] += 1;
        let r = verify_certificate(&s, &bumped);
        assert!(!r.ok);
        assert!(r.failure.unwrap().contains("total weight"));
        let mut swapped = c.clone();
        swapped.entries.swap(0, 1);
        assert!(!verify_certificate(&s, &swapped).ok);
    }

    #[test]
    fn small_n_is_planarity() {
        let tri = GraphStory::new(3, 3, 1, [(1, 2), (2, 3), (1, 3)]).unwrap();
        let c = realize(&tri).unwrap().unwrap();
        assert_eq!(c.entries.len(), 1);
        assert!(verify_certificate(&tri, &c).ok);
        assert!(brute_force_realize(&tri).unwrap().is_some());
    }

    #[test]
    fn nonplanar_window_reported() {
        let k5 = GraphStory::new(5, 5, 0, (1..=5).flat_map(|a| (a + 1..=5).map(move |b| (a, b)))).unwrap();
        assert!(matches!(realize(&k5), Err(SolveError::WindowNonPlanar(5))));
    }

    #[test]
    fn oracle_caps() {
        assert!(matches!(brute_force_realize(&path(13, 3, 0)), Err(SolveError::CapsExceeded(_))));
        assert!(matches!(brute_force_realize(&path(8, 4, 2)), Err(SolveError::CapsExceeded(_))));
        assert!(brute_force_realize(&path(6, 3, 0)).unwrap().is_some());
    }

    #[test]
    fn path_has_supporting_embedding() {
        let s = path(8, 4, 0);
        let phi = find_supporting_embedding(&s).unwrap().expect("line embedding supports");
        assert_eq!(phi.face_count(), 1);
    }

    #[test]
    fn omega_one_chain() {
        let s = GraphStory::new(4, 1, 2, []).unwrap();
        let c = realize(&s).unwrap().unwrap();
        assert!(verify_certificate(&s, &c).ok);
    }
}
