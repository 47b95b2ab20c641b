//! Labeled plane embeddings of possibly disconnected graphs.
//!
//! Rotations are counter-clockwise. Faces are traced with the face on the left
//! of each dart: the successor of dart `u -> v` is `v -> w` where `w` precedes
//! `u` in the rotation of `v`. Bounded faces are therefore walked
//! counter-clockwise. A global face holds one boundary walk per incident
//! component plus the isolated vertices lying in it.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::story::Vertex;

/// A rotation system of one component with its face walks.
type ComponentOption = (BTreeMap<Vertex, Vec<Vertex>>, Vec<Vec<Vertex>>);

pub const DEFAULT_VERTEX_BOUND: usize = 12;

pub type Dart = (Vertex, Vertex);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmbeddingError {
    #[error("graph is not planar")]
    NonPlanar,
    #[error("graph has {got} vertices, bound is {bound}")]
    BoundExceeded { got: usize, bound: usize },
    #[error("invalid rotation system: {0}")]
    BadRotation(String),
    #[error("rotation system is not planar (Euler violated on component of {0})")]
    EulerViolation(Vertex),
    #[error("inconsistent containment: {0}")]
    BadContainment(String),
    #[error("vertex {0} not in embedding")]
    UnknownVertex(Vertex),
    #[error("invalid embedding: {0}")]
    Invalid(String),
}

/// A global face: boundary walks (one per incident component) and isolated vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Face {
    pub walks: Vec<Vec<Vertex>>,
    pub isolated: Vec<Vertex>,
}

impl Face {
    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.isolated.contains(&v) || self.walks.iter().any(|w| w.contains(&v))
    }

    /// Darts on this face's walks.
    pub fn darts(&self) -> impl Iterator<Item = Dart> + '_ {
        self.walks.iter().flat_map(|w| walk_darts(w))
    }

    pub fn has_dart(&self, d: Dart) -> bool {
        self.darts().any(|x| x == d)
    }

    /// Distinct vertices on the face boundary and inside it.
    pub fn vertices(&self) -> BTreeSet<Vertex> {
        let mut s: BTreeSet<Vertex> = self.isolated.iter().copied().collect();
        for w in &self.walks {
            s.extend(w.iter().copied());
        }
        s
    }

    /// Copy with walks rotated to their minimal form and lists sorted.
    pub fn canonical(&self) -> Face {
        let mut f = self.clone();
        f.canonicalize();
        f
    }

    fn canonicalize(&mut self) {
        for w in &mut self.walks {
            *w = min_rotation(w);
        }
        self.walks.sort();
        self.isolated.sort_unstable();
    }
}

/// Darts of a closed walk given as a cyclic vertex sequence.
pub fn walk_darts(w: &[Vertex]) -> impl Iterator<Item = Dart> + '_ {
    (0..w.len()).map(move |i| (w[i], w[(i + 1) % w.len()]))
}

fn min_rotation(w: &[Vertex]) -> Vec<Vertex> {
    let n = w.len();
    let best = (0..n)
        .min_by(|&a, &b| {
            (0..n).map(|i| w[(a + i) % n]).cmp((0..n).map(|i| w[(b + i) % n]))
        })
        .unwrap_or(0);
    (0..n).map(|i| w[(best + i) % n]).collect()
}

fn rotate_to_min(r: &[Vertex]) -> Vec<Vertex> {
    match r.iter().enumerate().min_by_key(|(_, &x)| x) {
        Some((p, _)) => r[p..].iter().chain(&r[..p]).copied().collect(),
        None => Vec::new(),
    }
}

/// Opaque canonical key; equal keys iff equal plane embeddings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(pub Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

/// A labeled plane embedding in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Embedding {
    rotations: Vec<(Vertex, Vec<Vertex>)>,
    faces: Vec<Face>,
    outer: usize,
}

/// Outcome of deleting one vertex: the smaller embedding and where old faces went.
#[derive(Debug, Clone)]
pub struct Removal {
    pub embedding: Embedding,
    /// Old face index to new face index.
    pub face_map: Vec<usize>,
    /// Index of the face created by the removal.
    pub merged: usize,
    /// Old faces that were incident to the removed vertex.
    pub incident: Vec<usize>,
}

impl Embedding {
    /// The embedding of the empty graph: a single empty face.
    pub fn empty() -> Self {
        Embedding {
            rotations: Vec::new(),
            faces: vec![Face { walks: Vec::new(), isolated: Vec::new() }],
            outer: 0,
        }
    }

    fn from_parts(rotations: BTreeMap<Vertex, Vec<Vertex>>, faces: Vec<Face>, outer: usize) -> (Self, Vec<usize>) {
        let rotations = rotations.into_iter().map(|(v, r)| (v, rotate_to_min(&r))).collect();
        let mut faces: Vec<(Face, usize)> = faces
            .into_iter()
            .enumerate()
            .map(|(i, mut f)| {
                f.canonicalize();
                (f, i)
            })
            .collect();
        faces.sort();
        let mut map = vec![0; faces.len()];
        for (new, (_, old)) in faces.iter().enumerate() {
            map[*old] = new;
        }
        let outer = map[outer];
        let emb = Embedding { rotations, faces: faces.into_iter().map(|(f, _)| f).collect(), outer };
        (emb, map)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.rotations.iter().map(|(v, _)| *v)
    }
    pub fn vertex_count(&self) -> usize {
        self.rotations.len()
    }
    pub fn contains(&self, v: Vertex) -> bool {
        self.rotations.binary_search_by_key(&v, |(x, _)| *x).is_ok()
    }
    pub fn rotation(&self, v: Vertex) -> Option<&[Vertex]> {
        self.rotations
            .binary_search_by_key(&v, |(x, _)| *x)
            .ok()
            .map(|i| self.rotations[i].1.as_slice())
    }
    pub fn rotations(&self) -> &[(Vertex, Vec<Vertex>)] {
        &self.rotations
    }
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }
    pub fn outer(&self) -> usize {
        self.outer
    }
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut e: Vec<_> = self
            .rotations
            .iter()
            .flat_map(|(v, r)| r.iter().filter(move |&&w| *v < w).map(move |&w| (*v, w)))
            .collect();
        e.sort_unstable();
        e
    }

    /// Face whose walks contain dart `d`.
    pub fn face_of_dart(&self, d: Dart) -> Option<usize> {
        self.faces.iter().position(|f| f.has_dart(d))
    }

    /// Face holding isolated vertex `v`.
    pub fn face_of_isolated(&self, v: Vertex) -> Option<usize> {
        self.faces.iter().position(|f| f.isolated.contains(&v))
    }

    /// Faces incident to `v` (boundary or isolated).
    pub fn faces_at(&self, v: Vertex) -> Vec<usize> {
        (0..self.faces.len()).filter(|&i| self.faces[i].contains_vertex(v)).collect()
    }

    /// Neighbor following `u` counter-clockwise around `v`.
    pub fn next_ccw(&self, v: Vertex, u: Vertex) -> Option<Vertex> {
        let r = self.rotation(v)?;
        let p = r.iter().position(|&x| x == u)?;
        Some(r[(p + 1) % r.len()])
    }

    /// Neighbor preceding `u` counter-clockwise around `v`.
    pub fn prev_ccw(&self, v: Vertex, u: Vertex) -> Option<Vertex> {
        let r = self.rotation(v)?;
        let p = r.iter().position(|&x| x == u)?;
        Some(r[(p + r.len() - 1) % r.len()])
    }

    pub fn key(&self) -> CanonicalKey {
        canonical_form(self)
    }

    /// Deletes `v`, merging its incident faces into one.
    pub fn remove_vertex(&self, v: Vertex) -> Result<Removal, EmbeddingError> {
        let rot = self.rotation(v).ok_or(EmbeddingError::UnknownVertex(v))?.to_vec();
        let rotations: BTreeMap<Vertex, Vec<Vertex>> = self
            .rotations
            .iter()
            .filter(|(x, _)| *x != v)
            .map(|(x, r)| (*x, r.iter().copied().filter(|&y| y != v).collect()))
            .collect();
        let incident = self.faces_at(v);
        let mut merged = Face { walks: Vec::new(), isolated: Vec::new() };
        let mut seeds = Vec::new();
        for &fi in &incident {
            let f = &self.faces[fi];
            merged.isolated.extend(f.isolated.iter().copied().filter(|&x| x != v));
            for w in &f.walks {
                if w.contains(&v) {
                    seeds.extend(walk_darts(w).filter(|&(a, b)| a != v && b != v));
                } else {
                    merged.walks.push(w.clone());
                }
            }
        }
        merged.walks.extend(trace_from(&rotations, seeds));
        for &u in &rot {
            if rotations.get(&u).is_some_and(|r| r.is_empty()) {
                merged.isolated.push(u);
            }
        }
        let mut faces = Vec::with_capacity(self.faces.len() + 1 - incident.len());
        let mut pre_map = vec![usize::MAX; self.faces.len()];
        for (i, f) in self.faces.iter().enumerate() {
            if !incident.contains(&i) {
                pre_map[i] = faces.len();
                faces.push(f.clone());
            }
        }
        let merged_pre = faces.len();
        faces.push(merged);
        for &i in &incident {
            pre_map[i] = merged_pre;
        }
        let outer = pre_map[self.outer];
        let (embedding, map) = Embedding::from_parts(rotations, faces, outer);
        let face_map = pre_map.iter().map(|&p| map[p]).collect();
        Ok(Removal { embedding, face_map, merged: map[merged_pre], incident })
    }

    /// Restriction to `keep`, deleting other vertices in increasing order.
    pub fn restrict(&self, keep: &BTreeSet<Vertex>) -> Result<Embedding, EmbeddingError> {
        for &k in keep {
            if !self.contains(k) {
                return Err(EmbeddingError::UnknownVertex(k));
            }
        }
        let mut cur = self.clone();
        let drop: Vec<Vertex> = self.vertices().filter(|v| !keep.contains(v)).collect();
        for v in drop {
            cur = cur.remove_vertex(v)?.embedding;
        }
        Ok(cur)
    }

    /// Checks that this is a plane embedding of the graph `(vertices, edges)`.
    pub fn validate(&self, vertices: &[Vertex], edges: &[(Vertex, Vertex)]) -> Result<(), EmbeddingError> {
        let bad = |m: String| Err(EmbeddingError::Invalid(m));
        let mine: Vec<Vertex> = self.vertices().collect();
        let mut want = vertices.to_vec();
        want.sort_unstable();
        want.dedup();
        if mine != want {
            return bad(format!("vertex set {mine:?} differs from {want:?}"));
        }
        let mut want_e: Vec<_> = edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        want_e.sort_unstable();
        want_e.dedup();
        let rot: BTreeMap<Vertex, Vec<Vertex>> = self.rotations.iter().cloned().collect();
        check_rotation(&rot)?;
        if self.edges() != want_e {
            return bad("rotation edges differ from graph edges".into());
        }
        if self.outer >= self.faces.len() {
            return bad("outer face index out of range".into());
        }
        let comps = components(&rot);
        let comp_of: HashMap<Vertex, usize> =
            comps.iter().enumerate().flat_map(|(i, c)| c.iter().map(move |&v| (v, i))).collect();
        let mut traced = trace_all(&rot);
        for c in comps.iter().filter(|c| c.len() > 1) {
            let e: usize = c.iter().map(|v| rot[v].len()).sum::<usize>() / 2;
            let w = traced.iter().filter(|w| comp_of[&w[0]] == comp_of[&c[0]]).count();
            if c.len() + w != e + 2 {
                return Err(EmbeddingError::EulerViolation(c[0]));
            }
        }
        let mut stored: Vec<Vec<Vertex>> = self.faces.iter().flat_map(|f| f.walks.iter().cloned()).collect();
        stored.sort();
        traced.sort();
        if stored != traced {
            return bad("stored walks do not match traced rotations".into());
        }
        let mut iso: Vec<Vertex> = self.faces.iter().flat_map(|f| f.isolated.iter().copied()).collect();
        iso.sort_unstable();
        let want_iso: Vec<Vertex> = rot.iter().filter(|(_, r)| r.is_empty()).map(|(v, _)| *v).collect();
        if iso != want_iso {
            return bad("isolated vertices misplaced".into());
        }
        // Faces and components form a tree when every component sits in exactly one place.
        let nf = self.faces.len();
        let nc = comps.len();
        let mut uf = UnionFind::new(nf + nc);
        let mut links = 0usize;
        for (fi, f) in self.faces.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for w in &f.walks {
                let c = comp_of[&w[0]];
                if !seen.insert(c) {
                    return bad(format!("face {fi} holds two walks of one component"));
                }
                links += 1;
                if !uf.union(fi, nf + c) {
                    return bad("face/component incidence has a cycle".into());
                }
            }
            for v in &f.isolated {
                links += 1;
                if !uf.union(fi, nf + comp_of[v]) {
                    return bad("face/component incidence has a cycle".into());
                }
            }
        }
        if links + 1 != nf + nc {
            return bad("face/component incidence is disconnected".into());
        }
        Ok(())
    }

    pub fn to_doc(&self) -> EmbeddingDoc {
        EmbeddingDoc {
            rotations: self.rotations.iter().cloned().collect(),
            faces: self.faces.clone(),
            outer: self.outer,
        }
    }

    /// Builds from a document; the result is re-canonicalized but not validated.
    pub fn from_doc(doc: &EmbeddingDoc) -> Result<Self, EmbeddingError> {
        if doc.outer >= doc.faces.len() {
            return Err(EmbeddingError::Invalid("outer face index out of range".into()));
        }
        if doc.faces.iter().flat_map(|f| &f.walks).any(|w| w.is_empty()) {
            return Err(EmbeddingError::Invalid("empty walk".into()));
        }
        Ok(Embedding::from_parts(doc.rotations.clone(), doc.faces.clone(), doc.outer).0)
    }

    /// Renames vertices with an injective map.
    pub fn relabel(&self, f: impl Fn(Vertex) -> Vertex) -> Embedding {
        let rotations = self.rotations.iter().map(|(v, r)| (f(*v), r.iter().map(|&u| f(u)).collect())).collect();
        let faces = self
            .faces
            .iter()
            .map(|face| Face {
                walks: face.walks.iter().map(|w| w.iter().map(|&u| f(u)).collect()).collect(),
                isolated: face.isolated.iter().map(|&u| f(u)).collect(),
            })
            .collect();
        Embedding::from_parts(rotations, faces, self.outer).0
    }
}

/// Serialized form of an embedding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingDoc {
    pub rotations: BTreeMap<Vertex, Vec<Vertex>>,
    pub faces: Vec<Face>,
    pub outer: usize,
}

pub fn canonical_form(e: &Embedding) -> CanonicalKey {
    let mut out = Vec::with_capacity(64);
    let mut put = |x: u32| out.extend_from_slice(&x.to_be_bytes());
    put(e.rotations.len() as u32);
    for (v, r) in &e.rotations {
        put(*v);
        put(r.len() as u32);
        r.iter().for_each(|&x| put(x));
    }
    put(e.faces.len() as u32);
    for f in &e.faces {
        put(f.walks.len() as u32);
        for w in &f.walks {
            put(w.len() as u32);
            w.iter().for_each(|&x| put(x));
        }
        put(f.isolated.len() as u32);
        f.isolated.iter().for_each(|&x| put(x));
    }
    put(e.outer as u32);
    CanonicalKey(out)
}

/// Placement of one connected component inside the plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    /// Any vertex of the component.
    pub vertex: Vertex,
    /// A dart on the component's outer walk; `None` for isolated vertices and
    /// single-walk components.
    pub outer: Option<Dart>,
    /// A dart of another component on the walk of the face hosting this one;
    /// `None` places the component in the unbounded region.
    pub host: Option<Dart>,
}

/// Builds the global faces from rotations and a containment assignment.
/// Components without a placement entry sit in the unbounded region.
pub fn trace_faces(
    rotations: &BTreeMap<Vertex, Vec<Vertex>>,
    containment: &[Placement],
) -> Result<Embedding, EmbeddingError> {
    check_rotation(rotations)?;
    let comps = components(rotations);
    let comp_of: HashMap<Vertex, usize> =
        comps.iter().enumerate().flat_map(|(i, c)| c.iter().map(move |&v| (v, i))).collect();
    let walks = trace_all(rotations);
    let mut comp_walks: Vec<Vec<usize>> = vec![Vec::new(); comps.len()];
    for (wi, w) in walks.iter().enumerate() {
        comp_walks[comp_of[&w[0]]].push(wi);
    }
    for (ci, c) in comps.iter().enumerate() {
        if c.len() > 1 {
            let e: usize = c.iter().map(|v| rotations[v].len()).sum::<usize>() / 2;
            if c.len() + comp_walks[ci].len() != e + 2 {
                return Err(EmbeddingError::EulerViolation(c[0]));
            }
        }
    }
    let walk_of_dart = |d: Dart| walks.iter().position(|w| walk_darts(w).any(|x| x == d));
    let mut outer_walk: Vec<Option<usize>> =
        comp_walks.iter().map(|ws| if ws.len() == 1 { Some(ws[0]) } else { None }).collect();
    let mut host: Vec<Option<usize>> = vec![None; comps.len()];
    for p in containment {
        let c = *comp_of.get(&p.vertex).ok_or(EmbeddingError::UnknownVertex(p.vertex))?;
        if let Some(d) = p.outer {
            let w = walk_of_dart(d)
                .filter(|w| comp_of[&walks[*w][0]] == c)
                .ok_or_else(|| EmbeddingError::BadContainment(format!("outer dart {d:?} not on component")))?;
            outer_walk[c] = Some(w);
        }
        if let Some(d) = p.host {
            let w = walk_of_dart(d)
                .ok_or_else(|| EmbeddingError::BadContainment(format!("host dart {d:?} unknown")))?;
            if comp_of[&walks[w][0]] == c {
                return Err(EmbeddingError::BadContainment("component hosted by itself".into()));
            }
            host[c] = Some(w);
        }
    }
    for (c, ws) in comp_walks.iter().enumerate() {
        if !ws.is_empty() && outer_walk[c].is_none() {
            return Err(EmbeddingError::BadContainment(format!(
                "component of {} needs an outer walk",
                comps[c][0]
            )));
        }
    }
    for c in 0..comps.len() {
        if let Some(w) = host[c] {
            if outer_walk[comp_of[&walks[w][0]]] == Some(w) {
                return Err(EmbeddingError::BadContainment("host face is the host's outer face".into()));
            }
        }
        // Walk up the nesting chain; a repeat means cyclic nesting.
        let mut seen = BTreeSet::new();
        let mut cur = c;
        while let Some(w) = host[cur] {
            if !seen.insert(cur) {
                return Err(EmbeddingError::BadContainment("cyclic nesting".into()));
            }
            cur = comp_of[&walks[w][0]];
        }
    }
    let isolated: Vec<bool> = comps.iter().map(|c| c.len() == 1).collect();
    Ok(assemble(rotations.clone(), &comps, &walks, &comp_walks, &outer_walk, &host, &isolated))
}

fn assemble(
    rotations: BTreeMap<Vertex, Vec<Vertex>>,
    comps: &[Vec<Vertex>],
    walks: &[Vec<Vertex>],
    comp_walks: &[Vec<usize>],
    outer_walk: &[Option<usize>],
    host: &[Option<usize>],
    isolated: &[bool],
) -> Embedding {
    let mut face_of_walk: HashMap<usize, usize> = HashMap::new();
    let mut faces = vec![Face { walks: Vec::new(), isolated: Vec::new() }];
    for (c, ws) in comp_walks.iter().enumerate() {
        for &w in ws {
            if Some(w) != outer_walk[c] {
                face_of_walk.insert(w, faces.len());
                faces.push(Face { walks: vec![walks[w].clone()], isolated: Vec::new() });
            }
        }
    }
    for c in 0..comps.len() {
        let f = host[c].map_or(0, |w| face_of_walk[&w]);
        if isolated[c] {
            faces[f].isolated.push(comps[c][0]);
        } else {
            faces[f].walks.push(walks[outer_walk[c].expect("outer walk chosen")].clone());
        }
    }
    Embedding::from_parts(rotations, faces, 0).0
}

fn check_rotation(rot: &BTreeMap<Vertex, Vec<Vertex>>) -> Result<(), EmbeddingError> {
    for (v, r) in rot {
        let mut s = r.clone();
        s.sort_unstable();
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Err(EmbeddingError::BadRotation(format!("repeated neighbor at {v}")));
        }
        for u in r {
            if u == v {
                return Err(EmbeddingError::BadRotation(format!("self-loop at {v}")));
            }
            if !rot.get(u).is_some_and(|ru| ru.contains(v)) {
                return Err(EmbeddingError::BadRotation(format!("edge {v}-{u} not symmetric")));
            }
        }
    }
    Ok(())
}

fn components(rot: &BTreeMap<Vertex, Vec<Vertex>>) -> Vec<Vec<Vertex>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &s in rot.keys() {
        if !seen.insert(s) {
            continue;
        }
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            for &u in &rot[&comp[i]] {
                if seen.insert(u) {
                    comp.push(u);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

fn next_dart(rot: &BTreeMap<Vertex, Vec<Vertex>>, (u, v): Dart) -> Dart {
    let r = &rot[&v];
    let p = r.iter().position(|&x| x == u).expect("symmetric rotation");
    (v, r[(p + r.len() - 1) % r.len()])
}

fn trace_from(rot: &BTreeMap<Vertex, Vec<Vertex>>, seeds: impl IntoIterator<Item = Dart>) -> Vec<Vec<Vertex>> {
    let mut used: BTreeSet<Dart> = BTreeSet::new();
    let mut out = Vec::new();
    for d in seeds {
        if used.contains(&d) {
            continue;
        }
        let mut w = Vec::new();
        let mut cur = d;
        loop {
            used.insert(cur);
            w.push(cur.0);
            cur = next_dart(rot, cur);
            if cur == d {
                break;
            }
        }
        out.push(min_rotation(&w));
    }
    out
}

fn trace_all(rot: &BTreeMap<Vertex, Vec<Vertex>>) -> Vec<Vec<Vertex>> {
    let darts: Vec<Dart> = rot.iter().flat_map(|(v, r)| r.iter().map(move |&u| (*v, u))).collect();
    trace_from(rot, darts)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }
    /// Returns false if already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        self.0[a] = b;
        true
    }
}

// ---------------------------------------------------------------------------
// Enumeration

/// Rotation systems of one connected component, built by inserting vertices
/// in BFS order and each new edge into every face that holds both endpoints.
struct ComponentSearch {
    verts: Vec<Vertex>,
    /// Edge insertion order as local index pairs `(new, old)`.
    order: Vec<(usize, usize)>,
}

impl ComponentSearch {
    fn new(comp: &[Vertex], adj: &BTreeMap<Vertex, Vec<Vertex>>) -> Self {
        let mut verts = vec![comp[0]];
        let mut idx: HashMap<Vertex, usize> = HashMap::from([(comp[0], 0)]);
        let mut i = 0;
        while i < verts.len() {
            for &u in &adj[&verts[i]] {
                if let std::collections::hash_map::Entry::Vacant(e) = idx.entry(u) {
                    e.insert(verts.len());
                    verts.push(u);
                }
            }
            i += 1;
        }
        let mut order = Vec::new();
        for (x, &v) in verts.iter().enumerate().skip(1) {
            let mut earlier: Vec<usize> = adj[&v].iter().map(|u| idx[u]).filter(|&u| u < x).collect();
            earlier.sort_unstable();
            order.extend(earlier.into_iter().map(|u| (x, u)));
        }
        ComponentSearch { verts, order }
    }

    /// Visits every planar rotation system; the visitor returns false to stop.
    fn run(&self, visit: &mut dyn FnMut(&[Vec<usize>]) -> bool) {
        let mut rot = vec![Vec::new(); self.verts.len()];
        self.step(0, &mut rot, visit);
    }

    fn step(&self, at: usize, rot: &mut Vec<Vec<usize>>, visit: &mut dyn FnMut(&[Vec<usize>]) -> bool) -> bool {
        let Some(&(x, s)) = self.order.get(at) else {
            return visit(rot);
        };
        if rot[x].is_empty() {
            rot[x].push(s);
            let d = rot[s].len();
            for p in 0..d.max(1) {
                rot[s].insert(p, x);
                let go = self.step(at + 1, rot, visit);
                rot[s].remove(p);
                if !go {
                    rot[x].clear();
                    return false;
                }
            }
            rot[x].clear();
            return true;
        }
        for w in local_walks(rot) {
            let corners = |z: usize| -> Vec<usize> {
                // Corner at z after incoming dart (a -> z): insert right after the
                // walk successor b, i.e. before a.
                (0..w.len())
                    .filter(|&i| w[i] == z)
                    .map(|i| {
                        let a = w[(i + w.len() - 1) % w.len()];
                        rot[z].iter().position(|&y| y == a).expect("neighbor")
                    })
                    .collect()
            };
            let cx = corners(x);
            let cs = corners(s);
            for &px in &cx {
                for &ps in &cs {
                    rot[x].insert(px, s);
                    rot[s].insert(ps, x);
                    let go = self.step(at + 1, rot, visit);
                    rot[s].remove(ps);
                    rot[x].remove(px);
                    if !go {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn local_walks(rot: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut out = Vec::new();
    for v in 0..rot.len() {
        for &u in &rot[v] {
            if used.contains(&(v, u)) {
                continue;
            }
            let mut w = Vec::new();
            let mut cur = (v, u);
            loop {
                used.insert(cur);
                w.push(cur.0);
                let r = &rot[cur.1];
                let p = r.iter().position(|&x| x == cur.0).expect("symmetric");
                cur = (cur.1, r[(p + r.len() - 1) % r.len()]);
                if cur == (v, u) {
                    break;
                }
            }
            out.push(w);
        }
    }
    out
}

fn adjacency(vertices: &[Vertex], edges: &[(Vertex, Vertex)]) -> BTreeMap<Vertex, Vec<Vertex>> {
    let mut adj: BTreeMap<Vertex, Vec<Vertex>> = vertices.iter().map(|&v| (v, Vec::new())).collect();
    for &(a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    for r in adj.values_mut() {
        r.sort_unstable();
        r.dedup();
    }
    adj
}

/// Some planar rotation system of the graph, if one exists.
pub fn find_planar_rotation(vertices: &[Vertex], edges: &[(Vertex, Vertex)]) -> Option<BTreeMap<Vertex, Vec<Vertex>>> {
    let adj = adjacency(vertices, edges);
    let mut out = BTreeMap::new();
    for comp in components(&adj) {
        let e: usize = comp.iter().map(|v| adj[v].len()).sum::<usize>() / 2;
        if comp.len() >= 3 && e > 3 * comp.len() - 6 {
            return None;
        }
        let cs = ComponentSearch::new(&comp, &adj);
        let mut found = None;
        cs.run(&mut |rot| {
            found = Some(rot.to_vec());
            false
        });
        let rot = found?;
        for (i, r) in rot.iter().enumerate() {
            out.insert(cs.verts[i], r.iter().map(|&j| cs.verts[j]).collect());
        }
    }
    Some(out)
}

/// All planar rotation systems of a connected component, with their walks.
fn component_rotations(comp: &[Vertex], adj: &BTreeMap<Vertex, Vec<Vertex>>) -> Vec<BTreeMap<Vertex, Vec<Vertex>>> {
    if comp.len() == 1 {
        return vec![BTreeMap::from([(comp[0], Vec::new())])];
    }
    let cs = ComponentSearch::new(comp, adj);
    let mut out = BTreeSet::new();
    cs.run(&mut |rot| {
        let m: BTreeMap<Vertex, Vec<Vertex>> = rot
            .iter()
            .enumerate()
            .map(|(i, r)| (cs.verts[i], rotate_to_min(&r.iter().map(|&j| cs.verts[j]).collect::<Vec<_>>())))
            .collect();
        out.insert(m);
        true
    });
    out.into_iter().collect()
}

pub fn enumerate_plane_embeddings(vertices: &[Vertex], edges: &[(Vertex, Vertex)]) -> Result<Vec<Embedding>, EmbeddingError> {
    enumerate_with_bound(vertices, edges, DEFAULT_VERTEX_BOUND)
}

/// Every labeled plane embedding exactly once, sorted by canonical key.
pub fn enumerate_with_bound(
    vertices: &[Vertex],
    edges: &[(Vertex, Vertex)],
    bound: usize,
) -> Result<Vec<Embedding>, EmbeddingError> {
    let adj = adjacency(vertices, edges);
    if adj.len() > bound {
        return Err(EmbeddingError::BoundExceeded { got: adj.len(), bound });
    }
    if adj.is_empty() {
        return Ok(vec![Embedding::empty()]);
    }
    let comps = components(&adj);
    // Per component: list of (rotation, walks) options.
    let mut options: Vec<Vec<ComponentOption>> = Vec::new();
    for c in &comps {
        let rots = component_rotations(c, &adj);
        if rots.is_empty() {
            return Err(EmbeddingError::NonPlanar);
        }
        options.push(rots.into_iter().map(|r| {
            let w = trace_all(&r);
            (r, w)
        }).collect());
    }
    let mut out = Vec::new();
    let mut choice = vec![0usize; comps.len()];
    loop {
        let mut rotations = BTreeMap::new();
        let mut walks = Vec::new();
        let mut comp_walks = Vec::new();
        for (c, &ch) in choice.iter().enumerate() {
            let (r, w) = &options[c][ch];
            rotations.extend(r.iter().map(|(k, v)| (*k, v.clone())));
            comp_walks.push((walks.len()..walks.len() + w.len()).collect::<Vec<_>>());
            walks.extend(w.iter().cloned());
        }
        place_components(&rotations, &comps, &walks, &comp_walks, &mut out);
        // Odometer over per-component rotation choices.
        let mut i = 0;
        while i < choice.len() {
            choice[i] += 1;
            if choice[i] < options[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == choice.len() {
            break;
        }
    }
    let mut keyed: Vec<(CanonicalKey, Embedding)> = out.into_iter().map(|e| (e.key(), e)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    Ok(keyed.into_iter().map(|(_, e)| e).collect())
}

/// Enumerates outer-walk choices and acyclic host assignments.
fn place_components(
    rotations: &BTreeMap<Vertex, Vec<Vertex>>,
    comps: &[Vec<Vertex>],
    walks: &[Vec<Vertex>],
    comp_walks: &[Vec<usize>],
    out: &mut Vec<Embedding>,
) {
    let nc = comps.len();
    let isolated: Vec<bool> = comps.iter().map(|c| c.len() == 1).collect();
    let outer_opts: Vec<Vec<Option<usize>>> = comp_walks
        .iter()
        .map(|ws| if ws.is_empty() { vec![None] } else { ws.iter().map(|&w| Some(w)).collect() })
        .collect();
    let mut outer = vec![None; nc];
    let mut host = vec![None; nc];
    let walk_comp: HashMap<usize, usize> =
        comp_walks.iter().enumerate().flat_map(|(c, ws)| ws.iter().map(move |&w| (w, c))).collect();

    fn rec_outer(
        c: usize,
        ctx: &mut PlaceCtx,
        outer: &mut Vec<Option<usize>>,
        host: &mut Vec<Option<usize>>,
    ) {
        if c == ctx.nc {
            rec_host(0, ctx, outer, host);
            return;
        }
        for o in ctx.outer_opts[c].clone() {
            outer[c] = o;
            rec_outer(c + 1, ctx, outer, host);
        }
    }

    fn rec_host(c: usize, ctx: &mut PlaceCtx, outer: &[Option<usize>], host: &mut Vec<Option<usize>>) {
        if c == ctx.nc {
            // Reject cyclic nesting.
            for s in 0..ctx.nc {
                let mut cur = s;
                let mut steps = 0;
                while let Some(w) = host[cur] {
                    cur = ctx.walk_comp[&w];
                    steps += 1;
                    if steps > ctx.nc {
                        return;
                    }
                }
            }
            let e = assemble(
                ctx.rotations.clone(),
                ctx.comps,
                ctx.walks,
                ctx.comp_walks,
                outer,
                host,
                &ctx.isolated,
            );
            ctx.out.push(e);
            return;
        }
        host[c] = None;
        rec_host(c + 1, ctx, outer, host);
        for d in 0..ctx.nc {
            if d == c {
                continue;
            }
            for &w in &ctx.comp_walks[d] {
                if Some(w) != outer[d] {
                    host[c] = Some(w);
                    rec_host(c + 1, ctx, outer, host);
                }
            }
        }
        host[c] = None;
    }

    struct PlaceCtx<'a> {
        nc: usize,
        rotations: &'a BTreeMap<Vertex, Vec<Vertex>>,
        comps: &'a [Vec<Vertex>],
        walks: &'a [Vec<Vertex>],
        comp_walks: &'a [Vec<usize>],
        outer_opts: Vec<Vec<Option<usize>>>,
        walk_comp: HashMap<usize, usize>,
        isolated: Vec<bool>,
        out: &'a mut Vec<Embedding>,
    }

    let mut ctx = PlaceCtx {
        nc,
        rotations,
        comps,
        walks,
        comp_walks,
        outer_opts,
        walk_comp,
        isolated,
        out,
    };
    rec_outer(0, &mut ctx, &mut outer, &mut host);
}
