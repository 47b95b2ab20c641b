//! Constructors for the instance families and random fixtures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::story::{visible_filter, GraphStory, StoryError, Vertex};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("fixture line {line}: {msg}")]
    Fixture { line: usize, msg: String },
    #[error("invalid sunflower instance: {0}")]
    Sunflower(String),
    #[error(transparent)]
    Story(#[from] StoryError),
}

const SP_UNREALIZABLE: &str = include_str!("../data/sp_unrealizable.txt");
const FLAGS8: &str = include_str!("../data/flags8.txt");
const NO_SUPPORTING: &str = include_str!("../data/no_supporting.txt");
const CUBIC_GOOD: &str = include_str!("../data/cubic_good.txt");

/// Parses the line-based fixture format: `n N`, `omega W`, optional `k K`,
/// then one `a b` edge per line; `#` starts a comment.
pub fn parse_fixture(text: &str) -> Result<GraphStory, GenError> {
    let (mut n, mut omega, mut k) = (None, None, 0u32);
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| GenError::Fixture { line: idx + 1, msg: msg.to_string() };
        let parts: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| s.parse::<u32>().map_err(|_| err(&format!("bad number {s:?}")));
        match parts.as_slice() {
            ["n", x] => n = Some(num(x)?),
            ["omega", x] => omega = Some(num(x)?),
            ["k", x] => k = num(x)?,
            [a, b] => edges.push((num(a)?, num(b)?)),
            _ => return Err(err("expected `n`, `omega`, `k` or an edge")),
        }
    }
    let n = n.ok_or(GenError::Fixture { line: 0, msg: "missing n".into() })?;
    let omega = omega.ok_or(GenError::Fixture { line: 0, msg: "missing omega".into() })?;
    Ok(GraphStory::new(n, omega, k, edges)?)
}

fn fixture(text: &str) -> GraphStory {
    parse_fixture(text).expect("bundled fixture parses")
}

/// Path `1-2-...-n`.
pub fn gen_path_story(n: u32, omega: u32) -> Result<GraphStory, GenError> {
    Ok(GraphStory::new(n, omega, 0, (1..n).map(|i| (i, i + 1)))?)
}

/// Cycle `1-2-...-n-1`; the closing edge is dropped when it is not visible.
/// Returns the story and the number of dropped edges.
pub fn gen_cycle_story(n: u32, omega: u32) -> Result<(GraphStory, usize), GenError> {
    let mut edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
    if n >= 3 {
        edges.push((1, n));
    }
    Ok(visible_filter(&GraphStory::new(n, omega, 0, edges)?))
}

/// Random story with each visible pair joined independently with probability `p`.
pub fn gen_random_story(n: u32, omega: u32, p: f64, seed: u64) -> Result<GraphStory, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 1..=n {
        for b in a + 1..(a + omega).min(n + 1) {
            if rng.gen_bool(p.clamp(0.0, 1.0)) {
                edges.push((a, b));
            }
        }
    }
    Ok(GraphStory::new(n, omega, 0, edges)?)
}

/// Tower of `h` triangles, consecutive levels joined by `v_i - v_{i+3}`.
/// The window is 9, capped at `n` for `h = 2`.
pub fn gen_nested_triangles(h: u32) -> Result<GraphStory, GenError> {
    let n = 3 * h;
    let mut edges = Vec::new();
    for t in 0..h {
        let (a, b, c) = (3 * t + 1, 3 * t + 2, 3 * t + 3);
        edges.extend([(a, b), (b, c), (a, c)]);
    }
    for i in 1..=n.saturating_sub(3) {
        edges.push((i, i + 3));
    }
    Ok(GraphStory::new(n, 9.min(n), 0, edges)?)
}

/// Two-terminal series-parallel story that no minimal realization exists for,
/// padded with `omega - 5` isolated vertices after the first five arrivals.
pub fn gen_sp_unrealizable(omega: u32) -> Result<GraphStory, GenError> {
    let base = fixture(SP_UNREALIZABLE);
    if omega <= 5 {
        return Ok(base);
    }
    let pad = omega - 5;
    let shift = |v: Vertex| if v <= 5 { v } else { v + pad };
    let edges = base.edges().iter().map(|&(a, b)| (shift(a), shift(b)));
    Ok(GraphStory::new(base.n() + pad, omega, 0, edges)?)
}

/// Flags between two terminals plus a long path between them.
///
/// Even `omega`: tips `1..omega/2-1`, middles `omega/2..omega-2`, terminals
/// `omega-1`, `omega`, path interior after that. Odd `omega` has one middle
/// fewer and hangs tips 1 and 2 on the same middle.
pub fn gen_flags(omega: u32) -> Result<GraphStory, GenError> {
    if omega == 8 {
        return Ok(fixture(FLAGS8));
    }
    Ok(flags_construction(omega)?)
}

pub(crate) fn flags_construction(omega: u32) -> Result<GraphStory, StoryError> {
    let (s, t) = (omega - 1, omega);
    let tips: Vec<Vertex>;
    let middles: Vec<Vertex>;
    let path_len;
    if omega.is_multiple_of(2) {
        tips = (1..omega / 2).collect();
        middles = (omega / 2..=omega - 2).collect();
        path_len = omega / 2;
    } else {
        tips = (1..omega.div_ceil(2)).collect();
        middles = (omega.div_ceil(2)..=omega - 2).collect();
        path_len = omega.div_ceil(2);
    }
    let mut edges = Vec::new();
    for &m in &middles {
        edges.extend([(s, m), (m, t)]);
    }
    for (idx, &tip) in tips.iter().enumerate() {
        let m = if omega.is_multiple_of(2) { middles[idx] } else { middles[idx.saturating_sub(1)] };
        edges.extend([(m, tip), (tip, t)]);
    }
    let interior: Vec<Vertex> = (omega + 1..omega + path_len).collect();
    let mut prev = s;
    for &v in &interior {
        edges.push((prev, v));
        prev = v;
    }
    edges.push((prev, t));
    GraphStory::new(omega + path_len - 1, omega, 0, edges)
}

/// Ten-vertex triconnected story that is realizable without a supporting embedding.
pub fn no_supporting_fixture() -> GraphStory {
    fixture(NO_SUPPORTING)
}

/// Triconnected cubic window-5 story with both good and non-good embeddings.
pub fn cubic_fixture() -> GraphStory {
    fixture(CUBIC_GOOD)
}

/// Three graphs on shared vertices `1..=n`: common edges plus one private list each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SunflowerInstance {
    pub n: u32,
    pub common: Vec<[Vertex; 2]>,
    pub private: [Vec<[Vertex; 2]>; 3],
}

impl SunflowerInstance {
    pub fn from_json(text: &str) -> Result<Self, GenError> {
        let inst: SunflowerInstance =
            serde_json::from_str(text).map_err(|e| GenError::Sunflower(e.to_string()))?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let mut seen = std::collections::BTreeSet::new();
        let lists = std::iter::once(&self.common).chain(self.private.iter());
        for list in lists {
            for &[a, b] in list {
                if a == 0 || b == 0 || a > self.n || b > self.n || a == b {
                    return Err(GenError::Sunflower(format!("bad edge ({a}, {b})")));
                }
                if !seen.insert((a.min(b), a.max(b))) {
                    return Err(GenError::Sunflower(format!("edge ({a}, {b}) listed twice")));
                }
            }
        }
        Ok(())
    }

    /// Random instance with each pair assigned to the common set or one private set.
    pub fn random(n: u32, p: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut inst = SunflowerInstance { n, common: Vec::new(), private: Default::default() };
        for a in 1..=n {
            for b in a + 1..=n {
                if rng.gen_bool(p) {
                    match rng.gen_range(0..4) {
                        0 => inst.common.push([a, b]),
                        j => inst.private[j - 1].push([a, b]),
                    }
                }
            }
        }
        inst
    }
}

/// Output of the sunflower reduction with the vertex groups exposed.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub story: GraphStory,
    pub omega_tilde: u32,
    /// Arrival groups in order, each with its name.
    pub groups: Vec<(&'static str, Vec<Vertex>)>,
    /// Shared vertex `v` of the instance maps to `shared[v - 1]`.
    pub shared: Vec<Vertex>,
    /// Per private set: original edge and its two subdivision vertices.
    pub subdivisions: [Vec<([Vertex; 2], Vertex, Vertex)>; 3],
    /// Whether the private sets had to be reordered by size.
    pub reordered: bool,
}

pub const REDUCTION_ORDER: [&str; 11] =
    ["D1A", "Delta1", "D2A", "Delta2", "D3A", "V'", "D1B", "Delta3", "D2B", "Delta4", "D3B"];

/// Builds the story whose realizability matches the sunflower instance.
pub fn gen_sunflower_reduction(inst: &SunflowerInstance, k: u32) -> Result<Reduction, GenError> {
    inst.validate()?;
    let mut private = inst.private.clone();
    let before: Vec<usize> = private.iter().map(Vec::len).collect();
    private.sort_by_key(|l| std::cmp::Reverse(l.len()));
    let reordered = private.iter().map(Vec::len).collect::<Vec<_>>() != before;
    let wt = private[0].len() as u32;
    let nv = inst.n;
    // Groups are laid out consecutively in arrival order.
    let mut starts = [0u32; 11];
    let sizes: [u32; 11] = [wt, wt, wt, wt, wt, nv, wt, wt, wt, wt, wt];
    let mut next = 1;
    for g in 0..11 {
        starts[g] = next;
        next += sizes[g];
    }
    let group = |name: &str| REDUCTION_ORDER.iter().position(|&x| x == name).unwrap();
    let shared: Vec<Vertex> = (0..nv).map(|j| starts[group("V'")] + j).collect();
    let mut edges: Vec<(Vertex, Vertex)> =
        inst.common.iter().map(|&[a, b]| (shared[a as usize - 1], shared[b as usize - 1])).collect();
    let mut subdivisions: [Vec<_>; 3] = Default::default();
    for (i, list) in private.iter().enumerate() {
        let da = starts[group(["D1A", "D2A", "D3A"][i])];
        let db = starts[group(["D1B", "D2B", "D3B"][i])];
        for (j, &[a, b]) in list.iter().enumerate() {
            let (u, y) = (a.min(b), a.max(b));
            let (x, z) = (da + j as u32, db + j as u32);
            edges.extend([(shared[u as usize - 1], x), (x, z), (z, shared[y as usize - 1])]);
            subdivisions[i].push(([u, y], x, z));
        }
    }
    let omega = nv + 6 * wt;
    let n = nv + 10 * wt;
    let groups = (0..11).map(|g| (REDUCTION_ORDER[g], (starts[g]..starts[g] + sizes[g]).collect())).collect();
    let story = GraphStory::new(n, omega, k, edges)?;
    Ok(Reduction { story, omega_tilde: wt, groups, shared, subdivisions, reordered })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_families() {
        assert_eq!(gen_path_story(10, 5).unwrap().edges().len(), 9);
        let (c, dropped) = gen_cycle_story(8, 5).unwrap();
        assert_eq!((c.edges().len(), dropped), (7, 1));
        let (c, dropped) = gen_cycle_story(5, 5).unwrap();
        assert_eq!((c.edges().len(), dropped), (5, 0));
        let a = gen_random_story(12, 5, 0.5, 7).unwrap();
        assert_eq!(a, gen_random_story(12, 5, 0.5, 7).unwrap());
        assert_eq!(visible_filter(&a).1, 0);
    }

    #[test]
    fn nested_triangles_counts() {
        let s = gen_nested_triangles(2).unwrap();
        assert_eq!((s.n(), s.omega(), s.edges().len()), (6, 6, 9));
        let s = gen_nested_triangles(4).unwrap();
        assert_eq!((s.n(), s.omega(), s.edges().len()), (12, 9, 21));
    }

    #[test]
    fn flags_fixture_matches_construction() {
        assert_eq!(gen_flags(8).unwrap(), flags_construction(8).unwrap());
        for omega in 8..=12u32 {
            let s = gen_flags(omega).unwrap();
            let (n, e) = if omega % 2 == 0 {
                (3 * omega / 2 - 1, 2 * omega - 4 + omega / 2)
            } else {
                ((3 * omega - 1) / 2, 2 * omega - 4 + omega.div_ceil(2))
            };
            assert_eq!((s.n(), s.edges().len()), (n, e as usize), "omega {omega}");
            assert_eq!(visible_filter(&s).1, 0);
        }
    }

    #[test]
    fn sp_padding() {
        let base = gen_sp_unrealizable(5).unwrap();
        assert_eq!(base.n(), 8);
        let s = gen_sp_unrealizable(6).unwrap();
        assert_eq!(s.n(), 9);
        assert!(s.neighbors(6).is_empty());
        assert_eq!(visible_filter(&s).1, 0);
    }

    #[test]
    fn sunflower_sizes() {
        let empty = SunflowerInstance { n: 4, common: vec![[1, 2]], private: Default::default() };
        let r = gen_sunflower_reduction(&empty, 0).unwrap();
        assert_eq!((r.story.n(), r.story.omega(), r.omega_tilde), (4, 4, 0));
        let inst = SunflowerInstance {
            n: 4,
            common: vec![[1, 2]],
            private: [vec![[1, 3], [2, 4]], vec![[3, 4]], vec![[1, 4]]],
        };
        let r = gen_sunflower_reduction(&inst, 2).unwrap();
        assert_eq!(r.omega_tilde, 2);
        assert_eq!((r.story.n(), r.story.omega()), (24, 16));
        assert_eq!(r.story.edges().len(), 1 + 3 * 4);
        assert_eq!(visible_filter(&r.story).1, 0);
        let dup = SunflowerInstance { n: 3, common: vec![[1, 2]], private: [vec![[2, 1]], vec![], vec![]] };
        assert!(gen_sunflower_reduction(&dup, 0).is_err());
    }
}
