//! Graph stories, window extraction and planarity prechecks.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding;

/// Vertex id. Ids are 1-based arrival positions.
pub type Vertex = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StoryError {
    #[error("malformed story document: {0}")]
    Malformed(String),
    #[error("vertex index {index} out of range 1..={n}")]
    IndexOutOfRange { index: i64, n: u32 },
    #[error("omega {omega} not in [1, {n}]")]
    BadOmega { omega: i64, n: u32 },
    #[error("k must be non-negative, got {0}")]
    NegativeK(i64),
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("labels list has {got} entries, expected {n}")]
    BadLabels { got: usize, n: u32 },
    #[error("window index {i} out of range 1..={n}")]
    WindowOutOfRange { i: u32, n: u32 },
}

/// A graph story `(G, omega, k, tau)` with tau the identity on ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GraphStory {
    n: u32,
    omega: u32,
    k: u32,
    edges: Vec<(Vertex, Vertex)>,
    labels: Option<Vec<String>>,
}

/// Story file format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoryDoc {
    pub n: i64,
    pub omega: i64,
    pub k: i64,
    #[serde(default)]
    pub edges: Vec<[i64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// Result of parsing: the normalized story plus the number of invisible edges dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed {
    pub story: GraphStory,
    pub removed_invisible: usize,
    pub duplicate_edges: usize,
}

impl GraphStory {
    /// Builds a story, validating ranges. Duplicate edges are merged; invisible
    /// edges are kept (use [`visible_filter`] to drop them).
    pub fn new(
        n: u32,
        omega: u32,
        k: u32,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> Result<Self, StoryError> {
        if n == 0 {
            return Err(StoryError::Malformed("n must be positive".into()));
        }
        if omega == 0 || omega > n {
            return Err(StoryError::BadOmega { omega: omega as i64, n });
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            for x in [a, b] {
                if x == 0 || x > n {
                    return Err(StoryError::IndexOutOfRange { index: x as i64, n });
                }
            }
            if a == b {
                return Err(StoryError::SelfLoop(a));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(GraphStory { n, omega, k, edges: set.into_iter().collect(), labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, StoryError> {
        if labels.len() != self.n as usize {
            return Err(StoryError::BadLabels { got: labels.len(), n: self.n });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_k(&self, k: u32) -> Self {
        let mut s = self.clone();
        s.k = k;
        s
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn omega(&self) -> u32 {
        self.omega
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    /// Number of points `omega + k`.
    pub fn sigma(&self) -> u32 {
        self.omega + self.k
    }
    pub fn minimal(&self) -> bool {
        self.k == 0
    }
    /// Sorted list of edges `(a, b)` with `a < b`.
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }
    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }
    pub fn label(&self, v: Vertex) -> String {
        match &self.labels {
            Some(l) => l[(v - 1) as usize].clone(),
            None => v.to_string(),
        }
    }
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        1..=self.n
    }
    pub fn is_visible(&self, a: Vertex, b: Vertex) -> bool {
        a.abs_diff(b) < self.omega
    }
    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }
    pub fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect();
        out.sort_unstable();
        out
    }

    /// Lowest vertex of window `i`.
    pub fn window_lo(&self, i: u32) -> u32 {
        (i + 1).saturating_sub(self.omega).max(1)
    }

    pub fn to_doc(&self) -> StoryDoc {
        StoryDoc {
            n: self.n as i64,
            omega: self.omega as i64,
            k: self.k as i64,
            edges: self.edges.iter().map(|&(a, b)| [a as i64, b as i64]).collect(),
            labels: self.labels.clone(),
        }
    }

    /// Serializes to the story document format.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("story serializes")
    }
}

/// Parses a story document, dropping invisible edges.
pub fn parse_story(text: &str) -> Result<Parsed, StoryError> {
    let doc: StoryDoc =
        serde_json::from_str(text).map_err(|e| StoryError::Malformed(e.to_string()))?;
    from_doc(doc)
}

/// Validates a story document, dropping invisible edges.
pub fn from_doc(doc: StoryDoc) -> Result<Parsed, StoryError> {
    if doc.n <= 0 || doc.n > u32::MAX as i64 / 2 {
        return Err(StoryError::Malformed(format!("n must be positive, got {}", doc.n)));
    }
    let n = doc.n as u32;
    if doc.k < 0 {
        return Err(StoryError::NegativeK(doc.k));
    }
    if doc.k > u32::MAX as i64 / 2 {
        return Err(StoryError::Malformed(format!("k too large: {}", doc.k)));
    }
    if doc.omega < 1 || doc.omega > doc.n {
        return Err(StoryError::BadOmega { omega: doc.omega, n });
    }
    let mut edges = Vec::with_capacity(doc.edges.len());
    for [a, b] in &doc.edges {
        for &x in [a, b] {
            if x < 1 || x > doc.n {
                return Err(StoryError::IndexOutOfRange { index: x, n });
            }
        }
        edges.push((*a as u32, *b as u32));
    }
    let raw = edges.len();
    let story = GraphStory::new(n, doc.omega as u32, doc.k as u32, edges)?;
    let duplicate_edges = raw - story.edges.len();
    let story = match doc.labels {
        Some(l) => story.with_labels(l)?,
        None => story,
    };
    let (story, removed_invisible) = visible_filter(&story);
    Ok(Parsed { story, removed_invisible, duplicate_edges })
}

/// Drops edges whose endpoints never share a window.
pub fn visible_filter(story: &GraphStory) -> (GraphStory, usize) {
    let mut out = story.clone();
    out.edges.retain(|&(a, b)| story.is_visible(a, b));
    let removed = story.edges.len() - out.edges.len();
    (out, removed)
}

/// The induced window graph `G_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowGraph {
    pub index: u32,
    pub lo: u32,
    pub hi: u32,
    pub edges: Vec<(Vertex, Vertex)>,
}

impl WindowGraph {
    pub fn vertices(&self) -> Vec<Vertex> {
        (self.lo..=self.hi).collect()
    }
    pub fn contains(&self, v: Vertex) -> bool {
        (self.lo..=self.hi).contains(&v)
    }
}

pub fn window_graph(story: &GraphStory, i: u32) -> Result<WindowGraph, StoryError> {
    if i == 0 || i > story.n {
        return Err(StoryError::WindowOutOfRange { i, n: story.n });
    }
    let lo = story.window_lo(i);
    let edges = story
        .edges
        .iter()
        .copied()
        .filter(|&(a, b)| a >= lo && b <= i)
        .collect();
    Ok(WindowGraph { index: i, lo, hi: i, edges })
}

/// Planarity of a simple graph given by vertex and edge lists.
pub fn is_planar(vertices: &[Vertex], edges: &[(Vertex, Vertex)]) -> bool {
    embedding::find_planar_rotation(vertices, edges).is_some()
}

/// Smallest window index whose graph is non-planar, if any.
pub fn all_windows_planar(story: &GraphStory) -> Option<u32> {
    if story.omega <= 4 {
        return None;
    }
    // Windows before omega are subgraphs of G_omega, but the first failing index
    // may still be smaller, so every index is checked in order.
    (1..=story.n).find(|&i| {
        let w = window_graph(story, i).expect("index in range");
        !is_planar(&w.vertices(), &w.edges)
    })
}

/// Index of a window that induces K5, if any (visible edges assumed).
pub fn k5_window(story: &GraphStory) -> Option<u32> {
    if story.omega < 5 {
        return None;
    }
    (5..=story.n).find(|&i| {
        let w = window_graph(story, i).expect("index in range");
        let vs = w.vertices();
        let found = combinations5(&vs)
            .any(|c| (0..5).all(|x| (x + 1..5).all(|y| story.has_edge(c[x], c[y]))));
        found
    })
}

fn combinations5(vs: &[Vertex]) -> impl Iterator<Item = [Vertex; 5]> + '_ {
    let n = vs.len();
    let last = *vs.last().unwrap_or(&0);
    // Only subsets containing the newest vertex; older subsets were seen earlier.
    (0..n)
        .flat_map(move |a| (a + 1..n).map(move |b| (a, b)))
        .flat_map(move |(a, b)| (b + 1..n).map(move |c| (a, b, c)))
        .flat_map(move |(a, b, c)| (c + 1..n).map(move |d| (a, b, c, d)))
        .filter(move |&(_, _, _, d)| vs[d] != last)
        .map(move |(a, b, c, d)| [vs[a], vs[b], vs[c], vs[d], last])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: u32, omega: u32) -> GraphStory {
        let e = (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b)));
        GraphStory::new(n, omega, 0, e).unwrap()
    }

    #[test]
    fn parse_trivial() {
        let p = parse_story(r#"{"n":1,"omega":1,"k":0,"edges":[]}"#).unwrap();
        assert_eq!(p.story.n(), 1);
        assert!(p.story.edges().is_empty());
    }

    #[test]
    fn parse_drops_invisible_edge() {
        let p = parse_story(r#"{"n":8,"omega":5,"k":0,"edges":[[1,7],[1,2]]}"#).unwrap();
        assert_eq!(p.removed_invisible, 1);
        assert_eq!(p.story.edges(), &[(1, 2)]);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_story("{"), Err(StoryError::Malformed(_))));
        assert!(matches!(
            parse_story(r#"{"n":3,"omega":4,"k":0,"edges":[]}"#),
            Err(StoryError::BadOmega { .. })
        ));
        assert!(matches!(
            parse_story(r#"{"n":3,"omega":2,"k":-1,"edges":[]}"#),
            Err(StoryError::NegativeK(-1))
        ));
        assert!(matches!(
            parse_story(r#"{"n":3,"omega":2,"k":0,"edges":[[1,4]]}"#),
            Err(StoryError::IndexOutOfRange { index: 4, .. })
        ));
        assert!(matches!(
            parse_story(r#"{"n":3,"omega":2,"k":0,"edges":[[2,2]]}"#),
            Err(StoryError::SelfLoop(2))
        ));
    }

    #[test]
    fn labels_round_trip() {
        let s = parse_story(r#"{"n":2,"omega":2,"k":1,"edges":[[1,2]],"labels":["a","b"]}"#)
            .unwrap()
            .story;
        assert_eq!(s.label(2), "b");
        let again = parse_story(&s.to_json()).unwrap().story;
        assert_eq!(again, s);
    }

    #[test]
    fn visible_filter_examples() {
        assert_eq!(visible_filter(&complete(5, 5)).1, 0);
        let (s, r) = visible_filter(&complete(5, 4));
        assert_eq!(r, 1);
        assert!(!s.has_edge(1, 5));
        let path = GraphStory::new(10, 2, 0, (1..10).map(|i| (i, i + 1))).unwrap();
        assert_eq!(visible_filter(&path).1, 0);
    }

    #[test]
    fn windows() {
        let s = complete(8, 5);
        let w = window_graph(&s, 8).unwrap();
        assert_eq!(w.vertices(), vec![4, 5, 6, 7, 8]);
        assert_eq!(window_graph(&s, 3).unwrap().vertices(), vec![1, 2, 3]);
        assert_eq!(window_graph(&s, 5).unwrap().vertices(), vec![1, 2, 3, 4, 5]);
        assert!(window_graph(&s, 9).is_err());
        assert!(window_graph(&s, 0).is_err());
    }

    #[test]
    fn planarity_examples() {
        let k4: Vec<_> = (1..=4).flat_map(|a| (a + 1..=4).map(move |b| (a, b))).collect();
        assert!(is_planar(&[1, 2, 3, 4], &k4));
        let k5: Vec<_> = (1..=5).flat_map(|a| (a + 1..=5).map(move |b| (a, b))).collect();
        assert!(!is_planar(&[1, 2, 3, 4, 5], &k5));
        let k33: Vec<_> = (1..=3).flat_map(|a| (4..=6).map(move |b| (a, b))).collect();
        assert!(!is_planar(&[1, 2, 3, 4, 5, 6], &k33));
    }

    #[test]
    fn window_checks() {
        assert_eq!(all_windows_planar(&complete(5, 5)), Some(5));
        assert_eq!(all_windows_planar(&complete(9, 4)), None);
        assert_eq!(k5_window(&complete(5, 5)), Some(5));
        let path = GraphStory::new(10, 5, 0, (1..10).map(|i| (i, i + 1))).unwrap();
        assert_eq!(k5_window(&path), None);
    }
}
