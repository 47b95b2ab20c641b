//! Independent exact check of a frame sequence.

use std::collections::BTreeSet;

use num_traits::Signed;
use rayon::prelude::*;
use thiserror::Error;

use super::geom::{on_segment, orient, segments_intersect, Pt};
use super::Frame;
use crate::solver::Reroute;
use crate::story::{window_graph, GraphStory, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DrawingViolation {
    #[error("frame {frame}: {detail}")]
    Shape { frame: u32, detail: String },
    #[error("frame {frame} is not plane: {detail}")]
    R1 { frame: u32, detail: String },
    #[error("frames {} and {frame} disagree: {detail}", frame - 1)]
    R2 { frame: u32, detail: String },
}

struct Seg<'a> {
    edge: (Vertex, Vertex),
    idx: usize,
    last: bool,
    p: &'a Pt,
    q: &'a Pt,
    bb: [f64; 4],
}

/// Float box `[x0, x1, y0, y1]` widened past any conversion error, used only
/// to skip exact tests that cannot succeed.
fn fbox(p: &Pt, q: &Pt) -> [f64; 4] {
    let ((px, py), (qx, qy)) = (p.to_f64(), q.to_f64());
    let pad = |v: f64| 1e-9 * (1.0 + v.abs());
    let (x0, x1, y0, y1) = (px.min(qx), px.max(qx), py.min(qy), py.max(qy));
    [x0 - pad(x0), x1 + pad(x1), y0 - pad(y0), y1 + pad(y1)]
}

fn overlaps(a: &[f64; 4], b: &[f64; 4]) -> bool {
    a[0] <= b[1] && b[0] <= a[1] && a[2] <= b[3] && b[2] <= a[3]
}

/// Checks that `frames` are the windows `1..=n` of `story`, each drawn without
/// crossings, and that consecutive frames draw their common part identically
/// apart from the edges named in `reroutes` at their steps.
pub fn verify_drawings(story: &GraphStory, frames: &[Frame], reroutes: &[Reroute]) -> Result<(), DrawingViolation> {
    if frames.len() != story.n() as usize {
        let detail = format!("expected {} frames, got {}", story.n(), frames.len());
        return Err(DrawingViolation::Shape { frame: 0, detail });
    }
    let results: Vec<Result<(), DrawingViolation>> =
        frames.par_iter().enumerate().map(|(j, f)| check_frame(story, j as u32 + 1, f)).collect();
    results.into_iter().collect::<Result<(), _>>()?;
    for w in frames.windows(2) {
        check_pair(&w[0], &w[1], reroutes)?;
    }
    Ok(())
}

fn check_frame(story: &GraphStory, j: u32, f: &Frame) -> Result<(), DrawingViolation> {
    let shape = |detail: String| DrawingViolation::Shape { frame: j, detail };
    let r1 = |detail: String| DrawingViolation::R1 { frame: j, detail };
    if f.index != j {
        return Err(shape(format!("carries index {}", f.index)));
    }
    let w = window_graph(story, j).map_err(|e| shape(e.to_string()))?;
    if !f.vertices.keys().copied().eq(w.vertices()) {
        return Err(shape("vertex set differs from the window".into()));
    }
    if !f.edges.keys().copied().eq(w.edges.iter().copied()) {
        return Err(shape("edge set differs from the window".into()));
    }
    let mut points: BTreeSet<&Pt> = BTreeSet::new();
    for p in f.vertices.values().chain(f.free.iter().map(|(p, _)| p)) {
        if !points.insert(p) {
            return Err(r1("two points coincide".into()));
        }
    }
    let mut segs = Vec::new();
    for (&(a, b), line) in &f.edges {
        if line.len() < 2 || line[0] != f.vertices[&a] || line[line.len() - 1] != f.vertices[&b] {
            return Err(r1(format!("polyline of {a}-{b} does not join its endpoints")));
        }
        for i in 0..line.len() - 1 {
            let (p, q) = (&line[i], &line[i + 1]);
            segs.push(Seg { edge: (a, b), idx: i, last: i + 2 == line.len(), p, q, bb: fbox(p, q) });
        }
    }
    segs.sort_by(|a, b| a.bb[0].total_cmp(&b.bb[0]));
    for s in &segs {
        for z in points.iter().filter(|z| overlaps(&s.bb, &fbox(z, z))) {
            let own = (s.idx == 0 && *z == s.p) || (s.last && *z == s.q);
            if !own && on_segment(s.p, s.q, z) {
                return Err(r1(format!("edge {}-{} passes through a point", s.edge.0, s.edge.1)));
            }
        }
    }
    let bad = (0..segs.len()).into_par_iter().find_any(|&i| {
        segs[i + 1..]
            .iter()
            .take_while(|t| t.bb[0] <= segs[i].bb[1])
            .any(|t| overlaps(&segs[i].bb, &t.bb) && conflict(&segs[i], t, f))
    });
    if let Some(i) = bad {
        return Err(r1(format!("edge {}-{} crosses another polyline", segs[i].edge.0, segs[i].edge.1)));
    }
    Ok(())
}

fn endpoints<'a>(s: &Seg<'a>) -> [&'a Pt; 2] {
    [s.p, s.q]
}

/// Whether two segments meet anywhere other than an allowed shared endpoint.
fn conflict(s: &Seg, t: &Seg, f: &Frame) -> bool {
    if !segments_intersect(s.p, s.q, t.p, t.q) {
        return false;
    }
    let shared = endpoints(s).into_iter().find(|z| endpoints(t).contains(z));
    let Some(z) = shared else { return true };
    let allowed = if s.edge == t.edge {
        s.idx.abs_diff(t.idx) == 1
    } else {
        // Different edges may only meet at a common end vertex.
        let ends = |x: &Seg| [(x.idx == 0).then(|| &f.vertices[&x.edge.0]), x.last.then(|| &f.vertices[&x.edge.1])];
        ends(s).into_iter().flatten().any(|p| p == z) && ends(t).into_iter().flatten().any(|p| p == z)
    };
    if !allowed {
        return true;
    }
    let a = if s.p == z { s.q } else { s.p };
    let b = if t.p == z { t.q } else { t.p };
    orient(z, a, b).is_eq() && {
        let (da, db) = (a.sub(z), b.sub(z));
        (da.x * db.x + da.y * db.y).is_positive()
    }
}

fn check_pair(prev: &Frame, next: &Frame, reroutes: &[Reroute]) -> Result<(), DrawingViolation> {
    let r2 = |detail: String| DrawingViolation::R2 { frame: next.index, detail };
    for (v, p) in &next.vertices {
        if prev.vertices.get(v).is_some_and(|q| q != p) {
            return Err(r2(format!("vertex {v} moved")));
        }
    }
    let logged: Vec<(Vertex, Vertex)> = reroutes
        .iter()
        .filter(|r| r.step == next.index)
        .map(|r| (r.edge[0].min(r.edge[1]), r.edge[0].max(r.edge[1])))
        .collect();
    if logged.len() > 1 {
        return Err(r2("more than one reroute logged".into()));
    }
    for (e, line) in &next.edges {
        if prev.edges.get(e).is_some_and(|l| l != line) && !logged.contains(e) {
            return Err(r2(format!("edge {}-{} was redrawn", e.0, e.1)));
        }
    }
    Ok(())
}
