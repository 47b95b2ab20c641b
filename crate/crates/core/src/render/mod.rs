//! Geometric realizations of certificates on concrete point sets.
//!
//! Edges are drawn as polylines with exact rational coordinates. Every frame
//! is self-checked against its weighted embedding while it is built, and
//! [`verify_drawings`] re-checks the finished frames from scratch.

mod canvas;
mod check;
pub mod geom;
mod plan;
mod points;
mod svg;
pub mod tri;
mod verify;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::solver::Certificate;
use crate::story::{GraphStory, Vertex};
use crate::weighted::{self, WeightedEmbedding};
use canvas::Canvas;
pub use geom::Pt;
pub use points::{parse_points, random_points, PointParseError};
pub use svg::{frame_svg, index_html, write_frames};
pub use verify::{verify_drawings, DrawingViolation};

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("expected {expected} points, got {got}")]
    PointCount { expected: usize, got: usize },
    #[error("point {0} coincides with an earlier point")]
    CoincidentPoints(usize),
    #[error("certificate: {0}")]
    Certificate(String),
    #[error("free points do not match the face weights")]
    Weights,
    #[error("no route for link {0}")]
    NoRoute(String),
    #[error("frame check failed: {0}")]
    Check(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// One drawing of the sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub index: u32,
    pub vertices: BTreeMap<Vertex, Pt>,
    /// Polylines keyed by `(a, b)` with `a < b`, running from `a` to `b`.
    pub edges: BTreeMap<(Vertex, Vertex), Vec<Pt>>,
    /// Unused points with the index of the face hosting them.
    pub free: Vec<(Pt, usize)>,
}

/// Incremental renderer holding the drawing of the latest window.
#[derive(Debug, Clone)]
pub struct Renderer {
    canvas: Canvas,
    current: WeightedEmbedding,
    index: u32,
}

impl Renderer {
    /// Draws the first window on `points`: vertices take the leading points in
    /// label order and the rest stay free, spread over faces per the weights.
    pub fn initial_layout(first: &WeightedEmbedding, index: u32, points: &[Pt]) -> Result<(Self, Frame), RenderError> {
        let expected = first.embedding.vertex_count() + first.total() as usize;
        if points.len() != expected {
            return Err(RenderError::PointCount { expected, got: points.len() });
        }
        let mut canvas = Canvas::new(points)?;
        plan::initial_layout(&mut canvas, first)?;
        let r = Renderer { canvas, current: first.clone(), index };
        let f = r.frame()?;
        Ok((r, f))
    }

    /// Draws window `index + 1` from the current one.
    pub fn insert_step(&mut self, story: &GraphStory, cert: &Certificate) -> Result<Frame, RenderError> {
        let i = self.index + 1;
        let next = i
            .checked_sub(cert.first)
            .and_then(|d| cert.entries.get(d as usize))
            .ok_or_else(|| RenderError::Certificate(format!("no entry for window {i}")))?;
        let v_out = i.checked_sub(story.omega()).filter(|&v| v >= 1);
        let log = cert.reroutes.iter().find(|r| r.step == i);
        plan::insert_step(&mut self.canvas, next, v_out, i, log)?;
        self.current = next.clone();
        self.index = i;
        self.frame()
    }

    /// Frames for windows `1..index` obtained by deleting the newest vertices.
    fn restrictions(&self) -> Result<Vec<Frame>, RenderError> {
        let mut r = self.clone();
        let mut out = Vec::new();
        for v in (2..=self.index).rev() {
            r.canvas.remove_vertex(v);
            r.current = weighted::remove_vertex(&r.current, v).map_err(|e| RenderError::Certificate(e.to_string()))?;
            r.index = v - 1;
            out.push(r.frame()?);
        }
        out.reverse();
        Ok(out)
    }

    fn frame(&self) -> Result<Frame, RenderError> {
        let hosts = check::check_frame(&self.canvas, &self.current)?;
        let c = &self.canvas;
        let vertices = c.site_of.iter().map(|(&v, &s)| (v, c.point(s).clone())).collect();
        let edges = c
            .drawn_edges()
            .into_iter()
            .map(|(a, b)| ((a, b), c.path(a, b).into_iter().map(|s| c.point(s).clone()).collect()))
            .collect();
        let free = hosts.into_iter().map(|(s, f)| (c.point(s).clone(), f)).collect();
        Ok(Frame { index: self.index, vertices, edges, free })
    }
}

/// Frames `1..=n` realizing `cert` on `points`, which must number `min(ω, n) + k`.
pub fn render_story(story: &GraphStory, cert: &Certificate, points: &[Pt]) -> Result<Vec<Frame>, RenderError> {
    let expected = (story.omega().min(story.n()) + story.k()) as usize;
    if points.len() != expected {
        return Err(RenderError::PointCount { expected, got: points.len() });
    }
    let first = cert.entries.first().ok_or_else(|| RenderError::Certificate("no entries".into()))?;
    let (mut r, frame) = Renderer::initial_layout(first, cert.first, points)?;
    let mut frames = r.restrictions()?;
    frames.push(frame);
    while r.index < story.n() {
        frames.push(r.insert_step(story, cert)?);
    }
    Ok(frames)
}
