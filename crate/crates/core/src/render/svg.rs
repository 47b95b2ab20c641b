use std::fmt::Write as _;
use std::path::Path;

use super::geom::Pt;
use super::{Frame, RenderError};
use crate::story::GraphStory;

const SIZE: f64 = 640.0;
const MARGIN: f64 = 40.0;

struct View {
    x0: f64,
    y0: f64,
    scale: f64,
}

impl View {
    fn fit(frames: &[Frame]) -> View {
        let pts = frames.iter().flat_map(|f| f.vertices.values().chain(f.free.iter().map(|(p, _)| p)));
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for p in pts.chain(frames.iter().flat_map(|f| f.edges.values().flatten())) {
            let (x, y) = p.to_f64();
            (x0, y0, x1, y1) = (x0.min(x), y0.min(y), x1.max(x), y1.max(y));
        }
        if x0 > x1 {
            return View { x0: 0.0, y0: 0.0, scale: 1.0 };
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-9);
        View { x0, y0, scale: (SIZE - 2.0 * MARGIN) / span }
    }

    /// Display coordinates; the y axis points up in the drawing.
    fn map(&self, p: &Pt) -> (f64, f64) {
        let (x, y) = p.to_f64();
        (MARGIN + (x - self.x0) * self.scale, SIZE - MARGIN - (y - self.y0) * self.scale)
    }
}

fn draw(frame: &Frame, story: &GraphStory, view: &View) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="12" y="24" font-family="sans-serif" font-size="16">frame {}</text>"#, frame.index);
    for line in frame.edges.values() {
        let pts: Vec<String> = line.iter().map(|p| view.map(p)).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#, pts.join(" "));
    }
    for (p, _) in &frame.free {
        let (x, y) = view.map(p);
        let _ = writeln!(s, r##"<circle cx="{x:.2}" cy="{y:.2}" r="7" fill="none" stroke="#c90" stroke-width="2"/>"##);
    }
    for (&v, p) in &frame.vertices {
        let (x, y) = view.map(p);
        let _ = writeln!(s, r##"<circle cx="{x:.2}" cy="{y:.2}" r="10" fill="#fc3" stroke="black"/>"##);
        let label = story.label(v).replace('&', "&amp;").replace('<', "&lt;");
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="11">{label}</text>"#,
            y + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

/// SVG of one frame on a canvas fitted to all of `frames`.
pub fn frame_svg(frame: &Frame, frames: &[Frame], story: &GraphStory) -> String {
    draw(frame, story, &View::fit(frames))
}

pub fn index_html(frames: &[Frame]) -> String {
    let mut s = String::from("<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>frames</title></head><body>\n<ol>\n");
    for f in frames {
        let _ = writeln!(s, r#"<li><a href="frame_{0}.svg">frame {0}</a></li>"#, f.index);
    }
    s.push_str("</ol>\n</body></html>\n");
    s
}

/// Writes `frame_<i>.svg` for every frame and an `index.html` into `dir`.
pub fn write_frames(dir: &Path, frames: &[Frame], story: &GraphStory) -> Result<(), RenderError> {
    std::fs::create_dir_all(dir)?;
    let view = View::fit(frames);
    for f in frames {
        std::fs::write(dir.join(format!("frame_{}.svg", f.index)), draw(f, story, &view))?;
    }
    std::fs::write(dir.join("index.html"), index_html(frames))?;
    Ok(())
}
