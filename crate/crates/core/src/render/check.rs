//! Self-check of a canvas against the weighted embedding it should realize.

use std::collections::HashMap;

use super::canvas::{Canvas, B};
use super::RenderError;
use crate::weighted::WeightedEmbedding;

fn fail(msg: String) -> RenderError {
    RenderError::Check(msg)
}

fn cyclic_eq(a: &[u32], b: &[u32]) -> bool {
    a.len() == b.len() && (a.is_empty() || (0..a.len()).any(|s| (0..a.len()).all(|i| a[(s + i) % a.len()] == b[i])))
}

/// Confirms rotations, face regions and free-point counts, and returns the
/// host face of each free site.
pub(crate) fn check_frame(c: &Canvas, w: &WeightedEmbedding) -> Result<Vec<(usize, usize)>, RenderError> {
    let e = &w.embedding;
    if !c.site_of.keys().copied().eq(e.vertices()) {
        return Err(fail("placed vertices differ from the window".into()));
    }
    if c.drawn_edges() != e.edges() {
        return Err(fail("drawn edges differ from the window".into()));
    }
    for v in e.vertices() {
        let want = e.rotation(v).unwrap_or(&[]);
        if !cyclic_eq(&c.geometric_rotation(v), want) {
            return Err(fail(format!("rotation at vertex {v} differs")));
        }
    }
    let reg = c.regions();
    let mut face_of_region: HashMap<u32, usize> = HashMap::new();
    for (fi, face) in e.faces().iter().enumerate() {
        let mut labels: Vec<u32> = face.darts().map(|(u, v)| c.left_region(&reg, u, v)).collect();
        labels.extend(face.isolated.iter().map(|&v| c.point_region(&reg, c.site(v))));
        if labels.is_empty() {
            labels.push(c.point_region(&reg, B));
        }
        if labels.iter().any(|&l| l != labels[0]) {
            return Err(fail(format!("face {fi} spans several regions")));
        }
        if face_of_region.insert(labels[0], fi).is_some() {
            return Err(fail(format!("face {fi} shares its region with another face")));
        }
    }
    if face_of_region.get(&c.point_region(&reg, B)) != Some(&e.outer()) {
        return Err(fail("outer face is not unbounded".into()));
    }
    let mut counts = vec![0u32; e.face_count()];
    let mut hosts = Vec::new();
    for &s in &c.free {
        let fi = *face_of_region
            .get(&c.point_region(&reg, s))
            .ok_or_else(|| fail("free point outside every face".into()))?;
        counts[fi] += 1;
        hosts.push((s, fi));
    }
    if counts != w.weights {
        return Err(fail(format!("free points per face {counts:?}, weights {:?}", w.weights)));
    }
    Ok(hosts)
}
