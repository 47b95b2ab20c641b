//! Face-weighted embeddings, vertex removal and compatibility.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::{CanonicalKey, Embedding, EmbeddingDoc, EmbeddingError, Face, Removal};
use crate::story::Vertex;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WeightError {
    #[error("weights list has {got} entries for {faces} faces")]
    Length { got: usize, faces: usize },
    #[error("vertex sets differ after removal")]
    VertexSetMismatch,
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

/// An embedding plus a non-negative weight per face.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightedEmbedding {
    pub embedding: Embedding,
    pub weights: Vec<u32>,
}

impl WeightedEmbedding {
    pub fn new(embedding: Embedding, weights: Vec<u32>) -> Result<Self, WeightError> {
        if weights.len() != embedding.face_count() {
            return Err(WeightError::Length { got: weights.len(), faces: embedding.face_count() });
        }
        Ok(WeightedEmbedding { embedding, weights })
    }

    /// All-zero weights.
    pub fn zero(embedding: Embedding) -> Self {
        let weights = vec![0; embedding.face_count()];
        WeightedEmbedding { embedding, weights }
    }

    pub fn total(&self) -> u32 {
        self.weights.iter().sum()
    }

    pub fn key(&self) -> CanonicalKey {
        weighted_key(self)
    }

    pub fn to_doc(&self) -> WeightedDoc {
        let d = self.embedding.to_doc();
        WeightedDoc { rotations: d.rotations, faces: d.faces, outer: d.outer, weights: self.weights.clone() }
    }

    pub fn from_doc(doc: &WeightedDoc) -> Result<Self, WeightError> {
        let embedding = Embedding::from_doc(&doc.embedding_doc())?;
        if doc.weights.len() != doc.faces.len() {
            return Err(WeightError::Length { got: doc.weights.len(), faces: doc.faces.len() });
        }
        // Faces are re-sorted on canonicalization, so carry weights across.
        let mut pairs: Vec<_> = doc.faces.iter().cloned().zip(doc.weights.iter().copied()).collect();
        let mut weights = vec![0; embedding.face_count()];
        for (f, w) in pairs.drain(..) {
            let face = f.canonical();
            match embedding.faces().iter().position(|g| *g == face) {
                Some(i) => weights[i] += w,
                None => return Err(EmbeddingError::Invalid("face lost in canonicalization".into()).into()),
            }
        }
        Ok(WeightedEmbedding { embedding, weights })
    }
}

/// Serialized weighted embedding: the embedding fields plus `weights` aligned to `faces`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedDoc {
    pub rotations: BTreeMap<Vertex, Vec<Vertex>>,
    pub faces: Vec<Face>,
    pub outer: usize,
    pub weights: Vec<u32>,
}

impl WeightedDoc {
    fn embedding_doc(&self) -> EmbeddingDoc {
        EmbeddingDoc { rotations: self.rotations.clone(), faces: self.faces.clone(), outer: self.outer }
    }
}

/// Every way to spread `k` units over the faces, in lexicographic order of the
/// weight vector read from the last face backwards.
pub fn distribute_weights(embedding: &Embedding, k: u32) -> Vec<WeightedEmbedding> {
    compositions(embedding.face_count(), k)
        .into_iter()
        .map(|weights| WeightedEmbedding { embedding: embedding.clone(), weights })
        .collect()
}

/// All vectors of `parts` non-negative integers summing to `total`.
pub fn compositions(parts: usize, total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = vec![0; parts];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for x in (0..=left).rev() {
            cur[i] = x;
            rec(i + 1, left - x, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, total, &mut cur, &mut out);
    out
}

/// Moves weights across a removal: untouched faces keep theirs, the merged face
/// gets one plus the weights of the faces incident to the removed vertex.
pub fn carry_weights(removal: &Removal, weights: &[u32]) -> Vec<u32> {
    let mut out = vec![0; removal.embedding.face_count()];
    for (old, &w) in weights.iter().enumerate() {
        out[removal.face_map[old]] += w;
    }
    out[removal.merged] += 1;
    out
}

pub fn remove_vertex(w: &WeightedEmbedding, v: Vertex) -> Result<WeightedEmbedding, WeightError> {
    let r = w.embedding.remove_vertex(v)?;
    let weights = carry_weights(&r, &w.weights);
    Ok(WeightedEmbedding { embedding: r.embedding, weights })
}

/// Whether removing `v_out` from `prev` and `v_in` from `next` gives the same
/// weighted embedding.
pub fn compatible(
    prev: &WeightedEmbedding,
    next: &WeightedEmbedding,
    v_out: Vertex,
    v_in: Vertex,
) -> Result<bool, WeightError> {
    let a = remove_vertex(prev, v_out)?;
    let b = remove_vertex(next, v_in)?;
    if !a.embedding.vertices().eq(b.embedding.vertices()) {
        return Err(WeightError::VertexSetMismatch);
    }
    Ok(weighted_key(&a) == weighted_key(&b))
}

pub fn weighted_key(w: &WeightedEmbedding) -> CanonicalKey {
    let mut key = w.embedding.key().0;
    key.extend_from_slice(&(w.weights.len() as u32).to_be_bytes());
    for x in &w.weights {
        key.extend_from_slice(&x.to_be_bytes());
    }
    CanonicalKey(key)
}
