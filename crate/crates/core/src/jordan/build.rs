use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, Element};
use crate::error::{Error, Result};
use crate::linmap::LinMap;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingKind {
    /// `x ↦ x` into the slot.
    Hom,
    /// `x ↦ x^T` into the slot.
    Anti,
}

/// Places domain block `source` as a diagonal slot of codomain block
/// `target`, starting at row/column `offset`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub source: usize,
    pub target: usize,
    pub offset: usize,
    pub kind: EmbeddingKind,
}

/// Recipe for a Jordan *-homomorphism `J = π + σ` assembled from identity
/// and transpose embeddings into disjoint diagonal slots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JordanSpec {
    pub domain: Algebra,
    pub codomain: Algebra,
    pub embeddings: Vec<Embedding>,
}

impl JordanSpec {
    pub fn validate(&self) -> Result<()> {
        let mut used: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.codomain.num_blocks()];
        for e in &self.embeddings {
            if e.source >= self.domain.num_blocks() {
                return Err(Error::InvalidSpec(format!("source block {} does not exist", e.source)));
            }
            if e.target >= self.codomain.num_blocks() {
                return Err(Error::InvalidSpec(format!("target block {} does not exist", e.target)));
            }
            let d = self.domain.dim(e.source);
            let end = e.offset + d;
            if end > self.codomain.dim(e.target) {
                return Err(Error::InvalidSpec(format!(
                    "slot {}..{end} exceeds codomain block {} of size {}",
                    e.offset,
                    e.target,
                    self.codomain.dim(e.target)
                )));
            }
            for &(s, t) in &used[e.target] {
                if e.offset < t && s < end {
                    return Err(Error::OverlappingTargets {
                        block: e.target,
                        start: e.offset.max(s),
                        end: end.min(t),
                    });
                }
            }
            used[e.target].push((e.offset, end));
        }
        Ok(())
    }

    /// Diagonal projection onto the codomain slot of an embedding.
    pub fn slot_projection(&self, e: &Embedding) -> Element {
        let mut p = self.codomain.zero();
        for i in e.offset..e.offset + self.domain.dim(e.source) {
            p.block_mut(e.target)[(i, i)] = C64::new(1.0, 0.0);
        }
        p
    }

    /// Whether the slot belongs to the representation part `g` of the
    /// central decomposition; transposes of 1×1 blocks are multiplicative.
    pub fn lands_in_hom_part(&self, e: &Embedding) -> bool {
        e.kind == EmbeddingKind::Hom || self.domain.dim(e.source) == 1
    }

    pub fn has_anti_part(&self) -> bool {
        self.embeddings.iter().any(|e| !self.lands_in_hom_part(e))
    }

    /// Largest domain block with a transpose embedding of size ≥ 2.
    pub fn anti_degree(&self) -> usize {
        self.embeddings
            .iter()
            .filter(|e| !self.lands_in_hom_part(e))
            .map(|e| self.domain.dim(e.source))
            .max()
            .unwrap_or(0)
    }
}

pub fn build_jordan(spec: &JordanSpec) -> Result<LinMap> {
    spec.validate()?;
    LinMap::from_fn(&spec.domain, &spec.codomain, |x| {
        let mut y = spec.codomain.zero();
        for e in &spec.embeddings {
            let d = spec.domain.dim(e.source);
            let src = x.block(e.source);
            let piece = match e.kind {
                EmbeddingKind::Hom => src.clone(),
                EmbeddingKind::Anti => src.transpose(),
            };
            y.block_mut(e.target)
                .view_mut((e.offset, e.offset), (d, d))
                .copy_from(&piece);
        }
        y
    })
}
