use serde::{Serialize, Serializer};

use super::generated::{generated_with_seed, GeneratedAlgebra};
use super::{jordan_residual, product_residual};
use crate::algebra::{Algebra, Element};
use crate::error::{Error, Result};
use crate::linmap::LinMap;
use crate::{spectral, tol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Hom,
    Anti,
    /// Both multiplicative and anti-multiplicative (commutative range);
    /// counted with the representation part.
    Both,
}

#[derive(Clone, Debug, Serialize)]
pub struct CentralAssignment {
    pub central_projection_index: usize,
    pub kind: BlockKind,
    #[serde(skip)]
    pub hom_residual: f64,
    #[serde(skip)]
    pub anti_residual: f64,
}

/// `J = π + σ` with `π(x) = J(x)g` a *-representation, `σ(x) = J(x)f` an
/// anti-*-representation, and `g + f = J(1)` central projections of `Z`.
#[derive(Clone, Debug)]
pub struct JordanDecomposition {
    pub j: LinMap,
    pub z: GeneratedAlgebra,
    pub g: Element,
    pub f: Element,
    pub pi: LinMap,
    pub sigma: LinMap,
    pub assignments: Vec<CentralAssignment>,
}

impl Serialize for JordanDecomposition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            g: &'a Element,
            f: &'a Element,
            pi: &'a LinMap,
            sigma: &'a LinMap,
            assignments: &'a [CentralAssignment],
        }
        Repr {
            g: &self.g,
            f: &self.f,
            pi: &self.pi,
            sigma: &self.sigma,
            assignments: &self.assignments,
        }
        .serialize(s)
    }
}

impl JordanDecomposition {
    /// Residuals of the structural identities; all should be below `1e-9`.
    pub fn residuals(&self) -> DecompositionResiduals {
        let e = &self.z.unit;
        let sum = (&(&self.g + &self.f) - e).max_abs();
        let orthogonal = (&self.g * &self.f).max_abs();
        let central = self
            .z
            .basis
            .iter()
            .map(|b| self.g.commutator(b).max_abs().max(self.f.commutator(b).max_abs()))
            .fold(0.0, f64::max);
        let split = self.j.max_abs_diff(&self.pi.add(&self.sigma).expect("same shapes"));
        DecompositionResiduals {
            sum,
            orthogonal,
            central,
            split,
            pi_multiplicative: product_residual(&self.pi, None, false),
            sigma_anti_multiplicative: product_residual(&self.sigma, None, true),
            g_projection: (&(&self.g * &self.g) - &self.g).max_abs(),
            f_projection: (&(&self.f * &self.f) - &self.f).max_abs(),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecompositionResiduals {
    pub sum: f64,
    pub orthogonal: f64,
    pub central: f64,
    pub split: f64,
    pub pi_multiplicative: f64,
    pub sigma_anti_multiplicative: f64,
    pub g_projection: f64,
    pub f_projection: f64,
}

impl DecompositionResiduals {
    pub fn max(&self) -> f64 {
        [
            self.sum,
            self.orthogonal,
            self.central,
            self.split,
            self.pi_multiplicative,
            self.sigma_anti_multiplicative,
            self.g_projection,
            self.f_projection,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn stormer_decompose(j: &LinMap) -> Result<JordanDecomposition> {
    let residual = jordan_residual(j);
    if residual >= tol::ALGEBRAIC {
        return Err(Error::NotJordan { residual });
    }
    let z = generated_with_seed(j, 0)?;
    let cod = j.codomain();
    let mut g = cod.zero();
    let mut assignments = Vec::with_capacity(z.minimal_central_projections.len());
    for (index, zp) in z.minimal_central_projections.iter().enumerate() {
        let hom_residual = product_residual(j, Some(zp), false);
        let anti_residual = product_residual(j, Some(zp), true);
        let kind = match (hom_residual < tol::ALGEBRAIC, anti_residual < tol::ALGEBRAIC) {
            (true, true) => BlockKind::Both,
            (true, false) => BlockKind::Hom,
            (false, true) => BlockKind::Anti,
            (false, false) => {
                return Err(Error::InconsistentJordan { index, hom_residual, anti_residual })
            }
        };
        if kind != BlockKind::Anti {
            g = &g + zp;
        }
        assignments.push(CentralAssignment {
            central_projection_index: index,
            kind,
            hom_residual,
            anti_residual,
        });
    }
    let f = &z.unit - &g;
    let one = cod.identity();
    let pi = j.sandwich(&one, &g)?;
    let sigma = j.sandwich(&one, &f)?;
    Ok(JordanDecomposition { j: j.clone(), z, g, f, pi, sigma, assignments })
}

/// `q = Σ` units of the domain blocks killed by `σ`; `ker σ = qM`.
#[derive(Clone, Debug, Serialize)]
pub struct SigmaKernel {
    pub q: Element,
    pub kernel_blocks: Vec<usize>,
    pub faithful_blocks: Vec<usize>,
}

pub fn sigma_kernel_projection(d: &JordanDecomposition) -> Result<SigmaKernel> {
    let dom = d.j.domain();
    let mut q = dom.zero();
    let mut kernel_blocks = Vec::new();
    let mut faithful_blocks = Vec::new();
    for i in 0..dom.num_blocks() {
        let image = d.sigma.apply(&dom.block_unit(i))?;
        if image.max_abs() < tol::ALGEBRAIC {
            q = &q + &dom.block_unit(i);
            kernel_blocks.push(i);
        } else {
            faithful_blocks.push(i);
        }
    }
    if !faithful_blocks.is_empty() {
        // σ must be injective on (1 - q)M
        let restricted = d.sigma.restrict(&faithful_blocks)?;
        let sv = spectral::singular_values(restricted.matrix());
        let top = sv.iter().cloned().fold(0.0, f64::max);
        let rank = sv.iter().filter(|&&s| s > 1e-8 * top).count();
        let expected = restricted.domain().total_dim();
        if rank != expected {
            return Err(Error::Tolerance(format!(
                "σ has rank {rank} on (1-q)M of dimension {expected}"
            )));
        }
    }
    Ok(SigmaKernel { q, kernel_blocks, faithful_blocks })
}

/// Block algebras are `n`-minimal exactly for `n ≥` the largest block size.
pub fn minimality_degree(a: &Algebra) -> usize {
    a.max_dim()
}

/// Domain split into `qM` (where `σ = 0`, so `J` is a *-homomorphism there)
/// and `(1-q)M ≅ M / ker σ`, the part that must be `n`-minimal for `J` to be
/// completely bounded with constant `n`.
#[derive(Clone, Debug, Serialize)]
pub struct HomMinimalSplit {
    pub hom_blocks: Vec<usize>,
    pub min_blocks: Vec<usize>,
    pub hom_part: Option<Algebra>,
    pub min_part: Option<Algebra>,
    /// Minimality degree of `min_part`, `0` when it is empty.
    pub degree: usize,
    pub hom_residual: f64,
}

pub fn split_hom_minimal(j: &LinMap) -> Result<HomMinimalSplit> {
    let d = stormer_decompose(j)?;
    split_from_decomposition(&d)
}

pub(crate) fn split_from_decomposition(d: &JordanDecomposition) -> Result<HomMinimalSplit> {
    let kernel = sigma_kernel_projection(d)?;
    let dom = d.j.domain();
    let hom_part = dom.select(&kernel.kernel_blocks);
    let min_part = dom.select(&kernel.faithful_blocks);
    let degree = min_part.as_ref().map_or(0, minimality_degree);
    let hom_residual = if kernel.kernel_blocks.is_empty() {
        0.0
    } else {
        product_residual(&d.j.restrict(&kernel.kernel_blocks)?, None, false)
    };
    if hom_residual >= tol::ALGEBRAIC {
        return Err(Error::Tolerance(format!(
            "J is not multiplicative on ker σ (residual {hom_residual:e})"
        )));
    }
    Ok(HomMinimalSplit {
        hom_blocks: kernel.kernel_blocks,
        min_blocks: kernel.faithful_blocks,
        hom_part,
        min_part,
        degree,
        hom_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::tests::doubled;
    use crate::jordan::{build_jordan, Embedding, EmbeddingKind, JordanSpec};
    use crate::linmap::opposite_transfer;
    use crate::C64;

    fn diag(entries: &[f64]) -> Element {
        let n = entries.len();
        let mut m = crate::Matrix::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = C64::new(e, 0.0);
        }
        Element::from_blocks(vec![m])
    }

    /// (λ ⊕ x) ↦ λ ⊕ x^T on C ⊕ M_3
    fn scalar_plus_transpose() -> LinMap {
        let a = Algebra::with_dims(&[1, 3]);
        let spec = JordanSpec {
            domain: a.clone(),
            codomain: a,
            embeddings: vec![
                Embedding { source: 0, target: 0, offset: 0, kind: EmbeddingKind::Hom },
                Embedding { source: 1, target: 1, offset: 0, kind: EmbeddingKind::Anti },
            ],
        };
        build_jordan(&spec).unwrap()
    }

    #[test]
    fn identity_is_all_hom() {
        let a = Algebra::full(3);
        let d = stormer_decompose(&LinMap::identity(&a)).unwrap();
        assert!((&d.g - &a.identity()).max_abs() < 1e-9);
        assert!(d.f.max_abs() < 1e-9);
        assert!(d.sigma.is_zero(1e-9));
        assert!(d.residuals().max() < 1e-9);
    }

    #[test]
    fn doubled_map_splits_in_halves() {
        let d = stormer_decompose(&doubled(2)).unwrap();
        assert!((&d.g - &diag(&[1.0, 1.0, 0.0, 0.0])).max_abs() < 1e-9);
        assert!((&d.f - &diag(&[0.0, 0.0, 1.0, 1.0])).max_abs() < 1e-9);
        assert!(d.residuals().max() < 1e-9);
    }

    #[test]
    fn transpose_is_all_anti() {
        let a = Algebra::full(3);
        let d = stormer_decompose(&opposite_transfer(&a)).unwrap();
        assert!(d.g.max_abs() < 1e-9);
        assert!((&d.f - &a.identity()).max_abs() < 1e-9);
        assert_eq!(d.assignments.len(), 1);
        assert_eq!(d.assignments[0].kind, BlockKind::Anti);
    }

    #[test]
    fn rejects_non_jordan() {
        let a = Algebra::full(2);
        let t = LinMap::identity(&a).scale(2.0);
        assert!(matches!(stormer_decompose(&t), Err(Error::NotJordan { .. })));
    }

    #[test]
    fn kernel_projection_examples() {
        // σ = 0
        let a = Algebra::with_dims(&[2, 1]);
        let d = stormer_decompose(&LinMap::identity(&a)).unwrap();
        let k = sigma_kernel_projection(&d).unwrap();
        assert!((&k.q - &a.identity()).max_abs() < 1e-12);

        let d = stormer_decompose(&scalar_plus_transpose()).unwrap();
        let k = sigma_kernel_projection(&d).unwrap();
        assert_eq!(k.kernel_blocks, vec![0]);
        assert_eq!(k.faithful_blocks, vec![1]);
        let dom = d.j.domain();
        assert!((&k.q - &dom.block_unit(0)).max_abs() < 1e-12);
        // q is central
        for (b, i, jj) in dom.basis_indices() {
            let x = dom.matrix_unit(b, i, jj);
            assert!(k.q.commutator(&x).max_abs() < 1e-12);
        }

        let d = stormer_decompose(&opposite_transfer(&Algebra::full(3))).unwrap();
        assert!(sigma_kernel_projection(&d).unwrap().q.max_abs() < 1e-12);
    }

    #[test]
    fn split_examples() {
        let a = Algebra::with_dims(&[2, 3]);
        let s = split_hom_minimal(&LinMap::identity(&a)).unwrap();
        assert_eq!(s.hom_part, Some(a.clone()));
        assert_eq!(s.min_part, None);
        assert_eq!(s.degree, 0);

        let s = split_hom_minimal(&scalar_plus_transpose()).unwrap();
        assert_eq!(s.hom_part, Some(Algebra::full(1)));
        assert_eq!(s.min_part, Some(Algebra::full(3)));
        assert_eq!(s.degree, 3);

        // π ⊕ transpose on M_2 ⊕ M_2
        let m = Algebra::with_dims(&[2, 2]);
        let spec = JordanSpec {
            domain: m.clone(),
            codomain: m.clone(),
            embeddings: vec![
                Embedding { source: 0, target: 0, offset: 0, kind: EmbeddingKind::Hom },
                Embedding { source: 1, target: 1, offset: 0, kind: EmbeddingKind::Anti },
            ],
        };
        let s = split_hom_minimal(&build_jordan(&spec).unwrap()).unwrap();
        assert_eq!(s.hom_blocks, vec![0]);
        assert_eq!(s.min_blocks, vec![1]);
        assert_eq!(s.degree, 2);
    }

    #[test]
    fn minimality_degrees() {
        assert_eq!(minimality_degree(&Algebra::with_dims(&[1, 1, 1])), 1);
        assert_eq!(minimality_degree(&Algebra::with_dims(&[2, 3])), 3);
    }

    #[test]
    fn json_has_assignment_kinds() {
        let d = stormer_decompose(&doubled(2)).unwrap();
        let v = serde_json::to_value(&d).unwrap();
        let kinds: Vec<&str> = v["assignments"]
            .as_array()
            .unwrap()
            .iter()
            .map(|a| a["kind"].as_str().unwrap())
            .collect();
        let mut sorted = kinds.clone();
        sorted.sort();
        assert_eq!(sorted, vec!["anti", "hom"]);
        for key in ["g", "f", "pi", "sigma"] {
            assert!(v.get(key).is_some());
        }
    }
}
