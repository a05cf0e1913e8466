//! Complete positivity (exact, through Choi matrices) and n-positivity
//! (semi-decided by a witness search).

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Algebra, Element};
use crate::error::Result;
use crate::linmap::LinMap;
use crate::rng::{complex_gaussian, derive_seed, rng};
use crate::{spectral, tol, witness, Matrix, C64};

/// One `(domain block, codomain block)` piece of the Choi matrix:
/// `C_ij = Σ_{a,b} e_ab ⊗ T(E^{(i)}_ab)^{(j)}`, of size `d_i·d'_j`.
#[derive(Clone, Debug)]
pub struct ChoiBlock {
    pub domain_block: usize,
    pub codomain_block: usize,
    pub matrix: Matrix,
}

/// The Choi matrix of a map between block algebras, kept as its
/// block-diagonal pieces. `T` is completely positive iff every piece is PSD.
#[derive(Clone, Debug)]
pub struct ChoiMatrix {
    pub domain_dims: Vec<usize>,
    pub codomain_dims: Vec<usize>,
    pub blocks: Vec<ChoiBlock>,
}

impl ChoiMatrix {
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| hermitian_min(&b.matrix).0)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| (&b.matrix - b.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.min_eigenvalue() >= -tol
    }

    /// Block-diagonal assembly of all pieces, size `Σ_ij d_i d'_j`.
    pub fn to_dense(&self) -> Matrix {
        let n: usize = self.blocks.iter().map(|b| b.matrix.nrows()).sum();
        let mut out = Matrix::zeros(n, n);
        let mut at = 0;
        for b in &self.blocks {
            let m = b.matrix.nrows();
            out.view_mut((at, at), (m, m)).copy_from(&b.matrix);
            at += m;
        }
        out
    }
}

fn hermitian_min(m: &Matrix) -> (f64, DVector<C64>) {
    let (values, vectors) = spectral::hermitian_eigen(m);
    (values[0], vectors.column(0).clone_owned())
}

pub fn choi(t: &LinMap) -> ChoiMatrix {
    let dom = t.domain();
    let cod = t.codomain();
    let cod_off = cod.offsets();
    let mut blocks = Vec::new();
    for i in 0..dom.num_blocks() {
        let d = dom.dim(i);
        for j in 0..cod.num_blocks() {
            let e = cod.dim(j);
            let mut m = Matrix::zeros(d * e, d * e);
            for a in 0..d {
                for b in 0..d {
                    let col = dom.coord(i, a, b);
                    for s in 0..e {
                        for u in 0..e {
                            m[(a * e + s, b * e + u)] = t.matrix()[(cod_off[j] + s * e + u, col)];
                        }
                    }
                }
            }
            blocks.push(ChoiBlock { domain_block: i, codomain_block: j, matrix: m });
        }
    }
    ChoiMatrix {
        domain_dims: dom.blocks().iter().map(|b| b.dim).collect(),
        codomain_dims: cod.blocks().iter().map(|b| b.dim).collect(),
        blocks,
    }
}

pub fn is_completely_positive(t: &LinMap, tol: f64) -> bool {
    choi(t).is_psd(tol)
}

/// Budget for the n-positivity witness search.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SearchBudget {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { restarts: 16, iterations: 200, seed: 0, tol: tol::SEARCH }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict")]
pub enum PositivityVerdict {
    /// A positive `X ∈ M_n(A)` with `(id ⊗ T)(X)` not positive.
    CertifiedNo {
        witness: Element,
        level: usize,
        min_eigenvalue: f64,
        hermiticity_defect: f64,
    },
    /// No witness found. `exact` is set when the answer came from the Choi
    /// test, in which case it is a certificate.
    ProbablyYes {
        best_min_eigenvalue: f64,
        exact: bool,
        budget: SearchBudget,
    },
}

impl PositivityVerdict {
    pub fn is_no(&self) -> bool {
        matches!(self, Self::CertifiedNo { .. })
    }

    pub fn witness(&self) -> Option<&Element> {
        match self {
            Self::CertifiedNo { witness, .. } => Some(witness),
            Self::ProbablyYes { .. } => None,
        }
    }
}

/// Smallest eigenvalue and anti-Hermitian defect of `(id_n ⊗ T)(x)`.
pub fn amplified_violation(t: &LinMap, n: usize, x: &Element) -> Result<(f64, f64)> {
    let y = t.apply_amplified(n, x)?;
    let defect = (&y - &y.adjoint()).max_abs();
    Ok((y.min_eigenvalue(), defect))
}

/// Semi-decides n-positivity. Exact through the Choi matrix once `n`
/// reaches the block size on either side; otherwise searches rank-one
/// positives `vv*` minimising the bottom eigenvalue of the image.
pub fn is_n_positive(t: &LinMap, n: usize, budget: SearchBudget) -> Result<PositivityVerdict> {
    let dom = t.domain();
    dom.amplified(n)?;

    if t.adjoint_preservation_residual() > budget.tol {
        if let Some(v) = hermiticity_witness(t, n, budget.tol)? {
            return Ok(v);
        }
    }

    let threshold = dom.max_dim().min(t.codomain().max_dim());
    if n >= threshold {
        return choi_verdict(t, n, budget);
    }

    let jobs: Vec<(usize, usize)> = (0..dom.num_blocks())
        .flat_map(|i| (0..budget.restarts.max(1)).map(move |r| (i, r)))
        .collect();
    let results: Vec<(f64, Element)> = jobs
        .par_iter()
        .map(|&(block, restart)| {
            descend_min_eigenvalue(t, n, block, restart, budget)
        })
        .collect::<Result<_>>()?;

    let mut best: Option<(f64, Element)> = None;
    for (value, x) in results {
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, x));
        }
    }
    let (value, x) = best.expect("at least one restart");
    if value < -budget.tol {
        let (min_eigenvalue, hermiticity_defect) = amplified_violation(t, n, &x)?;
        return Ok(PositivityVerdict::CertifiedNo {
            witness: x,
            level: n,
            min_eigenvalue,
            hermiticity_defect,
        });
    }
    Ok(PositivityVerdict::ProbablyYes { best_min_eigenvalue: value, exact: false, budget })
}

fn choi_verdict(t: &LinMap, n: usize, budget: SearchBudget) -> Result<PositivityVerdict> {
    let c = choi(t);
    let mut worst: Option<(f64, &ChoiBlock, DVector<C64>)> = None;
    for b in &c.blocks {
        let (value, vec) = hermitian_min(&b.matrix);
        if worst.as_ref().is_none_or(|(w, _, _)| value < *w) {
            worst = Some((value, b, vec));
        }
    }
    let (value, blk, vec) = worst.expect("choi matrix has at least one block");
    if value >= -budget.tol {
        return Ok(PositivityVerdict::ProbablyYes { best_min_eigenvalue: value, exact: true, budget });
    }
    let dom = t.domain();
    let i = blk.domain_block;
    let d = dom.dim(i);
    let x = if n >= d {
        // the Choi matrix is the image of Σ e_ab ⊗ e_ab itself
        witness::pad_to(dom, &witness::omega(dom, d, i)?, n)?
    } else {
        // n ≥ d'_j: factor the bottom eigenvector u = Σ_a e_a ⊗ u_a as
        // U = Y Z*, and test vv* with v = Σ_s e_s ⊗ z_s at level rank(U)
        let e = t.codomain().dim(blk.codomain_block);
        let u = Matrix::from_fn(e, d, |s, a| vec[a * e + s]);
        let (_, sv, v) = spectral::svd(&u);
        let rank = sv.iter().filter(|&&s| s > tol::SUPPORT_CUTOFF * sv[0]).count();
        let mut state = DVector::<C64>::zeros(n * d);
        for s in 0..rank.min(n) {
            for a in 0..d {
                state[s * d + a] = v[(a, s)];
            }
        }
        rank_one(dom, n, i, &state)?
    };
    let (min_eigenvalue, hermiticity_defect) = amplified_violation(t, n, &x)?;
    Ok(PositivityVerdict::CertifiedNo { witness: x, level: n, min_eigenvalue, hermiticity_defect })
}

/// Positive `vv*` placed in one block of `M_n(A)`.
fn rank_one(a: &Algebra, n: usize, block: usize, v: &DVector<C64>) -> Result<Element> {
    let mut x = a.amplified(n)?.zero();
    *x.block_mut(block) = v * v.adjoint();
    Ok(x)
}

/// If `T` does not preserve adjoints, one of the positive spanning elements
/// `e_aa`, `(e_a+e_b)(e_a+e_b)*`, `(e_a+ie_b)(e_a+ie_b)*` has a non-Hermitian
/// image.
fn hermiticity_witness(t: &LinMap, n: usize, tol: f64) -> Result<Option<PositivityVerdict>> {
    let dom = t.domain();
    for (i, blk) in dom.blocks().iter().enumerate() {
        let d = blk.dim;
        for a in 0..d {
            for b in a..d {
                for phase in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                    if a == b && phase.im != 0.0 {
                        continue;
                    }
                    let mut v = DVector::<C64>::zeros(n * d);
                    v[a] += C64::new(1.0, 0.0);
                    if b != a {
                        v[b] += phase;
                    }
                    let x = rank_one(dom, n, i, &v)?;
                    let (min_eigenvalue, hermiticity_defect) = amplified_violation(t, n, &x)?;
                    if hermiticity_defect > tol {
                        return Ok(Some(PositivityVerdict::CertifiedNo {
                            witness: x,
                            level: n,
                            min_eigenvalue,
                            hermiticity_defect,
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Projected descent on the unit sphere of `C^n ⊗ C^{d_i}`. Restart 0 starts
/// from the normalized `Σ_a e_a ⊗ e_a`; the others from Gaussian vectors.
fn descend_min_eigenvalue(
    t: &LinMap,
    n: usize,
    block: usize,
    restart: usize,
    budget: SearchBudget,
) -> Result<(f64, Element)> {
    let dom = t.domain();
    let d = dom.dim(block);
    let len = n * d;
    let mut v = if restart == 0 {
        let mut v = DVector::<C64>::zeros(len);
        for a in 0..n.min(d) {
            v[a * d + a] = C64::new(1.0, 0.0);
        }
        v
    } else {
        let mut r = rng(derive_seed(budget.seed, (block as u64) << 32 | restart as u64));
        DVector::from_fn(len, |_, _| complex_gaussian(&mut r))
    };
    v /= C64::new(v.norm(), 0.0);

    let evaluate = |v: &DVector<C64>| -> Result<(f64, Element, Element)> {
        let x = rank_one(dom, n, block, v)?;
        let y = t.apply_amplified(n, &x)?;
        let mut best = (f64::INFINITY, 0usize, DVector::<C64>::zeros(0));
        for (j, m) in y.blocks().iter().enumerate() {
            let (value, vec) = hermitian_min(m);
            if value < best.0 {
                best = (value, j, vec);
            }
        }
        let mut dual = t.codomain().amplified(n)?.zero();
        *dual.block_mut(best.1) = &best.2 * best.2.adjoint();
        Ok((best.0, x, dual))
    };

    let (mut value, mut x, mut dual) = evaluate(&v)?;
    let mut step = 0.5;
    for _ in 0..budget.iterations {
        if value < -budget.tol || step < 1e-9 {
            break;
        }
        let g_el = t.apply_amplified_adjoint(n, &dual)?;
        let g_block = g_el.block(block);
        let herm = (g_block + g_block.adjoint()) * C64::new(0.5, 0.0);
        let mut g = &herm * &v;
        let radial = v.dotc(&g);
        g -= &v * radial;
        let gn = g.norm();
        if gn < 1e-14 {
            break;
        }
        let mut candidate = &v - &g * C64::new(step / gn, 0.0);
        candidate /= C64::new(candidate.norm(), 0.0);
        let (cv, cx, cd) = evaluate(&candidate)?;
        if cv < value {
            v = candidate;
            value = cv;
            x = cx;
            dual = cd;
            step = (step * 1.5).min(1.0);
        } else {
            step *= 0.5;
        }
    }
    Ok((value, x))
}
