//! Finite-dimensional von Neumann algebras `⊕_i (M_{d_i}, μ_i·Tr)` and their
//! elements.
//!
//! An [`Algebra`] is an ordered list of full matrix blocks, each carrying a
//! strictly positive trace weight. An [`Element`] is one square complex
//! matrix per block; it does not own its algebra, so operations that need the
//! weights (trace, `L^p` norms) are methods on [`Algebra`] and validate shapes
//! first.
//!
//! Coordinates: an element is vectorized by flattening each block row-major
//! and concatenating the blocks in order. Every [`crate::LinMap`] matrix uses
//! this convention.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{complex_gaussian, Rng};
use crate::spectral;
use crate::{Matrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub dim: usize,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AlgebraRepr")]
pub struct Algebra {
    blocks: Vec<Block>,
}

#[derive(Deserialize)]
struct AlgebraRepr {
    blocks: Vec<Block>,
}

impl TryFrom<AlgebraRepr> for Algebra {
    type Error = Error;

    fn try_from(repr: AlgebraRepr) -> Result<Self> {
        Algebra::new(repr.blocks)
    }
}

impl Algebra {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidAlgebra("at least one block is required".into()));
        }
        for (i, b) in blocks.iter().enumerate() {
            if b.dim == 0 {
                return Err(Error::InvalidAlgebra(format!("block {i} has dimension 0")));
            }
            if !(b.weight.is_finite() && b.weight > 0.0) {
                return Err(Error::InvalidAlgebra(format!(
                    "block {i} has non-positive weight {}",
                    b.weight
                )));
            }
        }
        Ok(Self { blocks })
    }

    /// `M_d` with the standard trace.
    pub fn full(dim: usize) -> Self {
        Self::weighted(&[(dim, 1.0)])
    }

    /// Builds from `(dim, weight)` pairs. Panics on invalid input; use
    /// [`Algebra::new`] for fallible construction.
    pub fn weighted(blocks: &[(usize, f64)]) -> Self {
        Self::new(blocks.iter().map(|&(dim, weight)| Block { dim, weight }).collect())
            .expect("invalid block list")
    }

    /// Unit-weight blocks of the given sizes.
    pub fn with_dims(dims: &[usize]) -> Self {
        Self::weighted(&dims.iter().map(|&d| (d, 1.0)).collect::<Vec<_>>())
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn dim(&self, block: usize) -> usize {
        self.blocks[block].dim
    }

    pub fn weight(&self, block: usize) -> f64 {
        self.blocks[block].weight
    }

    pub fn max_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).max().unwrap_or(0)
    }

    /// Dimension of the algebra as a vector space, `Σ d_i²`.
    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim * b.dim).sum()
    }

    /// `τ(1) = Σ μ_i d_i`.
    pub fn unit_trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.weight * b.dim as f64).sum()
    }

    /// Start of each block in vectorized coordinates.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.blocks
            .iter()
            .map(|b| {
                let o = acc;
                acc += b.dim * b.dim;
                o
            })
            .collect()
    }

    /// Coordinate of the matrix unit `e_{ij}` of `block`.
    pub fn coord(&self, block: usize, i: usize, j: usize) -> usize {
        let d = self.blocks[block].dim;
        self.offsets()[block] + i * d + j
    }

    /// The `M_k ⊗ A` algebra: every block `d` becomes `k·d`, weights unchanged.
    pub fn amplified(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroAmplification);
        }
        Ok(Self {
            blocks: self
                .blocks
                .iter()
                .map(|b| Block { dim: k * b.dim, weight: b.weight })
                .collect(),
        })
    }

    /// Weights rescaled so that `τ(1) = 1`.
    pub fn normalized(&self) -> Self {
        let t = self.unit_trace();
        Self {
            blocks: self
                .blocks
                .iter()
                .map(|b| Block { dim: b.dim, weight: b.weight / t })
                .collect(),
        }
    }

    /// Sub-algebra formed by the listed blocks, or `None` when empty.
    pub fn select(&self, blocks: &[usize]) -> Option<Self> {
        if blocks.is_empty() {
            None
        } else {
            Some(Self { blocks: blocks.iter().map(|&i| self.blocks[i]).collect() })
        }
    }

    pub fn zero(&self) -> Element {
        Element {
            blocks: self.blocks.iter().map(|b| Matrix::zeros(b.dim, b.dim)).collect(),
        }
    }

    pub fn identity(&self) -> Element {
        Element {
            blocks: self.blocks.iter().map(|b| Matrix::identity(b.dim, b.dim)).collect(),
        }
    }

    /// Central projection onto one block.
    pub fn block_unit(&self, block: usize) -> Element {
        let mut x = self.zero();
        x.blocks[block] = Matrix::identity(self.blocks[block].dim, self.blocks[block].dim);
        x
    }

    pub fn matrix_unit(&self, block: usize, i: usize, j: usize) -> Element {
        let mut x = self.zero();
        x.blocks[block][(i, j)] = C64::new(1.0, 0.0);
        x
    }

    /// Matrix units `(block, i, j)` in coordinate order.
    pub fn basis_indices(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::with_capacity(self.total_dim());
        for (b, blk) in self.blocks.iter().enumerate() {
            for i in 0..blk.dim {
                for j in 0..blk.dim {
                    out.push((b, i, j));
                }
            }
        }
        out
    }

    pub fn check(&self, x: &Element) -> Result<()> {
        if x.blocks.len() != self.blocks.len() {
            return Err(Error::ShapeMismatch(format!(
                "element has {} blocks, algebra has {}",
                x.blocks.len(),
                self.blocks.len()
            )));
        }
        for (i, (m, b)) in x.blocks.iter().zip(&self.blocks).enumerate() {
            if m.nrows() != b.dim || m.ncols() != b.dim {
                return Err(Error::ShapeMismatch(format!(
                    "block {i} is {}x{}, expected {}x{}",
                    m.nrows(),
                    m.ncols(),
                    b.dim,
                    b.dim
                )));
            }
        }
        Ok(())
    }

    pub fn vectorize(&self, x: &Element) -> Result<DVector<C64>> {
        self.check(x)?;
        Ok(x.to_vec())
    }

    pub fn unvectorize(&self, v: &DVector<C64>) -> Result<Element> {
        self.unvectorize_slice(v.as_slice())
    }

    pub fn unvectorize_slice(&self, v: &[C64]) -> Result<Element> {
        if v.len() != self.total_dim() {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} for algebra of dimension {}",
                v.len(),
                self.total_dim()
            )));
        }
        let mut offset = 0;
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let m = Matrix::from_row_slice(b.dim, b.dim, &v[offset..offset + b.dim * b.dim]);
                offset += b.dim * b.dim;
                m
            })
            .collect();
        Ok(Element { blocks })
    }

    /// `τ(x) = Σ μ_i Tr(x_i)`.
    pub fn trace(&self, x: &Element) -> Result<C64> {
        self.check(x)?;
        Ok(self.trace_unchecked(x))
    }

    fn trace_unchecked(&self, x: &Element) -> C64 {
        x.blocks
            .iter()
            .zip(&self.blocks)
            .map(|(m, b)| m.trace() * b.weight)
            .sum()
    }

    /// Noncommutative `L^p` norm `τ(|x|^p)^{1/p}`; operator norm for `p = ∞`.
    pub fn lp_norm(&self, x: &Element, p: f64) -> Result<f64> {
        check_exponent(p)?;
        self.check(x)?;
        Ok(self.lp_norm_unchecked(x, p))
    }

    pub(crate) fn lp_norm_unchecked(&self, x: &Element, p: f64) -> f64 {
        if p.is_infinite() {
            return x
                .blocks
                .iter()
                .map(|m| spectral::singular_values(m).iter().cloned().fold(0.0, f64::max))
                .fold(0.0, f64::max);
        }
        let mut sum = 0.0;
        let mut scale = 0.0_f64;
        let svs: Vec<DVector<f64>> = x.blocks.iter().map(spectral::singular_values).collect();
        for s in &svs {
            scale = s.iter().cloned().fold(scale, f64::max);
        }
        if scale == 0.0 {
            return 0.0;
        }
        // factor out the largest singular value so that s^p cannot overflow
        for (s, b) in svs.iter().zip(&self.blocks) {
            sum += b.weight * s.iter().map(|v| (v / scale).powf(p)).sum::<f64>();
        }
        scale * sum.powf(1.0 / p)
    }

    pub fn random_ginibre(&self, rng: &mut Rng) -> Element {
        Element {
            blocks: self
                .blocks
                .iter()
                .map(|b| Matrix::from_fn(b.dim, b.dim, |_, _| complex_gaussian(rng)))
                .collect(),
        }
    }

    pub fn random_hermitian(&self, rng: &mut Rng) -> Element {
        let g = self.random_ginibre(rng);
        (&g + &g.adjoint()).scale(0.5)
    }

    /// `g* g` for Ginibre `g`; full rank almost surely.
    pub fn random_positive(&self, rng: &mut Rng) -> Element {
        let g = self.random_ginibre(rng);
        &g.adjoint() * &g
    }

    /// Haar-distributed block unitary (QR of Ginibre with phase correction).
    pub fn random_unitary(&self, rng: &mut Rng) -> Element {
        let g = self.random_ginibre(rng);
        Element {
            blocks: g
                .blocks
                .into_iter()
                .map(|m| {
                    let qr = m.qr();
                    let mut q = qr.q();
                    let r = qr.r();
                    for j in 0..q.ncols() {
                        let d = r[(j, j)];
                        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
                        for i in 0..q.nrows() {
                            q[(i, j)] *= phase;
                        }
                    }
                    q
                })
                .collect(),
        }
    }
}

pub fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        Err(Error::InvalidExponent(p))
    } else {
        Ok(())
    }
}

/// Parses `"inf"`/`"infinity"` or a real number.
pub fn parse_exponent(s: &str) -> Result<f64> {
    let p = match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "∞" => f64::INFINITY,
        other => {
            if let Some((a, b)) = other.split_once('/') {
                let a: f64 = a.trim().parse().map_err(|_| Error::InvalidExponent(f64::NAN))?;
                let b: f64 = b.trim().parse().map_err(|_| Error::InvalidExponent(f64::NAN))?;
                a / b
            } else {
                other.parse().map_err(|_| Error::InvalidExponent(f64::NAN))?
            }
        }
    };
    check_exponent(p)?;
    Ok(p)
}

/// A block-diagonal complex matrix tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    pub(crate) blocks: Vec<Matrix>,
}

impl Element {
    pub fn from_blocks(blocks: Vec<Matrix>) -> Self {
        Self { blocks }
    }

    pub fn blocks(&self) -> &[Matrix] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &Matrix {
        &self.blocks[i]
    }

    pub fn block_mut(&mut self, i: usize) -> &mut Matrix {
        &mut self.blocks[i]
    }

    pub fn into_blocks(self) -> Vec<Matrix> {
        self.blocks
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|m| m.nrows()).collect()
    }

    pub fn to_vec(&self) -> DVector<C64> {
        let n: usize = self.blocks.iter().map(|m| m.len()).sum();
        let mut v = Vec::with_capacity(n);
        for m in &self.blocks {
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    v.push(m[(i, j)]);
                }
            }
        }
        DVector::from_vec(v)
    }

    pub fn adjoint(&self) -> Self {
        self.map_blocks(|m| m.adjoint())
    }

    pub fn transpose(&self) -> Self {
        self.map_blocks(|m| m.transpose())
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_blocks(|m| m * C64::new(s, 0.0))
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        self.map_blocks(|m| m * s)
    }

    pub fn map_blocks(&self, f: impl Fn(&Matrix) -> Matrix) -> Self {
        Self { blocks: self.blocks.iter().map(f).collect() }
    }

    fn zip_blocks(&self, other: &Self, f: impl Fn(&Matrix, &Matrix) -> Matrix) -> Self {
        assert_eq!(self.dims(), other.dims(), "element shapes differ");
        Self {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// Jordan product `(xy + yx)/2`.
    pub fn jordan_product(&self, other: &Self) -> Self {
        (&(self * other) + &(other * self)).scale(0.5)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Hilbert–Schmidt inner product `Σ_i Tr(x_i^* y_i)`, unweighted.
    pub fn hs_inner(&self, other: &Self) -> C64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.iter().zip(b.iter()).map(|(u, v)| u.conj() * v).sum::<C64>())
            .sum()
    }

    /// Unweighted Frobenius norm over all blocks.
    pub fn frobenius_norm(&self) -> f64 {
        self.blocks.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|m| m.iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
    }

    /// Largest singular value over all blocks.
    pub fn operator_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|m| spectral::singular_values(m).iter().cloned().fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self - &self.adjoint()).max_abs() <= tol
    }

    /// Smallest eigenvalue of the Hermitian part, over all blocks.
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(|m| {
                spectral::hermitian_eigen(m)
                    .0
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(|m| {
                spectral::hermitian_eigen(m)
                    .0
                    .iter()
                    .cloned()
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_positive(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.min_eigenvalue() >= -tol
    }

    pub fn is_projection(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && (&(self * self) - self).max_abs() <= tol
    }

    /// `w*w` is a projection.
    pub fn is_partial_isometry(&self, tol: f64) -> bool {
        (&self.adjoint() * self).is_projection(tol)
    }

    /// `|x|^r = (x*x)^{r/2}`.
    pub fn abs_power(&self, r: f64) -> Self {
        self.map_blocks(|m| spectral::abs_power(m, r))
    }

    /// Spectral projection onto eigenvalues above `1e-10 × λ_max`.
    pub fn support_projection(&self) -> Result<Self> {
        self.require_positive()?;
        let cutoff = crate::tol::SUPPORT_CUTOFF * self.max_eigenvalue().max(0.0);
        Ok(self.map_blocks(|m| spectral::hermitian_apply(m, |l| if l > cutoff { 1.0 } else { 0.0 })))
    }

    /// Inverse square root on the support; zero elsewhere. `cutoff = None`
    /// uses the relative default.
    pub fn pinv_sqrt(&self, cutoff: Option<f64>) -> Self {
        let cutoff =
            cutoff.unwrap_or_else(|| crate::tol::SUPPORT_CUTOFF * self.max_eigenvalue().max(0.0));
        self.map_blocks(|m| {
            spectral::hermitian_apply(m, |l| if l > cutoff { l.powf(-0.5) } else { 0.0 })
        })
    }

    /// `x^r` for positive `x` (negative noise clipped to zero).
    pub fn positive_power(&self, r: f64) -> Self {
        self.map_blocks(|m| spectral::hermitian_apply(m, |l| if l > 0.0 { l.powf(r) } else { 0.0 }))
    }

    pub fn sqrt(&self) -> Self {
        self.positive_power(0.5)
    }

    pub(crate) fn require_positive(&self) -> Result<()> {
        let scale = self.max_abs().max(1.0);
        let tol = crate::tol::PSD * scale;
        let min = self.min_eigenvalue();
        if !self.is_hermitian(tol) || min < -tol {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(())
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.zip_blocks(rhs, |a, b| a + b)
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.zip_blocks(rhs, |a, b| a - b)
    }
}

/// Blockwise product.
impl Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.zip_blocks(rhs, |a, b| a * b)
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.map_blocks(|m| -m)
    }
}

/// Dense `DMatrix` from real entries, row-major.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> Matrix {
    DMatrix::from_row_iterator(rows, cols, entries.iter().map(|&r| C64::new(r, 0.0)))
}
