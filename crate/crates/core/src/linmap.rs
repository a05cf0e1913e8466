//! Linear maps between block algebras, stored as dense matrices acting on
//! vectorized coordinates (row-major per block, blocks in order).

use nalgebra::DMatrix;

use crate::algebra::{Algebra, Element};
use crate::error::{Error, Result};
use crate::{Matrix, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct LinMap {
    domain: Algebra,
    codomain: Algebra,
    matrix: Matrix,
}

impl LinMap {
    pub fn new(domain: Algebra, codomain: Algebra, matrix: Matrix) -> Result<Self> {
        if matrix.nrows() != codomain.total_dim() || matrix.ncols() != domain.total_dim() {
            return Err(Error::ShapeMismatch(format!(
                "map matrix is {}x{}, expected {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                codomain.total_dim(),
                domain.total_dim()
            )));
        }
        Ok(Self { domain, codomain, matrix })
    }

    /// Tabulates `f` on the matrix-unit basis of `domain`.
    pub fn from_fn(
        domain: &Algebra,
        codomain: &Algebra,
        f: impl Fn(&Element) -> Element,
    ) -> Result<Self> {
        let mut matrix = Matrix::zeros(codomain.total_dim(), domain.total_dim());
        for (col, (b, i, j)) in domain.basis_indices().into_iter().enumerate() {
            let image = f(&domain.matrix_unit(b, i, j));
            let v = codomain.vectorize(&image)?;
            matrix.set_column(col, &v);
        }
        Self::new(domain.clone(), codomain.clone(), matrix)
    }

    pub fn identity(a: &Algebra) -> Self {
        let n = a.total_dim();
        Self { domain: a.clone(), codomain: a.clone(), matrix: Matrix::identity(n, n) }
    }

    pub fn zero(domain: &Algebra, codomain: &Algebra) -> Self {
        Self {
            domain: domain.clone(),
            codomain: codomain.clone(),
            matrix: Matrix::zeros(codomain.total_dim(), domain.total_dim()),
        }
    }

    pub fn domain(&self) -> &Algebra {
        &self.domain
    }

    pub fn codomain(&self) -> &Algebra {
        &self.codomain
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        let v = self.domain.vectorize(x)?;
        self.codomain.unvectorize(&(&self.matrix * v))
    }

    /// Image of the `col`-th matrix unit.
    pub fn basis_image(&self, col: usize) -> Element {
        let col = self.matrix.column(col).clone_owned();
        self.codomain.unvectorize(&col).expect("column length matches codomain")
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LinMap) -> Result<LinMap> {
        if inner.codomain.blocks().iter().map(|b| b.dim).ne(self.domain.blocks().iter().map(|b| b.dim)) {
            return Err(Error::ShapeMismatch(
                "inner codomain does not match outer domain".into(),
            ));
        }
        Ok(Self {
            domain: inner.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: &self.matrix * &inner.matrix,
        })
    }

    pub fn add(&self, other: &LinMap) -> Result<LinMap> {
        if self.matrix.shape() != other.matrix.shape() {
            return Err(Error::ShapeMismatch("maps have different shapes".into()));
        }
        Ok(Self { matrix: &self.matrix + &other.matrix, ..self.clone() })
    }

    pub fn scale(&self, s: f64) -> LinMap {
        Self { matrix: &self.matrix * C64::new(s, 0.0), ..self.clone() }
    }

    /// Hilbert–Schmidt adjoint in unweighted coordinates (conjugate transpose
    /// of the matrix); maps codomain to domain.
    pub fn adjoint(&self) -> LinMap {
        Self {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// Same matrix with different trace weights on either side.
    pub fn reweighted(&self, domain: Algebra, codomain: Algebra) -> Result<LinMap> {
        Self::new(domain, codomain, self.matrix.clone())
    }

    /// `x ↦ a·T(x)·c`.
    pub fn sandwich(&self, left: &Element, right: &Element) -> Result<LinMap> {
        self.codomain.check(left)?;
        self.codomain.check(right)?;
        Self::from_fn(&self.domain, &self.codomain, |x| {
            let y = self.apply(x).expect("basis element fits domain");
            &(left * &y) * right
        })
    }

    /// Restriction to the sub-algebra made of the listed domain blocks.
    pub fn restrict(&self, blocks: &[usize]) -> Result<LinMap> {
        let sub = self
            .domain
            .select(blocks)
            .ok_or_else(|| Error::ShapeMismatch("empty restriction".into()))?;
        let offsets = self.domain.offsets();
        let mut cols = Vec::with_capacity(sub.total_dim());
        for &b in blocks {
            let d = self.domain.dim(b);
            cols.extend(offsets[b]..offsets[b] + d * d);
        }
        let matrix = self.matrix.select_columns(cols.iter());
        Self::new(sub, self.codomain.clone(), matrix)
    }

    pub fn max_abs_diff(&self, other: &LinMap) -> f64 {
        if self.matrix.shape() != other.matrix.shape() {
            return f64::INFINITY;
        }
        (&self.matrix - &other.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.matrix.iter().all(|z| z.norm() <= tol)
    }

    /// Max residual of `T(e_ij*) = T(e_ij)*` over the basis.
    pub fn adjoint_preservation_residual(&self) -> f64 {
        let basis = self.domain.basis_indices();
        let mut worst = 0.0_f64;
        for (col, &(b, i, j)) in basis.iter().enumerate() {
            let star = self.domain.coord(b, j, i);
            let lhs = self.basis_image(star);
            let rhs = self.basis_image(col).adjoint();
            worst = worst.max((&lhs - &rhs).max_abs());
        }
        worst
    }

    /// The map `id_{M_k} ⊗ T` between the k-fold amplifications.
    pub fn amplify(&self, k: usize) -> Result<LinMap> {
        let dom = self.domain.amplified(k)?;
        let cod = self.codomain.amplified(k)?;
        let dom_off = dom.offsets();
        let cod_off = cod.offsets();
        let base_dom = self.domain.offsets();
        let base_cod = self.codomain.offsets();
        let mut matrix = Matrix::zeros(cod.total_dim(), dom.total_dim());
        for (bi, blk) in self.domain.blocks().iter().enumerate() {
            let d = blk.dim;
            for u in 0..d {
                for v in 0..d {
                    let src_col = base_dom[bi] + u * d + v;
                    for (bj, cblk) in self.codomain.blocks().iter().enumerate() {
                        let e = cblk.dim;
                        for s in 0..e {
                            for t in 0..e {
                                let val = self.matrix[(base_cod[bj] + s * e + t, src_col)];
                                if val == C64::new(0.0, 0.0) {
                                    continue;
                                }
                                for a in 0..k {
                                    for b in 0..k {
                                        let col = dom_off[bi] + (a * d + u) * (k * d) + b * d + v;
                                        let row = cod_off[bj] + (a * e + s) * (k * e) + b * e + t;
                                        matrix[(row, col)] = val;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Self::new(dom, cod, matrix)
    }

    /// `(id_{M_k} ⊗ T)(x)` without forming the amplified matrix.
    pub fn apply_amplified(&self, k: usize, x: &Element) -> Result<Element> {
        amplified_apply(&self.domain, &self.codomain, &self.matrix, k, x)
    }

    /// `(id_{M_k} ⊗ T^*)(y)` where `T^*` is [`LinMap::adjoint`].
    pub fn apply_amplified_adjoint(&self, k: usize, y: &Element) -> Result<Element> {
        amplified_apply(&self.codomain, &self.domain, &self.matrix.adjoint(), k, y)
    }
}

fn amplified_apply(
    domain: &Algebra,
    codomain: &Algebra,
    matrix: &Matrix,
    k: usize,
    x: &Element,
) -> Result<Element> {
    let amp_dom = domain.amplified(k)?;
    amp_dom.check(x)?;
    let amp_cod = codomain.amplified(k)?;
    let base_dom = domain.offsets();
    let mut gathered = DMatrix::<C64>::zeros(domain.total_dim(), k * k);
    for (bi, blk) in domain.blocks().iter().enumerate() {
        let d = blk.dim;
        let xb = x.block(bi);
        for a in 0..k {
            for b in 0..k {
                let col = a * k + b;
                for u in 0..d {
                    for v in 0..d {
                        gathered[(base_dom[bi] + u * d + v, col)] = xb[(a * d + u, b * d + v)];
                    }
                }
            }
        }
    }
    let images = matrix * gathered;
    let base_cod = codomain.offsets();
    let mut out = amp_cod.zero();
    for (bj, blk) in codomain.blocks().iter().enumerate() {
        let e = blk.dim;
        let yb = out.block_mut(bj);
        for a in 0..k {
            for b in 0..k {
                let col = a * k + b;
                for s in 0..e {
                    for t in 0..e {
                        yb[(a * e + s, b * e + t)] = images[(base_cod[bj] + s * e + t, col)];
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `Id : A → A^op`, realized on `A` itself as the blockwise transpose.
pub fn opposite_transfer(a: &Algebra) -> LinMap {
    LinMap::from_fn(a, a, |x| x.transpose()).expect("transpose preserves shapes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng;

    #[test]
    fn rejects_wrong_shape() {
        let a = Algebra::full(2);
        assert!(LinMap::new(a.clone(), a, Matrix::zeros(3, 4)).is_err());
    }

    #[test]
    fn apply_is_linear() {
        let dom = Algebra::with_dims(&[2, 1]);
        let cod = Algebra::with_dims(&[3]);
        let mut r = rng(5);
        let m = Matrix::from_fn(cod.total_dim(), dom.total_dim(), |_, _| {
            crate::rng::complex_gaussian(&mut r)
        });
        let t = LinMap::new(dom.clone(), cod, m).unwrap();
        let x = dom.random_ginibre(&mut r);
        let y = dom.random_ginibre(&mut r);
        let alpha = C64::new(0.3, -1.2);
        let beta = C64::new(2.0, 0.5);
        let lhs = t.apply(&(&x.scale_complex(alpha) + &y.scale_complex(beta))).unwrap();
        let rhs = &t.apply(&x).unwrap().scale_complex(alpha) + &t.apply(&y).unwrap().scale_complex(beta);
        assert!((&lhs - &rhs).max_abs() < 1e-9);
    }

    #[test]
    fn amplify_identity_is_identity() {
        let a = Algebra::with_dims(&[2, 1]);
        for k in 1..=3 {
            let amp = LinMap::identity(&a).amplify(k).unwrap();
            assert_eq!(amp, LinMap::identity(&a.amplified(k).unwrap()));
        }
    }

    #[test]
    fn amplify_one_is_noop() {
        let t = opposite_transfer(&Algebra::with_dims(&[3, 2]));
        assert_eq!(t.amplify(1).unwrap(), t);
        assert!(matches!(t.amplify(0), Err(Error::ZeroAmplification)));
    }

    #[test]
    fn amplified_transpose_maps_omega_to_swap() {
        // Σ e_ij ⊗ e_ij on C^2 ⊗ C^2 goes to the swap Σ e_ij ⊗ e_ji
        let a = Algebra::full(2);
        let t = opposite_transfer(&a).amplify(2).unwrap();
        let amp = a.amplified(2).unwrap();
        let mut omega = amp.zero();
        for i in 0..2 {
            for j in 0..2 {
                omega.block_mut(0)[(i * 2 + i, j * 2 + j)] = C64::new(1.0, 0.0);
            }
        }
        let image = t.apply(&omega).unwrap();
        let mut swap = Matrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                swap[(i * 2 + j, j * 2 + i)] = C64::new(1.0, 0.0);
            }
        }
        assert_eq!(image.block(0), &swap);
    }

    #[test]
    fn structured_amplification_matches_matrix() {
        let dom = Algebra::with_dims(&[2, 1]);
        let cod = Algebra::with_dims(&[1, 3]);
        let mut r = rng(8);
        let m = Matrix::from_fn(cod.total_dim(), dom.total_dim(), |_, _| {
            crate::rng::complex_gaussian(&mut r)
        });
        let t = LinMap::new(dom.clone(), cod.clone(), m).unwrap();
        for k in 1..=3 {
            let x = dom.amplified(k).unwrap().random_ginibre(&mut r);
            let direct = t.amplify(k).unwrap().apply(&x).unwrap();
            let fast = t.apply_amplified(k, &x).unwrap();
            assert!((&direct - &fast).max_abs() < 1e-12);

            let y = cod.amplified(k).unwrap().random_ginibre(&mut r);
            let direct = t.amplify(k).unwrap().adjoint().apply(&y).unwrap();
            let fast = t.apply_amplified_adjoint(k, &y).unwrap();
            assert!((&direct - &fast).max_abs() < 1e-12);
        }
    }

    #[test]
    fn opposite_transfer_examples() {
        let abelian = Algebra::with_dims(&[1, 1, 1]);
        assert_eq!(opposite_transfer(&abelian), LinMap::identity(&abelian));

        let a = Algebra::full(2);
        let t = opposite_transfer(&a);
        assert_eq!(t.apply(&a.matrix_unit(0, 0, 1)).unwrap(), a.matrix_unit(0, 1, 0));
    }

    #[test]
    fn opposite_transfer_is_involution() {
        let a = Algebra::with_dims(&[3, 1, 2]);
        let t = opposite_transfer(&a);
        assert_eq!(t.compose(&t).unwrap(), LinMap::identity(&a));
    }

    #[test]
    fn restriction_picks_block_columns() {
        let a = Algebra::with_dims(&[1, 2]);
        let t = opposite_transfer(&a);
        let r = t.restrict(&[1]).unwrap();
        assert_eq!(r.domain(), &Algebra::with_dims(&[2]));
        let x = Algebra::full(2).matrix_unit(0, 0, 1);
        assert_eq!(r.apply(&x).unwrap(), a.matrix_unit(1, 1, 0));
    }
}
