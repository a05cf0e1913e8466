//! Jordan *-homomorphisms: detection, the generated *-algebra and its centre,
//! the central decomposition `J = π + σ` into a *-representation and an
//! anti-*-representation, and the split of the domain into the part where
//! `σ` vanishes and the part where it is faithful.

mod build;
mod decompose;
mod generated;

pub use build::{build_jordan, Embedding, EmbeddingKind, JordanSpec};
pub use decompose::{
    minimality_degree, sigma_kernel_projection, split_hom_minimal, stormer_decompose, BlockKind,
    CentralAssignment, HomMinimalSplit, JordanDecomposition, SigmaKernel,
};
pub use generated::{generated_star_algebra, GeneratedAlgebra};

use serde::Serialize;

use crate::algebra::Element;
use crate::error::Result;
use crate::linmap::LinMap;
use crate::rng::{derive_seed, rng};

/// Images of the matrix units of the domain, in coordinate order.
pub(crate) fn basis_images(j: &LinMap) -> Vec<Element> {
    (0..j.domain().total_dim()).map(|c| j.basis_image(c)).collect()
}

/// Largest violation of `J(x∘y) = J(x)∘J(y)` and `J(x*) = J(x)*` over
/// matrix units. Zero (up to rounding) exactly for Jordan *-homomorphisms;
/// the symmetrized product identity is the polarization of `J(x²) = J(x)²`.
pub fn jordan_residual(j: &LinMap) -> f64 {
    let dom = j.domain();
    let basis = dom.basis_indices();
    let images = basis_images(j);
    let mut worst = 0.0_f64;
    for (c1, &(b1, i1, j1)) in basis.iter().enumerate() {
        let star = dom.coord(b1, j1, i1);
        worst = worst.max((&images[star] - &images[c1].adjoint()).max_abs());
        for (c2, &(b2, i2, j2)) in basis.iter().enumerate().skip(c1) {
            // e_{i1 j1} ∘ e_{i2 j2} = (δ_{j1 i2} e_{i1 j2} + δ_{j2 i1} e_{i2 j1}) / 2
            let mut lhs = j.codomain().zero();
            if b1 == b2 {
                if j1 == i2 {
                    lhs = &lhs + &images[dom.coord(b1, i1, j2)].scale(0.5);
                }
                if j2 == i1 {
                    lhs = &lhs + &images[dom.coord(b1, i2, j1)].scale(0.5);
                }
            }
            let rhs = images[c1].jordan_product(&images[c2]);
            worst = worst.max((&lhs - &rhs).max_abs());
        }
    }
    worst
}

pub fn is_jordan_star_hom(j: &LinMap, tol: f64) -> bool {
    jordan_residual(j) < tol
}

/// Largest violation of `J(xy)z = J(x)J(y)z` (or `J(yx)z` when `anti`) over
/// pairs of matrix units. `z = None` means the unit.
pub fn product_residual(j: &LinMap, z: Option<&Element>, anti: bool) -> f64 {
    let dom = j.domain();
    let basis = dom.basis_indices();
    let images = basis_images(j);
    let cut = |y: &Element| match z {
        Some(z) => y * z,
        None => y.clone(),
    };
    let images_z: Vec<Element> = images.iter().map(cut).collect();
    let mut worst = 0.0_f64;
    for (c1, &(b1, i1, j1)) in basis.iter().enumerate() {
        for (c2, &(b2, i2, j2)) in basis.iter().enumerate() {
            // xy = δ e_{i1 j2}; yx = δ e_{i2 j1}
            let lhs = if b1 != b2 {
                None
            } else if !anti && j1 == i2 {
                Some(&images_z[dom.coord(b1, i1, j2)])
            } else if anti && j2 == i1 {
                Some(&images_z[dom.coord(b1, i2, j1)])
            } else {
                None
            };
            let rhs = &images[c1] * &images_z[c2];
            let r = match lhs {
                Some(l) => (l - &rhs).max_abs(),
                None => rhs.max_abs(),
            };
            worst = worst.max(r);
        }
    }
    worst
}

#[derive(Clone, Debug, Serialize)]
pub struct HxhWitness {
    pub h: Element,
    pub x: Element,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HxhReport {
    pub holds: bool,
    pub max_residual: f64,
    pub seed: u64,
    pub trials: usize,
    pub witness: Option<HxhWitness>,
}

/// Samples Hermitian `h` and arbitrary `x` and checks
/// `J(hxh) = J(h)J(x)J(h)` to relative tolerance `tol`.
pub fn hxh_check(j: &LinMap, trials: usize, seed: u64, tol: f64) -> Result<HxhReport> {
    let dom = j.domain();
    let mut report = HxhReport { holds: true, max_residual: 0.0, seed, trials, witness: None };
    for t in 0..trials {
        let mut r = rng(derive_seed(seed, t as u64));
        let h = dom.random_hermitian(&mut r);
        let x = dom.random_ginibre(&mut r);
        let lhs = j.apply(&(&(&h * &x) * &h))?;
        let jh = j.apply(&h)?;
        let rhs = &(&jh * &j.apply(&x)?) * &jh;
        let scale = (h.max_abs().powi(2) * x.max_abs()).max(1.0);
        let residual = (&lhs - &rhs).max_abs() / scale;
        if residual > report.max_residual {
            report.max_residual = residual;
            if residual >= tol {
                report.holds = false;
                report.witness = Some(HxhWitness { h, x, residual });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::linmap::opposite_transfer;
    use crate::tol;
    use crate::C64;

    pub(crate) fn doubled(n: usize) -> LinMap {
        // x ↦ diag(x, x^T) from M_n into M_{2n}
        let dom = Algebra::full(n);
        let cod = Algebra::full(2 * n);
        LinMap::from_fn(&dom, &cod, |x| {
            let mut y = cod.zero();
            y.block_mut(0).view_mut((0, 0), (n, n)).copy_from(x.block(0));
            y.block_mut(0).view_mut((n, n), (n, n)).copy_from(&x.block(0).transpose());
            y
        })
        .unwrap()
    }

    #[test]
    fn identity_is_jordan() {
        assert!(is_jordan_star_hom(&LinMap::identity(&Algebra::with_dims(&[2, 1])), tol::ALGEBRAIC));
    }

    #[test]
    fn doubled_map_is_jordan() {
        assert!(is_jordan_star_hom(&doubled(2), tol::ALGEBRAIC));
        assert!(is_jordan_star_hom(&opposite_transfer(&Algebra::with_dims(&[3, 2])), tol::ALGEBRAIC));
    }

    #[test]
    fn compression_by_non_projection_is_not_jordan() {
        let a = Algebra::full(2);
        let mut s = a.zero();
        s.block_mut(0)[(0, 0)] = C64::new(2.0, 0.0);
        s.block_mut(0)[(1, 1)] = C64::new(0.5, 0.0);
        let t = LinMap::identity(&a).sandwich(&s, &s).unwrap();
        // J(e_11) = 4 e_11 but J(e_11)^2 = 16 e_11
        assert!(jordan_residual(&t) > 1.0);
        assert!(!is_jordan_star_hom(&t, tol::ALGEBRAIC));
    }

    #[test]
    fn transpose_is_anti_multiplicative() {
        let t = opposite_transfer(&Algebra::full(3));
        assert!(product_residual(&t, None, true) < 1e-15);
        assert!(product_residual(&t, None, false) > 0.5);
    }

    #[test]
    fn hxh_on_examples() {
        let id = LinMap::identity(&Algebra::full(3));
        assert!(hxh_check(&id, 10, 1, 1e-9).unwrap().holds);
        let t = opposite_transfer(&Algebra::full(2));
        assert!(hxh_check(&t, 10, 2, 1e-9).unwrap().holds);
        assert!(hxh_check(&doubled(2), 10, 3, 1e-9).unwrap().holds);

        let a = Algebra::full(2);
        let mut s = a.zero();
        s.block_mut(0)[(0, 0)] = C64::new(1.0, 0.0);
        s.block_mut(0)[(0, 1)] = C64::new(1.0, 0.0);
        s.block_mut(0)[(1, 1)] = C64::new(1.0, 0.0);
        let bad = LinMap::identity(&a).sandwich(&s, &s.adjoint()).unwrap();
        let r = hxh_check(&bad, 10, 4, 1e-9).unwrap();
        assert!(!r.holds);
        let w = r.witness.unwrap();
        // replaying the witness reproduces the residual
        let lhs = bad.apply(&(&(&w.h * &w.x) * &w.h)).unwrap();
        let jh = bad.apply(&w.h).unwrap();
        let rhs = &(&jh * &bad.apply(&w.x).unwrap()) * &jh;
        let scale = (w.h.max_abs().powi(2) * w.x.max_abs()).max(1.0);
        assert!(((&lhs - &rhs).max_abs() / scale - w.residual).abs() < 1e-12);
    }
}
