//! Closed-form test elements in amplified algebras `M_k(A)`.
//!
//! Rows of an amplified block of size `k·d` are indexed `a·d + u` with the
//! level index `a < k` major, matching [`crate::LinMap::amplify`].

use crate::algebra::{Algebra, Element};
use crate::error::Result;
use crate::C64;

const ONE: C64 = C64::new(1.0, 0.0);

/// `Σ_{a,b<m} e_ab ⊗ e_ab` in `block`, `m = min(k, d)`; a multiple of the
/// maximally entangled projector.
pub fn omega(a: &Algebra, k: usize, block: usize) -> Result<Element> {
    let amp = a.amplified(k)?;
    let d = a.dim(block);
    let m = k.min(d);
    let mut x = amp.zero();
    let xb = x.block_mut(block);
    for s in 0..m {
        for t in 0..m {
            xb[(s * d + s, t * d + t)] = ONE;
        }
    }
    Ok(x)
}

/// `Σ_{a,b<m} e_ab ⊗ e_ba` in `block`, `m = min(k, d)`; the flip operator
/// on `C^m ⊗ C^m`.
pub fn swap(a: &Algebra, k: usize, block: usize) -> Result<Element> {
    let amp = a.amplified(k)?;
    let d = a.dim(block);
    let m = k.min(d);
    let mut x = amp.zero();
    let xb = x.block_mut(block);
    for s in 0..m {
        for t in 0..m {
            xb[(s * d + t, t * d + s)] = ONE;
        }
    }
    Ok(x)
}

/// Embeds an element of `M_k(A)` into `M_{k'}(A)`, `k' ≥ k`, as the top-left
/// corner of every block.
pub fn pad_to(a: &Algebra, x: &Element, k_to: usize) -> Result<Element> {
    let amp = a.amplified(k_to)?;
    let mut out = amp.zero();
    for (i, m) in x.blocks().iter().enumerate() {
        let n = m.nrows();
        out.block_mut(i).view_mut((0, 0), (n, n)).copy_from(m);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_is_rank_one_positive() {
        let a = Algebra::with_dims(&[3, 1]);
        let w = omega(&a, 3, 0).unwrap();
        assert!(w.is_positive(1e-12));
        // eigenvalues {3, 0, ...}
        assert!((w.max_eigenvalue() - 3.0).abs() < 1e-12);
        assert_eq!(w.block(1).iter().filter(|z| z.norm() > 0.0).count(), 0);
    }

    #[test]
    fn swap_is_unitary_involution() {
        let a = Algebra::full(2);
        let s = swap(&a, 2, 0).unwrap();
        let sq = &s * &s;
        assert!((&sq - &a.amplified(2).unwrap().identity()).max_abs() < 1e-15);
        assert!((s.min_eigenvalue() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn truncated_level() {
        // k < d keeps only the leading m = k coordinates
        let a = Algebra::full(3);
        let w = omega(&a, 2, 0).unwrap();
        assert_eq!(w.block(0).nrows(), 6);
        assert!((w.max_eigenvalue() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn padding_preserves_entries() {
        let a = Algebra::with_dims(&[2, 1]);
        let w = omega(&a, 2, 0).unwrap();
        let p = pad_to(&a, &w, 3).unwrap();
        assert_eq!(p.block(0).nrows(), 6);
        assert_eq!(p.block(1).nrows(), 3);
        assert_eq!(p.block(0).view((0, 0), (4, 4)), w.block(0).view((0, 0), (4, 4)));
        assert!((p.frobenius_norm() - w.frobenius_norm()).abs() < 1e-15);
    }
}
