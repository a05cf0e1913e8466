//! Completely bounded norms: the closed-form transpose value, ascent-based
//! lower bounds over amplifications, and certified values for decomposed
//! Jordan maps at `p = ∞`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{check_exponent, Algebra, Element};
use crate::error::Result;
use crate::jordan::{sigma_kernel_projection, stormer_decompose, JordanDecomposition};
use crate::linmap::{opposite_transfer, LinMap};
use crate::rng::{derive_seed, rng};
use crate::{spectral, tol, witness, Matrix};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CbEstimate {
    pub lower: f64,
    pub upper: Option<f64>,
    /// Amplification level attaining `lower`.
    pub level: usize,
    pub certified: bool,
    /// Element of `M_level(A)` whose norm ratio is `lower`.
    pub witness: Element,
}

/// `n^{|1 − 2/p|}`, the cb norm of the transpose on `S^p_n`.
pub fn transpose_cb_oracle(n: usize, p: f64) -> f64 {
    let e = if p.is_infinite() { 1.0 } else { (1.0 - 2.0 / p).abs() };
    (n as f64).powf(e)
}

#[derive(Clone, Copy, Debug)]
pub struct AscentConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self { restarts: 32, max_iters: 500, seed: 0 }
    }
}

/// Default amplification schedule `1..=min(total dim, 4)`.
pub fn default_k_max(t: &LinMap) -> usize {
    t.domain().total_dim().clamp(1, 4)
}

/// Ratio `‖(id_k ⊗ T)(x)‖_p / ‖x‖_p`; zero for `x = 0`.
pub fn amplified_ratio(t: &LinMap, p: f64, k: usize, x: &Element) -> Result<f64> {
    check_exponent(p)?;
    let amp_dom = t.domain().amplified(k)?;
    amp_dom.check(x)?;
    let nx = amp_dom.lp_norm_unchecked(x, p);
    if nx == 0.0 {
        return Ok(0.0);
    }
    let y = t.apply_amplified(k, x)?;
    Ok(t.codomain().amplified(k)?.lp_norm_unchecked(&y, p) / nx)
}

pub fn cb_lower_bound(t: &LinMap, p: f64, k: usize, restarts: usize, seed: u64) -> Result<CbEstimate> {
    cb_lower_bound_with(t, p, k, AscentConfig { restarts, seed, ..AscentConfig::default() })
}

/// Maximizes the amplified norm ratio at levels `1..=k`. Level `m` starts
/// from level `m − 1`'s witness, the `Σ e_ab⊗e_ab` and flip elements of
/// every block, and Gaussian restarts, so the result is monotone in `k`.
pub fn cb_lower_bound_with(t: &LinMap, p: f64, k: usize, cfg: AscentConfig) -> Result<CbEstimate> {
    check_exponent(p)?;
    let dom = t.domain();
    let mut best = CbEstimate {
        lower: 0.0,
        upper: None,
        level: 1,
        certified: false,
        witness: dom.zero(),
    };
    for m in 1..=k.max(1) {
        let amp_dom = dom.amplified(m)?;
        let mut starts = vec![witness::pad_to(dom, &best.witness, m)?];
        for i in 0..dom.num_blocks() {
            starts.push(witness::omega(dom, m, i)?);
            starts.push(witness::swap(dom, m, i)?);
        }
        for r in 0..cfg.restarts {
            let mut g = rng(derive_seed(cfg.seed, ((m as u64) << 32) | r as u64));
            starts.push(amp_dom.random_ginibre(&mut g));
        }
        let results: Vec<(f64, Element)> = starts
            .into_par_iter()
            .map(|x0| ascend(t, p, m, x0, cfg.max_iters))
            .collect::<Result<_>>()?;
        // first maximum in start order
        for (ratio, x) in results {
            if ratio > best.lower {
                best.lower = ratio;
                best.level = m;
                best.witness = x;
            }
        }
        if best.level < m {
            best.witness = witness::pad_to(dom, &best.witness, m)?;
            best.level = m;
        }
    }
    Ok(best)
}

/// Gradient of `y ↦ ‖y‖_p` in unweighted coordinates, singular values below
/// `SMOOTHING · s_max` clipped.
fn norm_gradient(a: &Algebra, y: &Element, p: f64) -> Element {
    let svds: Vec<(Matrix, nalgebra::DVector<f64>, Matrix)> = y.blocks().iter().map(spectral::svd).collect();
    let smax = svds.iter().flat_map(|(_, s, _)| s.iter().cloned()).fold(0.0, f64::max);
    let mut g = a.zero();
    if smax == 0.0 {
        return g;
    }
    let cut = tol::SMOOTHING * smax;
    if p.is_infinite() {
        let (j, (u, _, v)) = svds
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .1[0].total_cmp(&y.1 .1[0]))
            .expect("non-empty algebra");
        *g.block_mut(j) = u.column(0) * v.column(0).adjoint();
        return g;
    }
    let norm = a.lp_norm_unchecked(y, p);
    for (j, (u, s, v)) in svds.iter().enumerate() {
        let w = a.weight(j);
        let scaled = Matrix::from_fn(u.nrows(), s.len(), |r, c| {
            let sc = s[c];
            let f = if sc > cut { (sc / norm).powf(p - 1.0) } else { 0.0 };
            u[(r, c)] * (w * f)
        });
        *g.block_mut(j) = scaled * v.adjoint();
    }
    g
}

/// Normalized gradient ascent of `log R(x)` on the Frobenius unit sphere,
/// halving the step on non-improvement.
fn ascend(t: &LinMap, p: f64, k: usize, x0: Element, max_iters: usize) -> Result<(f64, Element)> {
    let amp_dom = t.domain().amplified(k)?;
    let amp_cod = t.codomain().amplified(k)?;
    let n0 = x0.frobenius_norm();
    if n0 == 0.0 {
        return Ok((0.0, x0));
    }
    let mut x = x0.scale(1.0 / n0);
    let eval = |x: &Element| -> Result<(f64, f64, Element)> {
        let nx = amp_dom.lp_norm_unchecked(x, p);
        let y = t.apply_amplified(k, x)?;
        let ny = amp_cod.lp_norm_unchecked(&y, p);
        Ok((if nx > 0.0 { ny / nx } else { 0.0 }, nx, y))
    };
    let (mut ratio, mut nx, mut y) = eval(&x)?;
    let mut step = 0.5;
    for _ in 0..max_iters {
        if step < 1e-8 || ratio == 0.0 {
            break;
        }
        let ny = ratio * nx;
        let gy = t.apply_amplified_adjoint(k, &norm_gradient(&amp_cod, &y, p))?;
        let gx = norm_gradient(&amp_dom, &x, p);
        let grad = &gy.scale(1.0 / ny) - &gx.scale(1.0 / nx);
        let gn = grad.frobenius_norm();
        if gn < 1e-14 {
            break;
        }
        let mut cand = &x + &grad.scale(step / gn);
        cand = cand.scale(1.0 / cand.frobenius_norm());
        let (cr, cnx, cy) = eval(&cand)?;
        if cr > ratio {
            x = cand;
            ratio = cr;
            nx = cnx;
            y = cy;
        } else {
            step *= 0.5;
        }
    }
    Ok((ratio, x))
}

/// Certified `p = ∞` cb norm of a decomposed Jordan map:
/// `max(1 if π ≠ 0, largest block on which σ is faithful)`. The witness is
/// the flip in that block (or a block unit of the kernel part), replayed.
pub fn cb_norm_structural(d: &JordanDecomposition) -> Result<CbEstimate> {
    let j = &d.j;
    let dom = j.domain();
    let kernel = sigma_kernel_projection(d)?;
    let pi_nonzero = !d.pi.is_zero(tol::ALGEBRAIC);
    let top = kernel
        .faithful_blocks
        .iter()
        .copied()
        .max_by_key(|&b| (dom.dim(b), std::cmp::Reverse(b)));

    let (value, level, w) = match top {
        Some(b) => {
            let m = dom.dim(b);
            (m as f64, m, witness::swap(dom, m, b)?)
        }
        None if pi_nonzero => {
            // a block not annihilated by π
            let b = (0..dom.num_blocks())
                .find(|&b| j.apply(&dom.block_unit(b)).map(|y| y.max_abs() > 0.5).unwrap_or(false))
                .unwrap_or(0);
            (1.0, 1, dom.block_unit(b))
        }
        None => (0.0, 1, dom.zero()),
    };
    let lower = amplified_ratio(j, f64::INFINITY, level, &w)?;
    let certified = (lower - value).abs() < tol::SEARCH;
    Ok(CbEstimate { lower, upper: Some(value), level, certified, witness: w })
}

/// `‖id : A → A^op‖_cb` at `p = ∞`, equal to the largest block dimension.
pub fn id_to_opposite_cb(a: &Algebra) -> Result<CbEstimate> {
    cb_norm_structural(&stormer_decompose(&opposite_transfer(a))?)
}
