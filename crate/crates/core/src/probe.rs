//! Sampled isometry checks. A passing probe is evidence, not a proof.

use serde::Serialize;

use crate::algebra::{check_exponent, Element};
use crate::error::Result;
use crate::linmap::LinMap;
use crate::rng::{derive_seed, rng};
use crate::witness;

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub level: usize,
    pub element: Element,
    /// `‖(id ⊗ T)(x)‖_p / ‖x‖_p`
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub holds: bool,
    pub p: f64,
    pub seed: u64,
    pub trials: usize,
    pub k_max: usize,
    pub samples: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Worst relative deviation `|ratio − 1|` among the samples.
    pub counterexample: Option<Counterexample>,
}

/// Checks `‖T(x)‖_p = ‖x‖_p` on `trials` Ginibre samples, up to relative `tol`.
pub fn probe_isometry(t: &LinMap, p: f64, trials: usize, seed: u64, tol: f64) -> Result<ProbeReport> {
    probe(t, p, 1, trials, seed, tol, false)
}

/// Checks `id_{M_k} ⊗ T` is isometric for `k = 1..=k_max`: Ginibre samples
/// at each level plus the `Σ e_ab⊗e_ab` and flip witnesses in every block.
pub fn probe_complete_isometry(
    t: &LinMap,
    p: f64,
    k_max: usize,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<ProbeReport> {
    probe(t, p, k_max, trials, seed, tol, true)
}

fn probe(
    t: &LinMap,
    p: f64,
    k_max: usize,
    trials: usize,
    seed: u64,
    tol: f64,
    analytic: bool,
) -> Result<ProbeReport> {
    check_exponent(p)?;
    let dom = t.domain();
    let mut report = ProbeReport {
        holds: true,
        p,
        seed,
        trials,
        k_max,
        samples: 0,
        min_ratio: f64::INFINITY,
        max_ratio: 0.0,
        counterexample: None,
    };
    let mut worst = 0.0_f64;
    for k in 1..=k_max.max(1) {
        let amp_dom = dom.amplified(k)?;
        let amp_cod = t.codomain().amplified(k)?;
        let mut r = rng(derive_seed(seed, k as u64));
        let mut samples: Vec<Element> = (0..trials).map(|_| amp_dom.random_ginibre(&mut r)).collect();
        if analytic {
            for i in 0..dom.num_blocks() {
                samples.push(witness::omega(dom, k, i)?);
                samples.push(witness::swap(dom, k, i)?);
            }
        }
        for x in samples {
            let nx = amp_dom.lp_norm_unchecked(&x, p);
            if nx == 0.0 {
                continue;
            }
            let y = t.apply_amplified(k, &x)?;
            let ratio = amp_cod.lp_norm_unchecked(&y, p) / nx;
            report.samples += 1;
            report.min_ratio = report.min_ratio.min(ratio);
            report.max_ratio = report.max_ratio.max(ratio);
            let dev = (ratio - 1.0).abs();
            if dev > tol {
                report.holds = false;
            }
            if dev > worst {
                worst = dev;
                if !report.holds {
                    report.counterexample = Some(Counterexample { level: k, element: x, ratio });
                }
            }
        }
    }
    Ok(report)
}
