//! Positive isometries of noncommutative `L^p` in the form `T(x) = wbJ(x)`:
//! construction from a Jordan monomorphism, recovery of the triple from `T`,
//! and local liftings.

use serde::{Deserialize, Serialize};

use crate::algebra::{check_exponent, Algebra, Element};
use crate::error::{Error, Result};
use crate::jordan::jordan_residual;
use crate::linmap::LinMap;
use crate::positivity::{is_completely_positive, is_n_positive, PositivityVerdict, SearchBudget};
use crate::{tol, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YeadonTriple {
    pub w: Element,
    pub b: Element,
    #[serde(rename = "J")]
    pub j: LinMap,
    pub p: f64,
}

/// Deviations from the defining identities of a triple.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct TripleResiduals {
    /// `‖J(1) − s(b)‖`
    pub support: f64,
    /// `‖w*w − J(1)‖`
    pub partial_isometry: f64,
    /// `‖w − J(1)‖`; only meaningful in the positive case.
    pub positive_case: f64,
    /// `max ‖bJ(x) − J(x)b‖` over matrix units.
    pub commutation: f64,
    /// `max |τ(b^p J(x)) − τ(x)|` over a positive spanning set.
    pub trace: f64,
    pub jordan: f64,
}

impl TripleResiduals {
    pub fn max(&self) -> f64 {
        [self.support, self.partial_isometry, self.positive_case, self.commutation, self.trace, self.jordan]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

impl YeadonTriple {
    pub fn residuals(&self) -> Result<TripleResiduals> {
        let dom = self.j.domain();
        let j1 = self.j.apply(&dom.identity())?;
        let support = (&j1 - &self.b.support_projection()?).max_abs();
        let partial_isometry = (&(&self.w.adjoint() * &self.w) - &j1).max_abs();
        let positive_case = (&self.w - &j1).max_abs();
        let commutation = (0..dom.total_dim())
            .map(|c| self.b.commutator(&self.j.basis_image(c)).max_abs())
            .fold(0.0, f64::max);
        Ok(TripleResiduals {
            support,
            partial_isometry,
            positive_case,
            commutation,
            trace: trace_residual(self)?,
            jordan: jordan_residual(&self.j),
        })
    }
}

fn check_yeadon_exponent(p: f64) -> Result<()> {
    check_exponent(p)?;
    if p == 2.0 {
        return Err(Error::HilbertExponent);
    }
    if p.is_infinite() {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// `T(x) = b^{1/2} J(x) b^{1/2}` with `b = Σ_i β_i J(1_i)` and
/// `β_i^p = μ_i d_i / τ(J(1_i))`, so that `τ(b^p J(x)) = τ(x)`.
pub fn build_positive_isometry(j: &LinMap, p: f64) -> Result<(LinMap, YeadonTriple)> {
    check_yeadon_exponent(p)?;
    let residual = jordan_residual(j);
    if residual >= tol::ALGEBRAIC {
        return Err(Error::NotJordan { residual });
    }
    let dom = j.domain();
    let cod = j.codomain();
    let mut b = cod.zero();
    for i in 0..dom.num_blocks() {
        let e = j.apply(&dom.block_unit(i))?;
        let t = cod.trace(&e)?.re;
        if t <= tol::ALGEBRAIC {
            return Err(Error::Infeasible(format!(
                "block {i} is annihilated, so τ(b^p J(1_{i})) = τ(1_{i}) has no solution"
            )));
        }
        let beta = (dom.weight(i) * dom.dim(i) as f64 / t).powf(1.0 / p);
        b = &b + &e.scale(beta);
    }
    let w = j.apply(&dom.identity())?;
    let root = b.sqrt();
    let t = j.sandwich(&root, &root)?;
    Ok((t, YeadonTriple { w, b, j: j.clone(), p }))
}

/// Recovers `(w, b, J)` from a positive isometry: `b = T(1)`, `w = s(b)`,
/// `J(x) = b^{-1/2} T(x) b^{-1/2}`.
pub fn yeadon_factorize(t: &LinMap, p: f64, tol: f64) -> Result<YeadonTriple> {
    check_yeadon_exponent(p)?;
    let b = t.apply(&t.domain().identity())?;
    b.require_positive()?;
    let w = b.support_projection()?;
    let r = b.pinv_sqrt(None);
    let j = t.sandwich(&r, &r)?;
    let triple = YeadonTriple { w, b, j, p };

    let res = triple.residuals()?;
    if res.jordan >= tol {
        return Err(Error::NotJordan { residual: res.jordan });
    }
    let recon = reconstruct(&triple)?.max_abs_diff(t);
    if recon >= tol {
        return Err(Error::NotIsometry(format!("reconstruction residual {recon:.3e}")));
    }
    if res.max() >= tol {
        return Err(Error::NotIsometry(format!(
            "triple residuals: support {:.3e}, commutation {:.3e}, trace {:.3e}",
            res.support, res.commutation, res.trace
        )));
    }
    Ok(triple)
}

/// `x ↦ w b J(x)`.
pub fn reconstruct(t: &YeadonTriple) -> Result<LinMap> {
    let cod = t.j.codomain();
    t.j.sandwich(&(&t.w * &t.b), &cod.identity())
}

/// Positive elements spanning a block algebra: `e_aa`, `(e_a + e_b)(e_a + e_b)*`
/// and `(e_a + i e_b)(e_a + i e_b)*`.
pub fn positive_spanning_set(a: &Algebra) -> Vec<Element> {
    let mut out = Vec::new();
    for blk in 0..a.num_blocks() {
        let d = a.dim(blk);
        for s in 0..d {
            out.push(a.matrix_unit(blk, s, s));
            for u in s + 1..d {
                for phase in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                    let mut x = a.zero();
                    let m = x.block_mut(blk);
                    m[(s, s)] = C64::new(1.0, 0.0);
                    m[(u, u)] = C64::new(1.0, 0.0);
                    m[(s, u)] = phase.conj();
                    m[(u, s)] = phase;
                    out.push(x);
                }
            }
        }
    }
    out
}

/// `max |τ(b^p J(x)) − τ(x)|` over [`positive_spanning_set`].
pub fn trace_residual(t: &YeadonTriple) -> Result<f64> {
    let dom = t.j.domain();
    let cod = t.j.codomain();
    let bp = t.b.positive_power(t.p);
    let mut worst = 0.0_f64;
    for x in positive_spanning_set(dom) {
        let lhs = cod.trace(&(&bp * &t.j.apply(&x)?))?;
        let rhs = dom.trace(&x)?;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

pub fn check_trace_preservation(t: &YeadonTriple, tol: f64) -> bool {
    trace_residual(t).is_ok_and(|r| r < tol)
}

/// `v(x) = T(h)^{-1/2} T(h^{1/2} x h^{1/2}) T(h)^{-1/2}`, living on the
/// corner of `s(T(h))`.
pub fn local_lifting(t: &LinMap, h: &Element, tol: f64) -> Result<LinMap> {
    let dom = t.domain();
    dom.check(h)?;
    h.require_positive()?;
    let th = t.apply(h)?;
    let scale = th.max_abs().max(1.0);
    let min = th.min_eigenvalue();
    if !th.is_hermitian(tol * scale) || min < -tol * scale {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    let r = th.pinv_sqrt(None);
    let hs = h.sqrt();
    let inner = LinMap::identity(dom).sandwich(&hs, &hs)?;
    t.compose(&inner)?.sandwich(&r, &r)
}

#[derive(Clone, Debug, Serialize)]
pub struct InheritanceReport {
    pub level: usize,
    pub t: PositivityVerdict,
    pub v: PositivityVerdict,
    pub t_completely_positive: bool,
    pub v_completely_positive: bool,
    /// `T` certified n-positive (or CP) while `v` has a negativity witness.
    pub violation: bool,
}

/// Runs the n-positivity test on `T` and on its local lifting at `h`.
pub fn lifting_positivity_inheritance(t: &LinMap, h: &Element, n: usize) -> Result<InheritanceReport> {
    let v = local_lifting(t, h, tol::PSD)?;
    let budget = SearchBudget::default();
    let tv = is_n_positive(t, n, budget)?;
    let vv = is_n_positive(&v, n, budget)?;
    let t_cp = is_completely_positive(t, tol::PSD);
    let v_cp = is_completely_positive(&v, tol::PSD);
    let t_certified = t_cp || matches!(tv, PositivityVerdict::ProbablyYes { exact: true, .. });
    let violation = (t_certified && vv.is_no()) || (t_cp && !v_cp);
    Ok(InheritanceReport {
        level: n,
        t: tv,
        v: vv,
        t_completely_positive: t_cp,
        v_completely_positive: v_cp,
        violation,
    })
}
