//! Default numerical tolerances.

/// Algebraic identities (multiplicativity, commutation, reconstruction).
pub const ALGEBRAIC: f64 = 1e-9;

/// Eigenvalue positivity threshold, used as `λ_min ≥ -PSD`.
pub const PSD: f64 = 1e-9;

/// Verdicts that come out of a nonconvex search.
pub const SEARCH: f64 = 1e-6;

/// Relative spectral cutoff for supports and pseudo-inverses.
pub const SUPPORT_CUTOFF: f64 = 1e-10;

/// Gram–Schmidt pivot threshold used when closing spans.
pub const PIVOT: f64 = 1e-10;

/// Gradient smoothing for the nonsmooth Schatten norms at p = 1 and p = ∞.
pub const SMOOTHING: f64 = 1e-8;
