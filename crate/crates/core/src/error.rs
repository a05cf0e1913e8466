use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("exponent p = {0} is outside [1, inf]")]
    InvalidExponent(f64),

    #[error("p = 2 is excluded: isometries of L^2 need not have a Jordan factorization")]
    HilbertExponent,

    #[error("element is not positive (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("amplification level must be at least 1")]
    ZeroAmplification,

    #[error("closure of the generated *-algebra did not stabilise after {rounds} rounds")]
    ClosureStalled { rounds: usize },

    #[error("central decomposition failed: {0}")]
    CentralSplit(String),

    #[error("central block {index} is neither multiplicative ({hom_residual:e}) nor anti-multiplicative ({anti_residual:e})")]
    InconsistentJordan {
        index: usize,
        hom_residual: f64,
        anti_residual: f64,
    },

    #[error("not a Jordan *-homomorphism (residual {residual:e})")]
    NotJordan { residual: f64 },

    #[error("tolerance check failed: {0}")]
    Tolerance(String),

    #[error("overlapping codomain targets in block {block} at rows {start}..{end}")]
    OverlappingTargets {
        block: usize,
        start: usize,
        end: usize,
    },

    #[error("invalid embedding spec: {0}")]
    InvalidSpec(String),

    #[error("trace condition has no strictly positive solution: {0}")]
    Infeasible(String),

    #[error("map is not of the assumed isometric form: {0}")]
    NotIsometry(String),

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("unknown instance kind `{0}`")]
    UnknownKind(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
