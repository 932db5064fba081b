use thiserror::Error;

/// Errors produced anywhere in the skew-information pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SkewError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has zero dimension")]
    EmptyMatrix,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (max |H - H^dagger| = {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("trace is not 1 (got {trace})")]
    BadTrace { trace: f64 },

    #[error("state is not positive semi-definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("invalid skew parameters: {0}")]
    InvalidParams(String),

    #[error("norm form {norm} and trace form {trace} disagree by {residual:e}")]
    FormulaMismatch { norm: f64, trace: f64, residual: f64 },

    #[error("trace form has imaginary residue {residue:e}")]
    ImaginaryResidue { residue: f64 },

    #[error("Kraus operators are incomplete (||sum E^dagger E - I|| = {residual:e})")]
    IncompleteKraus { residual: f64 },

    #[error("channel has no Kraus operators")]
    EmptyChannel,

    #[error("need at least {needed} members, got {got}")]
    TooFewMembers { needed: usize, got: usize },

    #[error("bound requires N > 2, got N = {n}")]
    NeedsNGreaterThan2 { n: usize },

    #[error("subset size k = {k} outside [2, {n})")]
    BadSubsetSize { k: usize, n: usize },

    #[error("commutator image of member {index} vanishes")]
    ZeroSkew { index: usize },

    #[error("every commutator image vanishes")]
    AllZeroSkew,

    #[error("search space of {size} assignments exceeds the cap of {cap}")]
    SearchSpaceTooLarge { size: f64, cap: u64 },

    #[error("assignment is not a valid permutation tuple: {0}")]
    BadAssignment(String),

    #[error("Bloch vector lies outside the unit ball (|r|^2 = {t})")]
    OutsideBlochBall { t: f64 },

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("{0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, SkewError>;
