//! Error taxonomy shared across the crate.
//!
//! Numeric payloads are stored as `f64` regardless of the working scalar so
//! that the error type stays non-generic and serializes uniformly.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building bodies, detecting symmetry,
/// or evaluating functionals.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input points do not span the requested dimension, or a derived
    /// construction collapsed to measure zero.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Suspension base failed validation.
    #[error("degenerate suspension base: {0}")]
    DegenerateBase(String),

    /// Operands live in different ambient dimensions.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Linear part of a map is not invertible.
    #[error("singular linear map (|det| = {det:e})")]
    SingularMap { det: f64 },

    /// A direction vector with (near-)zero norm was supplied.
    #[error("zero direction vector")]
    ZeroDirection,

    /// An iterative solver hit its iteration cap before reaching tolerance.
    #[error("no convergence after {iterations} iterations ({context})")]
    NoConvergence { iterations: usize, context: String },

    /// Two distinct symmetry candidates are closer than the resolution the
    /// tolerance can distinguish; the input is too close to symmetric.
    #[error("symmetry candidates ambiguous at tolerance {tol:e}")]
    ToleranceAmbiguity { tol: f64 },

    /// Alignment search ran out of evaluations; carries the best residual
    /// reached before giving up.
    #[error("alignment budget exhausted (best residual {residual:e})")]
    BudgetExhausted { residual: f64 },

    /// Rejection resampling failed to produce an admissible draw.
    #[error("resampling exhausted after {tries} tries")]
    ResampleExhausted { tries: usize },

    /// A blended point left its body; the outer cutoff is too wide for the
    /// anchor target's interior margin.
    #[error("blended point violates the body interior (margin {margin:e}); shrink the outer cutoff")]
    InteriorViolation { margin: f64 },

    /// A verification pipeline failed; names the first failing clause.
    #[error("verification failed at clause {clause}: {message}")]
    VerificationFailure { clause: String, message: String },

    /// A test map's class does not match the functional's equivariance class.
    #[error("map class mismatch: {0}")]
    ClassMismatch(String),

    /// A caller-supplied parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Malformed input file or JSON payload.
    #[error("parse error: {0}")]
    ParseError(String),

    /// Underlying I/O failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable code for reports and CLI output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DegenerateInput(_) => "degenerate_input",
            Error::DegenerateBase(_) => "degenerate_base",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::SingularMap { .. } => "singular_map",
            Error::ZeroDirection => "zero_direction",
            Error::NoConvergence { .. } => "no_convergence",
            Error::ToleranceAmbiguity { .. } => "tolerance_ambiguity",
            Error::BudgetExhausted { .. } => "budget_exhausted",
            Error::ResampleExhausted { .. } => "resample_exhausted",
            Error::InteriorViolation { .. } => "interior_violation",
            Error::VerificationFailure { .. } => "verification_failure",
            Error::ClassMismatch(_) => "class_mismatch",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::ParseError(_) => "parse_error",
            Error::Io(_) => "io_error",
        }
    }

    /// True for errors caused by bad user input rather than computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::ParseError(_)
                | Error::Io(_)
                | Error::DegenerateInput(_)
                | Error::DegenerateBase(_)
                | Error::DimensionMismatch { .. }
                | Error::InvalidParameter(_)
        )
    }
}
