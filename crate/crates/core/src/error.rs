use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum StefanError {
    /// A grid, horizon or parameter failed validation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A boundary curve violates admissibility (s^0 = 0, s^n > 0 for n >= 1).
    #[error("inadmissible boundary curve: {0}")]
    InadmissibleCurve(String),

    /// A user-supplied coefficient evaluated outside its allowed range.
    #[error("coefficient out of range: {0}")]
    CoefficientOutOfRange(String),

    /// The tridiagonal elimination hit a (near-)zero pivot.
    #[error("zero pivot in tridiagonal solve at row {row}")]
    ZeroPivot { row: usize },

    /// A time step of the fixed-boundary solve failed.
    #[error("fixed-boundary solve failed at step {step}: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<StefanError>,
    },

    /// The outer fixed-point iteration aborted.
    #[error("fixed-point iteration failed at iteration {iteration}: {source}")]
    IterationFailed {
        iteration: usize,
        #[source]
        source: Box<StefanError>,
    },

    /// Two containers that must share a grid do not.
    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    /// An operation needs an exact solution that the problem does not carry.
    #[error("no exact solution attached to this problem")]
    MissingExactSolution,

    /// An expression string could not be parsed.
    #[error("expression error: {0}")]
    Expression(String),

    /// Malformed CSV input.
    #[error("csv parse error: {0}")]
    CsvParse(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, StefanError>;
