use thiserror::Error;

/// Errors raised by the arithmetic kernels and the analysis pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field configuration: {0}")]
    InvalidConfig(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("element is indistinguishable from zero below absolute precision {precision}")]
    AmbiguousZero { precision: i64 },

    #[error("coefficient of t^{index} is indistinguishable from zero at the working precision")]
    AmbiguousValuation { index: usize },

    #[error("quotient ring element is not a unit (constant coefficient vanishes)")]
    NotAUnit,

    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,

    #[error("Newton polygon has a single edge; nothing to split")]
    SingleEdge,

    #[error("working precision exhausted: {reason}; retry with a larger precision (suggested {suggested})")]
    PrecisionExhausted { reason: String, suggested: i64 },

    #[error("not a t-module: (D0 - l(t))^{power} is nonzero, offending matrix {matrix}")]
    NotATModule { power: usize, matrix: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("element does not belong to the configured field: {0}")]
    FieldMismatch(String),

    #[error("rank conditions disagree with the Newton polygon verdict: {0}")]
    CheckDisagreement(String),
}

pub type Result<T> = std::result::Result<T, Error>;
