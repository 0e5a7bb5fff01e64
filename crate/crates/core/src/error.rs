use thiserror::Error;

/// Errors from matrix construction, observables, and ensembles.
///
/// The text format has its own [`crate::dsl::ParseError`] and
/// [`crate::dsl::BindError`] because those carry source positions and
/// parameter names.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("phase must be finite, got {0}")]
    NonFinitePhase(f64),
    #[error("wavelength must be positive and finite, got {0}")]
    InvalidWavelength(f64),
    #[error("path difference must be finite, got {0}")]
    NonFiniteLength(f64),
    #[error("chain needs at least one block")]
    EmptyChain,
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("sample grid is not uniformly spaced")]
    NonUniformGrid,
    #[error("sample grid spans {0}, need at least 2\u{3c0}")]
    GridTooShort(f64),
    #[error("invalid phase distribution: {0}")]
    InvalidDistribution(String),
    #[error("ensemble needs at least one sample")]
    NoSamples,
    #[error("scan grid needs at least two points")]
    GridTooFew,
    #[error("scan bounds must satisfy lo < hi, got lo={lo} hi={hi}")]
    BadScanBounds { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
