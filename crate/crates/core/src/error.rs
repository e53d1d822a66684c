use alloc::string::String;

/// Errors raised by the certification toolkit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("empty point set")]
    EmptyPointSet,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("body is not reducible to a finite point set")]
    NotFinite,
    #[error("Minkowski expansion exceeds {0} points")]
    ExpansionTooLarge(usize),
    #[error("body is not an origin-centred ball")]
    NotCenteredBall,
    #[error("smoothness data does not match the requested mode: {0}")]
    ModeMismatch(String),
    #[error("missing class-difference body for pair ({0}, {1})")]
    MissingPair(usize, usize),
    #[error("at least two classes are required, got {0}")]
    TooFewClasses(usize),
    #[error("ensemble members disagree: {0}")]
    MemberMismatch(String),
    #[error("no adversarial witness: perturbation lies inside the certificate")]
    InsideCertificate,
    #[error("members share the top class; no damning weights exist")]
    SameTopClass,
    #[error("precondition violated: {0}")]
    Precondition(String),
}
