use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// The `Display` strings are part of the CLI contract: module errors are
/// surfaced verbatim with exit code 3.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("empty measure")]
    EmptyMeasure,
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("evaluation point must be off the real axis (Im z = 0)")]
    RealArgument,
    #[error("on-circle evaluation")]
    OnCircle,
    #[error("vanishing denominator")]
    VanishingDenominator,
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("unperturbed operator")]
    Unperturbed,
    #[error("identical couplings")]
    IdenticalCouplings,
    #[error("not a density")]
    NotADensity,
    #[error("invalid Schur function: {0}")]
    InvalidSchur(String),
    #[error("non-unimodular parameter: |gamma| = {0}")]
    NonUnimodular(f64),
    #[error("atom location failed")]
    AtomLocationFailed,
    #[error("measure reconstruction inconsistent (mass deficit {0:.3e})")]
    ReconstructionInconsistent(f64),
    #[error("degree too small")]
    DegreeTooSmall,
    #[error("resolvent failure")]
    ResolventFailure,
    #[error("not a proper contraction")]
    NotProperContraction,
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("defect identification failed (residual {0:.3e})")]
    DefectIdentification(f64),
    #[error("degree overflow (truncation residual {0:.3e}); raise N")]
    DegreeOverflow(f64),
    #[error("moment table exhausted: need index {needed}, have {available}")]
    MomentTable { needed: usize, available: usize },
    #[error("missing derivative samples: {0}")]
    MissingDerivative(String),
    #[error("sample count mismatch: expected {expected}, got {got}")]
    SampleMismatch { expected: usize, got: usize },
    #[error("exceeds desk scale")]
    ExceedsDeskScale,
    #[error("invalid lattice configuration: {0}")]
    InvalidLattice(String),
    #[error("columns are not orthonormal (deviation {0:.3e})")]
    NotOrthonormal(f64),
    #[error("site {site} out of range for {sites} sites")]
    SiteOutOfRange { site: usize, sites: usize },
}

pub type Result<T> = std::result::Result<T, SpectraError>;
