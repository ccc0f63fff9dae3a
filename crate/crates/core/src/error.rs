use thiserror::Error;

/// Errors produced by the qubit-reach library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("incoherent control must be non-negative, got n = {0}")]
    NegativeIncoherentControl(f64),

    #[error("coherent control |u| = {value} exceeds the cap {cap}")]
    ControlCapExceeded { value: f64, cap: f64 },

    #[error("density matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("density matrix trace is {0}, expected 1")]
    NonUnitTrace(f64),

    #[error("coordinate singularity: {what} = {value:e} is at or below {min:e}")]
    Singular {
        what: &'static str,
        value: f64,
        min: f64,
    },

    #[error("decoherence rate must be positive for this operation")]
    ZeroDecoherence,

    #[error("certificate is vacuous: gamma/omega = {0} >= 4/pi")]
    VacuousCertificate(f64),

    #[error("argmax branch degenerate: |H''_theta| = {0:e}")]
    DegenerateBranch(f64),

    #[error("no maximizing root of the seeding equation found for psi0 = {0}")]
    NoSeedRoot(f64),

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("right-hand side failed at t = {t}: {source}")]
    Rhs { t: f64, source: Box<Error> },

    #[error("step limit of {0} steps exceeded")]
    StepLimit(usize),

    #[error("invalid control schedule: {0}")]
    Schedule(String),

    #[error("polyline is not closed")]
    OpenPolyline,

    #[error("target ({z}, {r}) is unreachable: no recorded cell within the search radius")]
    Unreachable { z: f64, r: f64 },

    #[error("table format: {0}")]
    TableFormat(String),

    #[error("table version mismatch: found {0}")]
    TableVersion(String),

    #[error("table file is truncated")]
    TableTruncated,

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
