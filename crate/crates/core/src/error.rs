//! Crate-wide error type and exit-code classification.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Hilbert-space dimension below 2.
    #[error("invalid dimension {dim}: need d >= 2")]
    InvalidDimension { dim: usize },
    /// The MUB construction requires d = 3 or an odd prime.
    #[error("unsupported dimension {dim}: the MUB construction needs an odd prime")]
    UnsupportedDimension { dim: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("invalid optical config: {0}")]
    InvalidConfig(String),
    /// Transverse wavenumber exceeds the propagation cone.
    #[error("evanescent mode: tilt {tilt_waves} waves does not propagate")]
    EvanescentMode { tilt_waves: f64 },
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("invalid hologram spec: {0}")]
    InvalidSpec(String),
    #[error("invalid integration step {step}: must be positive and at most the depth")]
    InvalidStep { step: f64 },
    #[error("negative propagation depth {z}")]
    NegativeDepth { z: f64 },
    /// All mode amplitudes vanish; probabilities are undefined.
    #[error("zero flux: probabilities are undefined")]
    ZeroFlux,
    #[error("non-finite value: {0}")]
    NonFinite(String),
    /// The depth scan peaked on the boundary of the search interval.
    #[error("no interior maximum found in the depth scan")]
    NoInteriorMaximum,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("config parse error: {0}")]
    ConfigParse(#[from] serde_json::Error),
}

impl Error {
    /// Exit-code class for the CLI: 2 for configuration errors, 3 for
    /// numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ZeroFlux | Error::NonFinite(_) | Error::NoInteriorMaximum => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}
