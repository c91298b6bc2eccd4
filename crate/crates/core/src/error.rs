use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum NlaError {
    #[error("cutoff {cutoff} leaves tail mass {tail_mass:.3e} (tolerance {tolerance:.1e})")]
    Truncation {
        cutoff: usize,
        tail_mass: f64,
        tolerance: f64,
    },

    #[error("photon number overflows the cutoff of mode {mode} (dropped weight {dropped:.3e})")]
    PhotonOverflow { mode: usize, dropped: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mode index {index} out of range for a {modes}-mode state")]
    InvalidMode { index: usize, modes: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("nonconvergent regime: {0}")]
    NonConvergent(String),

    #[error("oracle size limit exceeded: {arms} arms (limit {limit})")]
    OracleLimit { arms: usize, limit: usize },

    #[error("not a valid density operator: {0}")]
    InvalidDensity(String),
}

pub type Result<T> = std::result::Result<T, NlaError>;
