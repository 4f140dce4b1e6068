use thiserror::Error;

use crate::params::PropernessVerdict;

pub type Result<T, E = BoojumError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoojumError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("empty input")]
    EmptyInput,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("lattice count C({n}+{k}-1, {k}-1) overflows u64")]
    CountOverflow { n: u64, k: u64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid estimator configuration: {0}")]
    InvalidConfig(String),

    #[error("improper parameters: {verdict}")]
    Improper { verdict: PropernessVerdict },

    #[error("every per-sample term is -inf; increase grid_n or samples_p")]
    Resolution,

    #[error("finite-difference step leaves the rate domain at coordinate {index} (r = {rate}, step = {step})")]
    Step { index: usize, rate: f64, step: f64 },

    #[error("moment of total order {0} unsupported: order above 2 unsupported")]
    UnsupportedOrder(u32),

    #[error("invalid observation: {0}")]
    InvalidObservation(String),

    #[error("zero component at index {index}")]
    ZeroComponent { index: usize },
}
