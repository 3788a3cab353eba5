use thiserror::Error;

/// Failures reported by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coupling `{0}` is not a finite real number")]
    NonFiniteCoupling(&'static str),

    #[error("basis index {0} is outside 1..=4")]
    BasisIndex(usize),

    #[error("no kernel {index} in the {sector} sector")]
    KernelIndex { sector: &'static str, index: usize },

    #[error("spectral parameter {z} lies inside the band [{lo}, {hi}]")]
    InsideBand { z: f64, lo: f64, hi: f64 },

    #[error("closed-form inner integral needs a > 1, got {0}")]
    PoissonDomain(f64),

    #[error("{what} has a pole at {at}")]
    Pole { what: &'static str, at: f64 },

    #[error("quadrature did not reach the requested tolerance at z = {0}")]
    Quadrature(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("grid size {0} must be even and at least 8")]
    GridSize(usize),

    #[error("matrix dimension {dim} exceeds the dense cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("root scan exhausted {0} steps without reaching the tail")]
    ScanExhausted(usize),

    #[error("calibration failed: {0}")]
    Calibration(String),
}

pub type Result<T> = std::result::Result<T, Error>;
