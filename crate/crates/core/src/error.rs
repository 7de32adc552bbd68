use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid numerics configuration: {0}")]
    InvalidConfig(String),

    /// A zero (or negative) radius was passed where a truncated density is needed.
    #[error("degenerate censoring radius {0}; truncated densities need r > 0")]
    DegenerateRadius(f64),

    #[error("signal {signal} lies outside the sampling support (radius {radius} around {center})")]
    SignalOutsideSupport { signal: f64, center: f64, radius: f64 },

    /// Source odds are 0 or infinite when every source has the same quality.
    #[error("source odds undefined at high_share = {0}")]
    UndefinedOdds(f64),

    #[error("nested quadrature lost {deviation:e} probability mass (tolerance {tolerance:e})")]
    QuadratureNonConvergence { deviation: f64, tolerance: f64 },

    #[error("utility still increasing at the scan bound {bound}; raise the upper end of the grid")]
    ScanBoundTooSmall { bound: f64 },

    #[error("rejection sampler stalled: acceptance rate {rate:e} below 1e-6")]
    RejectionStall { rate: f64 },
}
