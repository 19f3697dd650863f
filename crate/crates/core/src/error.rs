use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LevyError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge: estimated error {achieved:e} exceeds tolerance {requested:e}")]
    NumericFailure { achieved: f64, requested: f64 },

    #[error("not bounded variation: the inner first absolute moment of the Lévy measure diverges")]
    NotBoundedVariation,

    #[error("no limit: the triplet has no non-trivial small-time limit")]
    NoLimit,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no intermittent regime: tail index {beta_inf} does not exceed alpha {alpha}")]
    NoIntermittentRegime { alpha: f64, beta_inf: f64 },

    #[error("monofractal scaling: the Lévy measure is zero, scaling function is linear")]
    Monofractal,

    #[error("formalism untested for Gaussian component: sigma = {0} > 0")]
    GaussianComponent(f64),

    #[error("empty domain: {0}")]
    EmptyDomain(String),

    #[error("simulation: {0}")]
    Simulation(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("moment order {q} outside the admissible interval: {reason}")]
    OutOfCase { q: f64, reason: String },

    #[error("point mass at zero: {0}")]
    PointMassAtZero(String),
}

pub type Result<T> = std::result::Result<T, LevyError>;
