use thiserror::Error;

use crate::mecd::TraceEntry;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("Jacobi eigensolver did not converge in {sweeps} sweeps")]
    EigenNoConvergence { sweeps: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("denominator quadratic form is not positive ({0:e})")]
    NonPositiveDenominator(f64),
    #[error("secular poles all share one sign ({negative} negative, {positive} positive)")]
    AllPolesOneSign { negative: usize, positive: usize },
    #[error("secular function evaluated at pole {0}")]
    AtPole(f64),
    #[error("secular root finder exceeded {0} iterations")]
    SecularNoConvergence(usize),
    #[error("GDI target {tau} outside the feasible interval ({lo}, {hi})")]
    InfeasibleTau { tau: f64, lo: f64, hi: f64 },
    #[error("distortionless normalizer vanishes")]
    ConstraintDegenerate,
    #[error("solver diverged at iteration {iteration}")]
    Diverged { iteration: usize, trace: Vec<TraceEntry> },
    #[error("every frequency in the sweep failed")]
    AllFrequenciesFailed,
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
