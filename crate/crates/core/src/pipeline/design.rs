//! Frequency sweep: covariances, penalty weights and the selected design at
//! every grid frequency.
//!
//! The constant-directivity modes work in the penalized coordinates
//! `y = Λ⁻¹w`: the programs are solved for `(ΛAΛ, ΛRΛ, ΛCΛ)` and the
//! weights mapped back with `w = Λy`. Since `G(ΛAΛ, ΛRΛ, y) = G(A, R, w)`,
//! the GDI constraint holds exactly for `w`, while the unit-norm (MECD) or
//! minimum-norm (MSCD) criterion acts on `y` and therefore charges each
//! transducer's drive by `λ_n⁻²`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::directivity::{covariance_from_density, gdi, steering_vector};
use crate::error::{Error, Result};
use crate::grq::{max_grpq, max_grq, PenaltyWeights};
use crate::linalg::{cholesky, HermitianMatrix, RIDGE};
use crate::mecd::{build_constraint, build_constraint_capped, mecd_pa, ConstraintMatrix, PaOptions};
use crate::mscd::mscd_solve;

use super::config::{DesignConfig, Mode, TauCap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Converged,
    ClampedTau,
    Failed(String),
}

impl Status {
    pub fn is_success(&self) -> bool {
        !matches!(self, Status::Failed(_))
    }

    pub fn label(&self) -> String {
        match self {
            Status::Converged => "converged".into(),
            Status::ClampedTau => "clamped-tau".into(),
            Status::Failed(reason) => format!("failed:{reason}"),
        }
    }
}

/// Design outcome at one frequency. Failed records carry no weights and NaN
/// numeric fields.
#[derive(Debug, Clone)]
pub struct FrequencyRecord {
    pub frequency_hz: f64,
    pub weights: Vec<Complex64>,
    /// Achieved `10 log10 G(A, R, w)`.
    pub gdi_db: f64,
    /// GDI target actually imposed (constant-directivity modes only).
    pub tau_db: Option<f64>,
    /// Mode objective: the quotient for GRQ/GRPQ, `wᴴCw` for MECD, the
    /// penalized norm `yᴴy` for MSCD.
    pub objective: f64,
    pub iterations: usize,
    pub status: Status,
}

#[derive(Debug, Clone)]
pub struct DesignResult {
    pub mode: Mode,
    pub records: Vec<FrequencyRecord>,
}

impl DesignResult {
    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| !r.status.is_success()).count()
    }
}

/// Covariances and penalty weights at one frequency.
#[derive(Debug, Clone)]
pub struct FrequencyProblem {
    pub frequency_hz: f64,
    pub accept: HermitianMatrix,
    pub reject: HermitianMatrix,
    pub evaluate: HermitianMatrix,
    pub weights: PenaltyWeights,
}

impl FrequencyProblem {
    pub fn build(config: &DesignConfig, frequency_hz: f64) -> Result<Self> {
        Ok(Self {
            frequency_hz,
            accept: covariance_from_density(&config.array, frequency_hz, &config.accept)?,
            reject: with_ridge(covariance_from_density(&config.array, frequency_hz, &config.reject)?),
            evaluate: covariance_from_density(&config.array, frequency_hz, &config.evaluate)?,
            weights: config.penalty.weights_at(frequency_hz),
        })
    }
}

/// Adds `1e-10 × max diag` to the diagonal once if the matrix does not
/// factor.
fn with_ridge(r: HermitianMatrix) -> HermitianMatrix {
    match cholesky(&r) {
        Err(Error::NotPositiveDefinite { .. }) => r.shifted(RIDGE * r.max_diagonal()),
        _ => r,
    }
}

/// Runs the configured design over the whole grid. Individual frequencies
/// may fail; only a sweep in which every frequency fails is an error.
pub fn run_design(config: &DesignConfig) -> Result<DesignResult> {
    config.validate()?;
    let records: Vec<FrequencyRecord> = config
        .frequencies
        .par_iter()
        .map(|&f| design_frequency(config, f))
        .collect();
    if records.iter().all(|r| !r.status.is_success()) {
        return Err(Error::AllFrequenciesFailed);
    }
    Ok(DesignResult {
        mode: config.mode,
        records,
    })
}

/// Designs one frequency, turning errors into a failed record.
pub fn design_frequency(config: &DesignConfig, frequency_hz: f64) -> FrequencyRecord {
    let outcome = FrequencyProblem::build(config, frequency_hz).and_then(|p| solve(config, &p));
    outcome.unwrap_or_else(|e| FrequencyRecord {
        frequency_hz,
        weights: Vec::new(),
        gdi_db: f64::NAN,
        tau_db: None,
        objective: f64::NAN,
        iterations: 0,
        status: Status::Failed(failure_reason(&e).into()),
    })
}

/// Short machine-readable reason used in `failed:<reason>` statuses.
pub fn failure_reason(e: &Error) -> &'static str {
    match e {
        Error::InfeasibleTau { .. } => "infeasible-tau",
        Error::NotPositiveDefinite { .. } => "not-positive-definite",
        Error::AllPolesOneSign { .. } => "all-poles-one-sign",
        Error::ConstraintDegenerate => "degenerate-constraint",
        Error::SecularNoConvergence(_) => "secular-no-convergence",
        Error::EigenNoConvergence { .. } => "eigen-no-convergence",
        Error::Diverged { .. } => "diverged",
        Error::NonPositiveDenominator(_) => "nonpositive-denominator",
        _ => "error",
    }
}

fn gdi_db(p: &FrequencyProblem, w: &[Complex64]) -> Result<f64> {
    Ok(10.0 * gdi(&p.accept, &p.reject, w)?.log10())
}

/// Solves one frequency problem with the configured mode.
pub fn solve(config: &DesignConfig, p: &FrequencyProblem) -> Result<FrequencyRecord> {
    let record = |weights: Vec<Complex64>, tau_db, objective, iterations, status| -> Result<FrequencyRecord> {
        Ok(FrequencyRecord {
            frequency_hz: p.frequency_hz,
            gdi_db: gdi_db(p, &weights)?,
            weights,
            tau_db,
            objective,
            iterations,
            status,
        })
    };
    match config.mode {
        Mode::Grq => {
            let r = max_grq(&p.accept, &p.reject)?;
            record(r.weights, None, r.value, 1, Status::Converged)
        }
        Mode::Grpq => {
            let r = max_grpq(&p.accept, &p.reject, &p.weights)?;
            record(r.weights, None, r.value, 1, Status::Converged)
        }
        Mode::Mecd | Mode::Mscd => {
            let tau_db = config
                .tau_db
                .ok_or_else(|| Error::Config("tau_db is required".into()))?;
            let lambdas = p.weights.lambdas();
            let d = penalized_constraint(config.solver.tau_cap, p, tau_db)?;
            let clamped = if d.clamped() {
                Status::ClampedTau
            } else {
                Status::Converged
            };
            if config.mode == Mode::Mecd {
                let c = p.evaluate.diagonal_congruence(lambdas);
                let options = PaOptions {
                    alpha: config.solver.alpha,
                    max_iters: config.solver.max_iters,
                    tolerance: config.solver.tolerance,
                };
                let res = mecd_pa(&c, &d, options, None)?;
                let status = if res.converged {
                    clamped
                } else {
                    Status::Failed("max-iterations".into())
                };
                let w = scale(&res.weights, lambdas);
                record(w, Some(d.tau_db()), res.objective, res.iterations, status)
            } else {
                let c = steering_vector(&config.array, p.frequency_hz, &config.reference_direction())?.entries;
                let res = mscd_solve(&d, &scale(&c, lambdas))?;
                let w = scale(&res.weights, lambdas);
                record(w, Some(d.tau_db()), res.norm_sq, 1, clamped)
            }
        }
    }
}

/// `D = ΛAΛ − τ ΛRΛ`, with `τ` capped according to `cap`.
pub fn penalized_constraint(cap: TauCap, p: &FrequencyProblem, tau_db: f64) -> Result<ConstraintMatrix> {
    let (a, r) = (&p.accept, &p.reject);
    let d = match cap {
        TauCap::Off => build_constraint(a, r, tau_db)?,
        TauCap::Effective => build_constraint_capped(a, r, tau_db, max_grpq(a, r, &p.weights)?.value)?,
        TauCap::Unregularized => build_constraint_capped(a, r, tau_db, max_grq(a, r)?.value)?,
    };
    d.diagonal_congruence(p.weights.lambdas())
}

fn scale(x: &[Complex64], lambdas: &[f64]) -> Vec<Complex64> {
    x.iter().zip(lambdas).map(|(v, l)| v * *l).collect()
}
