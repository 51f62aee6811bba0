//! Projected ascent against differential multipliers on random instances.
//!
//! Each trial draws `A`, `R`, `C` as `MᴴM` for complex Gaussian `M` from its
//! own ChaCha stream (`seed`, stream = trial index), so trials are
//! independent of scheduling and the whole table is reproducible.

use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix};
use crate::mecd::{
    build_constraint, iterations_to_residual, mecd_dm, mecd_pa, ConstraintMatrix, DmOptions, PaOptions, TraceEntry,
};

use super::config::BenchmarkSettings;
use super::export::create;

pub const BENCHMARK_FILE: &str = "benchmark.csv";
pub const BENCHMARK_SUMMARY_FILE: &str = "benchmark_summary.csv";

/// Draws with an infeasible target before giving up on a trial.
pub const MAX_REDRAWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Pa,
    Dm,
}

impl Solver {
    pub fn as_str(self) -> &'static str {
        match self {
            Solver::Pa => "pa",
            Solver::Dm => "dm",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverRun {
    pub trace: Vec<TraceEntry>,
    /// First iteration whose constraint residual reached the threshold.
    pub iterations_to_residual: Option<usize>,
    pub final_objective: f64,
    pub diverged: bool,
}

#[derive(Debug, Clone)]
pub struct BenchmarkTrial {
    pub trial: usize,
    pub pa: SolverRun,
    pub dm: SolverRun,
}

#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    pub settings: BenchmarkSettings,
    pub trials: Vec<BenchmarkTrial>,
}

impl BenchmarkReport {
    /// Median iterations-to-residual; runs that never reach the threshold
    /// count as the solver's iteration cap plus one.
    pub fn median_iterations(&self, solver: Solver) -> f64 {
        let cap = match solver {
            Solver::Pa => self.settings.pa_max_iters,
            Solver::Dm => self.settings.dm_max_iters,
        };
        let mut counts: Vec<usize> = self
            .trials
            .iter()
            .map(|t| match solver {
                Solver::Pa => &t.pa,
                Solver::Dm => &t.dm,
            })
            .map(|run| run.iterations_to_residual.unwrap_or(cap + 1))
            .collect();
        counts.sort_unstable();
        let m = counts.len();
        if m % 2 == 1 {
            counts[m / 2] as f64
        } else {
            0.5 * (counts[m / 2 - 1] + counts[m / 2]) as f64
        }
    }
}

/// `MᴴM` for an `n × n` complex Gaussian `M` with unit-variance entries.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianMatrix {
    let data: Vec<Complex64> = (0..n * n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        })
        .collect();
    let m = ComplexMatrix::from_row_major(n, n, data).expect("finite Gaussian draws");
    HermitianMatrix::new(m.conj_transpose().matmul(&m)).expect("Gram matrix is Hermitian")
}

/// Draws `(A, R, C)` until `tau_db` lies inside the generalized spectrum of
/// `(A, R)`; returns `C` and the constraint.
pub fn random_instance<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    tau_db: f64,
) -> Result<(HermitianMatrix, ConstraintMatrix)> {
    let mut last = None;
    for _ in 0..MAX_REDRAWS {
        let a = random_psd(rng, n);
        let r = random_psd(rng, n);
        let c = random_psd(rng, n);
        match build_constraint(&a, &r, tau_db) {
            Ok(d) => return Ok((c, d)),
            Err(e @ (Error::InfeasibleTau { .. } | Error::NotPositiveDefinite { .. })) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one draw"))
}

/// Generator for one trial: the run seed with the trial index as stream.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn run_solver(result: Result<crate::mecd::MecdResult>, threshold: f64) -> Result<SolverRun> {
    match result {
        Ok(r) => Ok(SolverRun {
            iterations_to_residual: iterations_to_residual(&r.trace, threshold),
            final_objective: r.objective,
            trace: r.trace,
            diverged: false,
        }),
        Err(Error::Diverged { trace, .. }) => Ok(SolverRun {
            iterations_to_residual: iterations_to_residual(&trace, threshold),
            final_objective: f64::NAN,
            trace,
            diverged: true,
        }),
        Err(e) => Err(e),
    }
}

/// Runs PA (`w₀ = 1`) and DM on the same instances.
pub fn run_benchmark(settings: &BenchmarkSettings) -> Result<BenchmarkReport> {
    settings.validate()?;
    let pa_options = PaOptions {
        alpha: settings.alpha,
        max_iters: settings.pa_max_iters,
        tolerance: 1e-10,
    };
    let dm_options = DmOptions {
        alpha_w: settings.alpha_w,
        alpha_lambda: settings.alpha_lambda,
        max_iters: settings.dm_max_iters,
        tolerance: 1e-10,
    };
    let trials = (0..settings.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(settings.seed, trial);
            let (c, d) = random_instance(&mut rng, settings.n, settings.tau_db)?;
            Ok(BenchmarkTrial {
                trial,
                pa: run_solver(mecd_pa(&c, &d, pa_options, None), settings.residual)?,
                dm: run_solver(mecd_dm(&c, &d, dm_options, None), settings.residual)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchmarkReport {
        settings: settings.clone(),
        trials,
    })
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

/// Full traces: `trial, solver, iteration, objective, residual`.
pub fn write_benchmark_csv<W: Write>(report: &BenchmarkReport, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["trial", "solver", "iteration", "objective", "residual"])?;
    for t in &report.trials {
        for (solver, run) in [(Solver::Pa, &t.pa), (Solver::Dm, &t.dm)] {
            for e in &run.trace {
                w.write_record([
                    t.trial.to_string(),
                    solver.as_str().to_string(),
                    e.iteration.to_string(),
                    format!("{}", e.objective),
                    format!("{}", e.residual),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// One row per trial and solver with the iterations-to-residual count
/// (empty when never reached).
pub fn write_benchmark_summary_csv<W: Write>(report: &BenchmarkReport, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record([
        "trial",
        "solver",
        "iterations_to_residual",
        "final_objective",
        "diverged",
    ])?;
    for t in &report.trials {
        for (solver, run) in [(Solver::Pa, &t.pa), (Solver::Dm, &t.dm)] {
            w.write_record([
                t.trial.to_string(),
                solver.as_str().to_string(),
                run.iterations_to_residual.map(|k| k.to_string()).unwrap_or_default(),
                format!("{}", run.final_objective),
                run.diverged.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes `benchmark.csv` and `benchmark_summary.csv` into `dir`.
pub fn write_benchmark_outputs(report: &BenchmarkReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let (f, traces) = create(dir, BENCHMARK_FILE)?;
    write_benchmark_csv(report, f)?;
    let (f, summary) = create(dir, BENCHMARK_SUMMARY_FILE)?;
    write_benchmark_summary_csv(report, f)?;
    Ok(vec![traces, summary])
}
