//! Maximum-efficiency constant-directivity design
//!
//! ```text
//! maximize wᴴCw   subject to   wᴴw = 1,   wᴴDw = 0,   D = A − τR
//! ```
//!
//! [`mecd_pa`] alternates a gradient step on the objective with the
//! minimum-norm projection onto the quadric `wᴴDw = 0` and a renormalization.
//! [`mecd_dm`] is the differential-multipliers baseline that updates `w` and
//! the multiplier `λ` by plain gradient steps on the Lagrangian.

use num_complex::Complex64;
use serde::Serialize;

use crate::directivity::gdi;
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, fix_phase, generalized_eig, norm, norm_sqr, EigenDecomposition, HermitianMatrix};
use crate::secular::{build_secular, solve_secular, COEFF_DROP};

/// Relative margin kept from the ends of the generalized spectrum.
pub const FEASIBILITY_MARGIN: f64 = 1e-9;
/// Clamped targets sit this far (relatively) below the top of the spectrum.
pub const CLAMP_BACKOFF: f64 = 1e-6;
/// Size of the nudge applied when a point has no component on one side of
/// the quadric, relative to the point's norm.
pub const RECOVERY_NUDGE: f64 = 1e-6;

/// Linear GDI target from decibels.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `D = A − τR` together with its eigendecomposition and the inputs it came
/// from.
#[derive(Debug, Clone)]
pub struct ConstraintMatrix {
    a: HermitianMatrix,
    r: HermitianMatrix,
    d: HermitianMatrix,
    tau: f64,
    requested_tau: f64,
    feasible: (f64, f64),
    eig: EigenDecomposition,
}

impl ConstraintMatrix {
    pub fn d(&self) -> &HermitianMatrix {
        &self.d
    }

    pub fn a(&self) -> &HermitianMatrix {
        &self.a
    }

    pub fn r(&self) -> &HermitianMatrix {
        &self.r
    }

    pub fn eig(&self) -> &EigenDecomposition {
        &self.eig
    }

    pub fn n(&self) -> usize {
        self.d.n()
    }

    /// Linear target actually used.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn tau_db(&self) -> f64 {
        10.0 * self.tau.log10()
    }

    /// Linear target before any clamping.
    pub fn requested_tau(&self) -> f64 {
        self.requested_tau
    }

    pub fn clamped(&self) -> bool {
        self.tau != self.requested_tau
    }

    /// Smallest and largest generalized eigenvalues of `(A, R)`.
    pub fn feasible_range(&self) -> (f64, f64) {
        self.feasible
    }

    /// Spectral norm `‖D‖₂`.
    pub fn norm(&self) -> f64 {
        self.eig.spectral_norm()
    }

    /// `|wᴴDw| / (‖D‖ |w|²)`.
    pub fn residual(&self, w: &[Complex64]) -> f64 {
        self.d.quad_form(w).abs() / (self.norm() * norm_sqr(w))
    }

    pub fn gdi(&self, w: &[Complex64]) -> Result<f64> {
        gdi(&self.a, &self.r, w)
    }

    /// The same constraint in the coordinates `y = S⁻¹w` for a positive
    /// diagonal `S`: `SAS`, `SRS` and `SDS`. The generalized spectrum is
    /// unchanged by the congruence, so no new factorization of `SRS` is
    /// needed.
    pub fn diagonal_congruence(&self, s: &[f64]) -> Result<ConstraintMatrix> {
        if s.len() != self.n() {
            return Err(Error::Dimension(format!(
                "{} scale factors for {} transducers",
                s.len(),
                self.n()
            )));
        }
        if s.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidArgument("scale factors must be positive".into()));
        }
        let d = self.d.diagonal_congruence(s);
        let eig = eig_hermitian(&d)?;
        Ok(ConstraintMatrix {
            a: self.a.diagonal_congruence(s),
            r: self.r.diagonal_congruence(s),
            d,
            eig,
            ..self.clone()
        })
    }
}

/// Builds `D = A − τR` for `τ = 10^(tau_db/10)`, rejecting targets outside
/// the open generalized spectrum of `(A, R)`.
pub fn build_constraint(a: &HermitianMatrix, r: &HermitianMatrix, tau_db: f64) -> Result<ConstraintMatrix> {
    build(a, r, db_to_linear(tau_db), None)
}

/// Like [`build_constraint`], but lowers `τ` to `(1 − 1e-6) × cap` when it
/// exceeds that value. `cap` is normally the largest generalized eigenvalue
/// of `(A, R)` or of a related (e.g. regularized) pair.
pub fn build_constraint_capped(
    a: &HermitianMatrix,
    r: &HermitianMatrix,
    tau_db: f64,
    cap: f64,
) -> Result<ConstraintMatrix> {
    build(a, r, db_to_linear(tau_db), Some(cap))
}

/// Caps the target at the top of the pair's own generalized spectrum.
pub fn build_constraint_clamped(a: &HermitianMatrix, r: &HermitianMatrix, tau_db: f64) -> Result<ConstraintMatrix> {
    build(a, r, db_to_linear(tau_db), Some(f64::INFINITY))
}

fn build(a: &HermitianMatrix, r: &HermitianMatrix, requested_tau: f64, cap: Option<f64>) -> Result<ConstraintMatrix> {
    if a.n() != r.n() {
        return Err(Error::Dimension("accept and reject covariances differ in size".into()));
    }
    if !(requested_tau > 0.0) || !requested_tau.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "GDI target {requested_tau} must be positive and finite"
        )));
    }
    let g = generalized_eig(a, r)?;
    let (lo, hi) = (g.values()[0], g.values()[a.n() - 1]);
    let tau = match cap {
        Some(c) => {
            let limit = (1.0 - CLAMP_BACKOFF) * c.min(hi);
            requested_tau.min(limit)
        }
        None => requested_tau,
    };
    let margin = FEASIBILITY_MARGIN * lo.abs().max(hi.abs());
    if !(tau > lo + margin && tau < hi - margin) {
        return Err(Error::InfeasibleTau { tau, lo, hi });
    }
    let d = a.add_scaled(r, -tau);
    let eig = eig_hermitian(&d)?;
    Ok(ConstraintMatrix {
        a: a.clone(),
        r: r.clone(),
        d,
        tau,
        requested_tau,
        feasible: (lo, hi),
        eig,
    })
}

/// Minimum-norm step `v` onto the quadric `(w + v)ᴴD(w + v) = 0`.
#[derive(Debug, Clone)]
pub struct Projection {
    pub v: Vec<Complex64>,
    /// Multiplier of the projection problem (nearest-zero secular root).
    pub lambda: f64,
    /// Whether the one-sided input had to be nudged before solving.
    pub recovered: bool,
}

impl Projection {
    /// The projected point `w + v`.
    pub fn point(&self, w: &[Complex64]) -> Vec<Complex64> {
        w.iter().zip(&self.v).map(|(a, b)| a + b).collect()
    }
}

/// Projects `w` onto `xᴴDx = 0` with `w + v = V(I − λE)⁻¹Vᴴw`.
///
/// If `w` has no weight on one sign of the spectrum of `D`, it is nudged by
/// `1e-6 |w|` along the eigenvector of the opposite extreme eigenvalue and
/// solved once more; `v` is always measured from the original `w`.
pub fn project_onto_quadric(w: &[Complex64], d: &ConstraintMatrix) -> Result<Projection> {
    if w.len() != d.n() {
        return Err(Error::Dimension(format!(
            "vector of length {} for {} transducers",
            w.len(),
            d.n()
        )));
    }
    let w_norm = norm(w);
    if !(w_norm > 0.0) || !w_norm.is_finite() {
        return Err(Error::InvalidArgument(
            "cannot project a zero or non-finite vector".into(),
        ));
    }
    if d.d.quad_form(w).abs() <= 1e-15 * d.norm() * w_norm * w_norm {
        return Ok(Projection {
            v: vec![Complex64::new(0.0, 0.0); w.len()],
            lambda: 0.0,
            recovered: false,
        });
    }
    let eig = &d.eig;
    let u = eig.to_eigenbasis(w);
    match solve_in_eigenbasis(&u, &eig.values) {
        Ok((z, lambda)) => {
            let p = eig.from_eigenbasis(&z);
            Ok(Projection {
                v: difference(&p, w),
                lambda,
                recovered: false,
            })
        }
        Err(Error::AllPolesOneSign { .. }) => {
            // all weight on the positive side needs a negative-side component, and vice versa
            let k = if d.d.quad_form(w) > 0.0 { 0 } else { eig.len() - 1 };
            let mut nudged = u.clone();
            nudged[k] += RECOVERY_NUDGE * w_norm;
            let (z, lambda) = solve_in_eigenbasis(&nudged, &eig.values)?;
            let p = eig.from_eigenbasis(&z);
            Ok(Projection {
                v: difference(&p, w),
                lambda,
                recovered: true,
            })
        }
        Err(e) => Err(e),
    }
}

/// Returns `(I − λE)⁻¹u` and `λ`.
fn solve_in_eigenbasis(u: &[Complex64], e: &[f64]) -> Result<(Vec<Complex64>, f64)> {
    let problem = build_secular(u, e)?;
    let lambda = solve_secular(&problem)?.lambda_star;
    let u_max = u.iter().map(|x| x.norm_sqr()).fold(0.0, f64::max);
    let z = u
        .iter()
        .zip(e)
        .map(|(un, en)| {
            let denom = 1.0 - lambda * en;
            if un.norm_sqr() <= COEFF_DROP * u_max && denom.abs() < 1e-3 {
                Complex64::new(0.0, 0.0)
            } else {
                un / denom
            }
        })
        .collect();
    Ok((z, lambda))
}

fn difference(p: &[Complex64], w: &[Complex64]) -> Vec<Complex64> {
    p.iter().zip(w).map(|(a, b)| a - b).collect()
}

/// One row of a solver trace: objective `wᴴCw` and constraint residual
/// `|wᴴDw| / ‖D‖` after an iteration (iteration 0 is the starting point).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub objective: f64,
    pub residual: f64,
}

/// First iteration (≥ 1) whose constraint residual is at most `threshold`.
pub fn iterations_to_residual(trace: &[TraceEntry], threshold: f64) -> Option<usize> {
    trace
        .iter()
        .find(|t| t.iteration >= 1 && t.residual <= threshold)
        .map(|t| t.iteration)
}

#[derive(Debug, Clone)]
pub struct MecdResult {
    /// Unit-norm weights, phase-fixed.
    pub weights: Vec<Complex64>,
    pub objective: f64,
    pub gdi_achieved: f64,
    /// `μ = wᴴCw / wᴴw` at the final iterate.
    pub mu: f64,
    /// Last projection multiplier (PA) or the running multiplier (DM).
    pub lambda: f64,
    pub iterations: usize,
    pub converged: bool,
    pub recoveries: usize,
    pub trace: Vec<TraceEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaOptions {
    pub alpha: f64,
    pub max_iters: usize,
    /// Joint bound on the relative objective change and the constraint
    /// residual.
    pub tolerance: f64,
}

impl Default for PaOptions {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            max_iters: 100,
            tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmOptions {
    pub alpha_w: f64,
    pub alpha_lambda: f64,
    pub max_iters: usize,
    pub tolerance: f64,
}

impl Default for DmOptions {
    fn default() -> Self {
        Self {
            alpha_w: 1e-2,
            alpha_lambda: 1e-3,
            max_iters: 100,
            tolerance: 1e-10,
        }
    }
}

fn check_inputs(c: &HermitianMatrix, d: &ConstraintMatrix, w0: Option<&[Complex64]>) -> Result<Vec<Complex64>> {
    if c.n() != d.n() {
        return Err(Error::Dimension(
            "objective and constraint matrices differ in size".into(),
        ));
    }
    let start = match w0 {
        Some(w) if w.len() != d.n() => {
            return Err(Error::Dimension(format!(
                "initial vector of length {} for {} transducers",
                w.len(),
                d.n()
            )))
        }
        Some(w) => w.to_vec(),
        None => vec![Complex64::new(1.0, 0.0); d.n()],
    };
    let n = norm(&start);
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidArgument(
            "initial vector must be nonzero and finite".into(),
        ));
    }
    Ok(start.into_iter().map(|z| z / n).collect())
}

fn converged(prev: f64, cur: f64, residual: f64, tol: f64) -> bool {
    (cur - prev).abs() <= tol * cur.abs().max(f64::MIN_POSITIVE) && residual <= tol
}

#[allow(clippy::too_many_arguments)]
fn finish(
    c: &HermitianMatrix,
    d: &ConstraintMatrix,
    mut w: Vec<Complex64>,
    lambda: f64,
    iterations: usize,
    converged: bool,
    recoveries: usize,
    trace: Vec<TraceEntry>,
) -> Result<MecdResult> {
    fix_phase(&mut w);
    let mu = c.quad_form(&w) / norm_sqr(&w);
    Ok(MecdResult {
        objective: c.quad_form(&w),
        gdi_achieved: d.gdi(&w)?,
        weights: w,
        mu,
        lambda,
        iterations,
        converged,
        recoveries,
        trace,
    })
}

/// Projected ascent: `w* = w + αCw`, projection onto `wᴴDw = 0`, unit
/// normalization. `w0` defaults to the all-ones vector.
pub fn mecd_pa(
    c: &HermitianMatrix,
    d: &ConstraintMatrix,
    options: PaOptions,
    w0: Option<&[Complex64]>,
) -> Result<MecdResult> {
    if !(options.alpha > 0.0) {
        return Err(Error::InvalidArgument("step size must be positive".into()));
    }
    let mut w = check_inputs(c, d, w0)?;
    let mut objective = c.quad_form(&w);
    let mut trace = vec![TraceEntry {
        iteration: 0,
        objective,
        residual: d.residual(&w),
    }];
    let mut lambda = 0.0;
    let mut recoveries = 0;

    for k in 1..=options.max_iters {
        let cw = c.matvec(&w);
        let ascended: Vec<Complex64> = w.iter().zip(&cw).map(|(x, g)| x + g * options.alpha).collect();
        let projection = project_onto_quadric(&ascended, d)?;
        recoveries += projection.recovered as usize;
        lambda = projection.lambda;
        let p = projection.point(&ascended);
        let next = match crate::linalg::normalized(&p) {
            Some(x) => x,
            None => return Err(Error::Diverged { iteration: k, trace }),
        };
        let prev = objective;
        objective = c.quad_form(&next);
        let residual = d.residual(&next);
        trace.push(TraceEntry {
            iteration: k,
            objective,
            residual,
        });
        if !objective.is_finite() || !residual.is_finite() {
            return Err(Error::Diverged { iteration: k, trace });
        }
        w = next;
        if converged(prev, objective, residual, options.tolerance) {
            return finish(c, d, w, lambda, k, true, recoveries, trace);
        }
    }
    finish(c, d, w, lambda, options.max_iters, false, recoveries, trace)
}

/// Differential multipliers: with `μ_k = wᴴCw`, step
/// `w ← w + α_w (C − λD − μ_k I)w` and `λ ← λ + α_λ wᴴDw`, then renormalize.
pub fn mecd_dm(
    c: &HermitianMatrix,
    d: &ConstraintMatrix,
    options: DmOptions,
    w0: Option<&[Complex64]>,
) -> Result<MecdResult> {
    if options.alpha_w < 0.0 || options.alpha_lambda < 0.0 {
        return Err(Error::InvalidArgument("step sizes must be nonnegative".into()));
    }
    let mut w = check_inputs(c, d, w0)?;
    let mut objective = c.quad_form(&w);
    let mut trace = vec![TraceEntry {
        iteration: 0,
        objective,
        residual: d.residual(&w),
    }];
    let mut lambda = 0.0;

    for k in 1..=options.max_iters {
        let mu = objective;
        let cw = c.matvec(&w);
        let dw = d.d().matvec(&w);
        let constraint = d.d().quad_form(&w);
        let stepped: Vec<Complex64> = (0..w.len())
            .map(|i| w[i] + (cw[i] - dw[i] * lambda - w[i] * mu) * options.alpha_w)
            .collect();
        lambda += options.alpha_lambda * constraint;
        let next = match crate::linalg::normalized(&stepped) {
            Some(x) => x,
            None => return Err(Error::Diverged { iteration: k, trace }),
        };
        let prev = objective;
        objective = c.quad_form(&next);
        let residual = d.residual(&next);
        trace.push(TraceEntry {
            iteration: k,
            objective,
            residual,
        });
        if !objective.is_finite() || !residual.is_finite() || !lambda.is_finite() {
            return Err(Error::Diverged { iteration: k, trace });
        }
        w = next;
        if converged(prev, objective, residual, options.tolerance) {
            return finish(c, d, w, lambda, k, true, 0, trace);
        }
    }
    finish(c, d, w, lambda, options.max_iters, false, 0, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dot, ComplexMatrix};
    use crate::oracle;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn herm(n: usize, data: Vec<Complex64>) -> HermitianMatrix {
        HermitianMatrix::new(ComplexMatrix::from_row_major(n, n, data).unwrap()).unwrap()
    }

    fn diag_constraint(values: &[f64]) -> ConstraintMatrix {
        // A − τR with R = I, τ = 1 and A = diag(values + 1)
        let a: Vec<f64> = values.iter().map(|v| v + 1.0).collect();
        let m = build(
            &HermitianMatrix::from_diagonal(&a),
            &HermitianMatrix::identity(a.len()),
            1.0,
            None,
        )
        .unwrap();
        assert!(m.d().max_abs() > 0.0);
        m
    }

    fn random_instance(rng: &mut ChaCha8Rng, n: usize, tau_db: f64) -> (HermitianMatrix, ConstraintMatrix) {
        loop {
            let a = herm(n, oracle::random_psd(rng, n));
            let r = herm(n, oracle::random_psd(rng, n));
            if let Ok(d) = build_constraint(&a, &r, tau_db) {
                return (herm(n, oracle::random_psd(rng, n)), d);
            }
        }
    }

    #[test]
    fn build_constraint_example() {
        let a = HermitianMatrix::from_diagonal(&[2.0, 1.0]);
        let r = HermitianMatrix::identity(2);
        let d = build_constraint(&a, &r, 10.0 * 1.5f64.log10()).unwrap();
        assert!((d.d().get(0, 0).re - 0.5).abs() < 1e-12);
        assert!((d.d().get(1, 1).re + 0.5).abs() < 1e-12);
        assert!(d.eig().min() < 0.0 && d.eig().max() > 0.0);
        assert!(!d.clamped());
    }

    #[test]
    fn infeasible_target_is_rejected_and_clamped() {
        let a = HermitianMatrix::from_diagonal(&[2.0, 1.0]);
        let r = HermitianMatrix::identity(2);
        let tau_db = 10.0 * 2.1f64.log10();
        match build_constraint(&a, &r, tau_db) {
            Err(Error::InfeasibleTau { lo, hi, .. }) => assert!((lo - 1.0).abs() < 1e-12 && (hi - 2.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        let d = build_constraint_clamped(&a, &r, tau_db).unwrap();
        assert!(d.clamped());
        assert!((d.tau() - 2.0 * (1.0 - CLAMP_BACKOFF)).abs() < 1e-12);
        assert!(build_constraint_clamped(&a, &r, 10.0 * 0.5f64.log10()).is_err());
    }

    #[test]
    fn midpoint_target_gives_indefinite_constraint() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let a = herm(5, oracle::random_psd(&mut rng, 5));
            let r = herm(5, oracle::random_psd(&mut rng, 5));
            let g = generalized_eig(&a, &r).unwrap();
            let mid = 0.5 * (g.values()[0] + g.values()[4]);
            let d = build_constraint(&a, &r, 10.0 * mid.log10()).unwrap();
            let data: Vec<Complex64> = d.d().matrix().as_slice().to_vec();
            let (values, _) = oracle::hermitian_eigen(&data, 5);
            assert!(values[0] < 0.0 && values[4] > 0.0);
        }
    }

    #[test]
    fn congruence_preserves_gdi_of_mapped_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (_, d) = random_instance(&mut rng, 4, 1.0);
        let s = [1.0, 1e-3, 0.5, 1e-6];
        let scaled = d.diagonal_congruence(&s).unwrap();
        assert_eq!(scaled.tau(), d.tau());
        let y = oracle::random_complex(&mut rng, 4);
        let w: Vec<Complex64> = y.iter().zip(&s).map(|(a, b)| a * b).collect();
        assert!((scaled.gdi(&y).unwrap() - d.gdi(&w).unwrap()).abs() <= 1e-9 * d.gdi(&w).unwrap());
        assert!((scaled.d().quad_form(&y) - d.d().quad_form(&w)).abs() <= 1e-12 * d.norm() * norm_sqr(&w).max(1e-30));
    }

    #[test]
    fn feasible_point_is_left_alone() {
        let d = diag_constraint(&[1.0, -1.0]);
        let w = [c(0.6, 0.0), c(0.0, 0.6)];
        let p = project_onto_quadric(&w, &d).unwrap();
        assert_eq!(p.lambda, 0.0);
        assert!(p.v.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn one_sided_point_takes_recovery_path() {
        let d = diag_constraint(&[1.0, -1.0]);
        let w = [c(1.0, 0.0), c(0.0, 0.0)];
        let p = project_onto_quadric(&w, &d).unwrap();
        assert!(p.recovered);
        let x = p.point(&w);
        assert!(d.residual(&x) <= 1e-9);
    }

    #[test]
    fn two_dimensional_projection_matches_search() {
        let d = diag_constraint(&[1.0, -1.0]);
        let s3 = 3f64.sqrt();
        let w = [c(2f64.sqrt() / s3, 0.0), c(1.0 / s3, 0.0)];
        let p = project_onto_quadric(&w, &d).unwrap();
        let x = p.point(&w);
        assert!((x[0].norm() - x[1].norm()).abs() < 1e-12);

        // feasible points are (ρe^{iφ₁}, ρe^{iφ₂}); search phases on a grid
        // and ρ by golden section
        let mut best = (f64::INFINITY, [c(0.0, 0.0); 2]);
        for i in 0..24 {
            for j in 0..24 {
                let (e1, e2) = (
                    Complex64::from_polar(1.0, i as f64 * std::f64::consts::TAU / 24.0),
                    Complex64::from_polar(1.0, j as f64 * std::f64::consts::TAU / 24.0),
                );
                let f = |rho: f64| (e1 * rho - w[0]).norm_sqr() + (e2 * rho - w[1]).norm_sqr();
                let (mut lo, mut hi) = (0.0, 2.0);
                let g = (5f64.sqrt() - 1.0) / 2.0;
                for _ in 0..200 {
                    let (m1, m2) = (hi - g * (hi - lo), lo + g * (hi - lo));
                    if f(m1) < f(m2) {
                        hi = m2;
                    } else {
                        lo = m1;
                    }
                }
                let rho = 0.5 * (lo + hi);
                if f(rho) < best.0 {
                    best = (f(rho), [e1 * rho - w[0], e2 * rho - w[1]]);
                }
            }
        }
        for k in 0..2 {
            assert!((p.v[k] - best.1[k]).norm() < 1e-8, "{:?} vs {:?}", p.v, best.1);
        }
    }

    #[test]
    fn projection_is_no_longer_than_sampled_feasible_steps() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..5 {
            let (_, d) = random_instance(&mut rng, 4, 1.0);
            let w = oracle::random_complex(&mut rng, 4);
            let p = project_onto_quadric(&w, &d).unwrap();
            let v_norm = norm_sqr(&p.v);
            let data = d.d().matrix().as_slice().to_vec();
            let sampler = oracle::ConeSampler::new(&data, 4);
            let mut best = f64::INFINITY;
            for _ in 0..20_000 {
                if let Some(x) = sampler.sample(&mut rng) {
                    // best point on the ray through x: |w − t x|² minimized over complex t
                    let t = dot(&x, &w);
                    let diff: Vec<Complex64> = x.iter().zip(&w).map(|(xi, wi)| xi * t - wi).collect();
                    best = best.min(norm_sqr(&diff));
                }
            }
            assert!(v_norm <= best * (1.0 + 1e-9), "{v_norm} > {best}");
        }
    }

    #[test]
    fn identity_objective_converges_immediately() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (_, d) = random_instance(&mut rng, 4, 0.0);
        let id = HermitianMatrix::identity(4);
        let res = mecd_pa(&id, &d, PaOptions::default(), None).unwrap();
        assert!(res.converged);
        assert_eq!(res.iterations, 1);
        assert!((res.objective - 1.0).abs() < 1e-12 && (res.mu - 1.0).abs() < 1e-12);

        // the multiplier dynamics carry no damping here, so only μ ≡ 1 and a
        // bounded trace are expected
        let dm = mecd_dm(
            &id,
            &d,
            DmOptions {
                max_iters: 5_000,
                ..DmOptions::default()
            },
            None,
        )
        .unwrap();
        assert!(dm.trace.iter().all(|t| (t.objective - 1.0).abs() < 1e-12));
        assert!(dm.trace.iter().all(|t| t.residual.is_finite() && t.residual <= 1.0));
    }

    #[test]
    fn zero_steps_leave_dm_stationary() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (cm, d) = random_instance(&mut rng, 4, 0.0);
        let opts = DmOptions {
            alpha_w: 0.0,
            alpha_lambda: 0.0,
            max_iters: 10,
            tolerance: 1e-10,
        };
        let res = mecd_dm(&cm, &d, opts, None).unwrap();
        let r0 = res.trace[0].residual;
        assert!(res.trace.iter().all(|t| (t.residual - r0).abs() <= 1e-15 * r0.max(1.0)));
    }

    #[test]
    fn pa_feasible_after_first_iteration_and_hits_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let (cm, d) = random_instance(&mut rng, 8, 6.0);
            let res = mecd_pa(
                &cm,
                &d,
                PaOptions {
                    max_iters: 2000,
                    ..PaOptions::default()
                },
                None,
            )
            .unwrap();
            assert!(iterations_to_residual(&res.trace, 1e-6).unwrap() <= 10);
            assert!((norm_sqr(&res.weights) - 1.0).abs() <= 1e-12);
            assert!(d.d().quad_form(&res.weights).abs() <= 1e-8 * d.norm());
            assert!((10.0 * res.gdi_achieved.log10() - 6.0).abs() <= 0.01);
            assert!(res.converged);
        }
    }

    #[test]
    fn pa_objective_is_monotone_after_first_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let (cm, d) = random_instance(&mut rng, 6, 3.0);
            let res = mecd_pa(&cm, &d, PaOptions::default(), None).unwrap();
            for pair in res.trace[1..].windows(2) {
                assert!(pair[1].objective >= pair[0].objective - 1e-12 * pair[0].objective.abs().max(1.0));
            }
        }
    }

    /// Critical pairs `(v, λ)` of the projection problem from every real
    /// root of the secular polynomial.
    fn critical_pairs(d: &ConstraintMatrix, w: &[Complex64]) -> Vec<(Vec<Complex64>, f64)> {
        let data = d.d().matrix().as_slice().to_vec();
        let (e, vecs) = oracle::hermitian_eigen(&data, w.len());
        let u: Vec<Complex64> = vecs.iter().map(|col| dot(col, w)).collect();
        let a: Vec<f64> = u.iter().map(|x| x.norm_sqr()).collect();
        let b: Vec<f64> = e.iter().map(|x| 1.0 / x).collect();
        oracle::secular_real_roots(&a, &b)
            .into_iter()
            .map(|lam| {
                let mut v = vec![c(0.0, 0.0); w.len()];
                for (k, col) in vecs.iter().enumerate() {
                    let coef = u[k] * (lam * e[k] / (1.0 - lam * e[k]));
                    for i in 0..w.len() {
                        v[i] += col[i] * coef;
                    }
                }
                (v, lam)
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn critical_pair_identities(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 3 + (seed % 3) as usize;
            let (_, d) = random_instance(&mut rng, n, 0.0);
            let w = oracle::random_complex(&mut rng, n);
            let pairs = critical_pairs(&d, &w);
            prop_assume!(pairs.len() >= 2);
            let (v1, l1) = &pairs[0];
            let (v2, l2) = &pairs[pairs.len() - 1];
            let diff: Vec<Complex64> = v1.iter().zip(v2).map(|(a, b)| a - b).collect();
            let dd = d.d().quad_form(&diff);
            let (n1, n2) = (norm_sqr(v1), norm_sqr(v2));
            let scale = n1.max(n2).max(norm_sqr(&diff));
            prop_assert!(((l1 - l2) / 2.0 * dd - (n1 - n2)).abs() <= 1e-8 * scale);
            prop_assert!(((l1 + l2) / 2.0 * dd - norm_sqr(&diff)).abs() <= 1e-8 * scale);
            if l1 * l1 < l2 * l2 { prop_assert!(n1 <= n2 * (1.0 + 1e-9)); }
            if l2 * l2 < l1 * l1 { prop_assert!(n2 <= n1 * (1.0 + 1e-9)); }
        }

        #[test]
        fn projection_lands_on_quadric(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (_, d) = random_instance(&mut rng, 5, 0.0);
            let w = oracle::random_complex(&mut rng, 5);
            let p = project_onto_quadric(&w, &d).unwrap();
            let x = p.point(&w);
            prop_assert!(d.d().quad_form(&x).abs() <= 1e-9 * d.norm() * norm_sqr(&x));
            let pairs = critical_pairs(&d, &w);
            let nearest = pairs.iter().map(|(_, l)| l.abs()).fold(f64::INFINITY, f64::min);
            prop_assert!((p.lambda.abs() - nearest).abs() <= 1e-8 * (1.0 + nearest));
        }
    }
}
