//! Quadratic secular equation
//!
//! ```text
//! S(λ) = Σ_n a_n b_n / (λ − b_n)²,   a_n = |u_n|² ≥ 0,   b_n = 1/e_n
//! ```
//!
//! Both constant-directivity designs reduce to the root of `S` nearest zero.
//! Between the negative pole closest to zero `b₋` and the positive pole
//! closest to zero `b₊`, every term of `S` is increasing, `S(b₋⁺) = −∞` and
//! `S(b₊⁻) = +∞`, so that interval holds exactly one root. No root outside
//! it is closer to zero, which makes a safeguarded bracketing search on
//! `(b₋, b₊)` sufficient.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative threshold below which an eigenvalue contributes no pole.
pub const EIGEN_DROP: f64 = 1e-12;
/// Relative threshold below which a coefficient is dropped.
pub const COEFF_DROP: f64 = 1e-14;
/// Relative distance below which two poles are merged.
pub const POLE_MERGE: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 200;

const ENDPOINT_OFFSET: f64 = 1e-12;
const BRACKET_TOL: f64 = 1e-14;

/// Coefficient/pole pairs sorted by pole, with the bracket around zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SecularProblem {
    coeffs: Vec<f64>,
    poles: Vec<f64>,
    bracket_lo: f64,
    bracket_hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecularRoot {
    pub lambda_star: f64,
    /// `S(λ*)` at the returned root.
    pub residual: f64,
    pub iterations: usize,
}

impl SecularProblem {
    /// Builds the problem from raw `(a_n, b_n)` terms, dropping negligible
    /// coefficients and merging (numerically) repeated poles.
    pub fn from_terms(coeffs: &[f64], poles: &[f64]) -> Result<Self> {
        if coeffs.len() != poles.len() {
            return Err(Error::Dimension(format!(
                "{} coefficients for {} poles",
                coeffs.len(),
                poles.len()
            )));
        }
        if coeffs.iter().any(|a| !(*a >= 0.0) || !a.is_finite()) {
            return Err(Error::InvalidArgument(
                "secular coefficients must be finite and nonnegative".into(),
            ));
        }
        if poles.iter().any(|b| *b == 0.0 || !b.is_finite()) {
            return Err(Error::InvalidArgument(
                "secular poles must be finite and nonzero".into(),
            ));
        }
        let a_max = coeffs.iter().copied().fold(0.0, f64::max);
        let mut terms: Vec<(f64, f64)> = poles
            .iter()
            .zip(coeffs)
            .filter(|(_, &a)| a > COEFF_DROP * a_max)
            .map(|(&b, &a)| (b, a))
            .collect();
        terms.sort_by(|x, y| x.0.total_cmp(&y.0));

        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(terms.len());
        for (b, a) in terms {
            match merged.last_mut() {
                Some((lb, la)) if (b - *lb).abs() <= POLE_MERGE * b.abs().max(lb.abs()) => *la += a,
                _ => merged.push((b, a)),
            }
        }

        let negative = merged.iter().filter(|(b, _)| *b < 0.0).count();
        let positive = merged.len() - negative;
        if negative == 0 || positive == 0 {
            return Err(Error::AllPolesOneSign { negative, positive });
        }
        let bracket_lo = merged[negative - 1].0;
        let bracket_hi = merged[negative].0;
        let (poles, coeffs) = merged.into_iter().unzip();
        Ok(Self {
            coeffs,
            poles,
            bracket_lo,
            bracket_hi,
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn poles(&self) -> &[f64] {
        &self.poles
    }

    /// `(b₋, b₊)`.
    pub fn bracket(&self) -> (f64, f64) {
        (self.bracket_lo, self.bracket_hi)
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    fn eval_unchecked(&self, lambda: f64) -> (f64, f64, f64) {
        let mut s = 0.0;
        let mut ds = 0.0;
        let mut magnitude = 0.0;
        for (&a, &b) in self.coeffs.iter().zip(&self.poles) {
            let d = lambda - b;
            let t = a * b / (d * d);
            s += t;
            magnitude += t.abs();
            ds -= 2.0 * t / d;
        }
        (s, ds, magnitude)
    }
}

/// Secular problem for `u = Vᴴx` and eigenvalues `e` of an indefinite
/// Hermitian matrix. Terms with `|e_n| ≤ 1e-12 max|e|` contribute no pole.
pub fn build_secular(u: &[Complex64], e: &[f64]) -> Result<SecularProblem> {
    if u.len() != e.len() {
        return Err(Error::Dimension(format!(
            "{} coordinates for {} eigenvalues",
            u.len(),
            e.len()
        )));
    }
    let e_max = e.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let (coeffs, poles): (Vec<f64>, Vec<f64>) = u
        .iter()
        .zip(e)
        .filter(|(_, &en)| en.abs() > EIGEN_DROP * e_max)
        .map(|(un, &en)| (un.norm_sqr(), 1.0 / en))
        .unzip();
    SecularProblem::from_terms(&coeffs, &poles)
}

/// `S(λ)` and `S′(λ)` by direct summation.
pub fn eval_secular(p: &SecularProblem, lambda: f64) -> Result<(f64, f64)> {
    if p.poles.contains(&lambda) {
        return Err(Error::AtPole(lambda));
    }
    let (s, ds, _) = p.eval_unchecked(lambda);
    if !s.is_finite() || !ds.is_finite() {
        return Err(Error::AtPole(lambda));
    }
    Ok((s, ds))
}

/// Finds the unique root of `S` in `(b₋, b₊)` by Newton steps safeguarded
/// with bisection, followed by one polishing Newton step.
pub fn solve_secular(p: &SecularProblem) -> Result<SecularRoot> {
    let (b_lo, b_hi) = p.bracket();
    let width = b_hi - b_lo;

    let mut lo = match bracket_endpoint(p, b_lo, width, 1.0) {
        Endpoint::Inside(x) => x,
        Endpoint::Root(x) => return Ok(finish(p, x, 0)),
    };
    let mut hi = match bracket_endpoint(p, b_hi, width, -1.0) {
        Endpoint::Inside(x) => x,
        Endpoint::Root(x) => return Ok(finish(p, x, 0)),
    };

    let mut x = 0.0;
    let mut step_old = hi - lo;
    let mut step = step_old;
    for iteration in 1..=MAX_ITERATIONS {
        let (s, ds, magnitude) = p.eval_unchecked(x);
        if s == 0.0 {
            return Ok(SecularRoot {
                lambda_star: x,
                residual: 0.0,
                iterations: iteration,
            });
        }
        if s < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if s.abs() <= 4.0 * f64::EPSILON * magnitude || hi - lo <= BRACKET_TOL * width {
            return Ok(polish(p, x, lo, hi, iteration));
        }
        let newton = x - s / ds;
        let use_newton = ds > 0.0 && newton > lo && newton < hi && (2.0 * s).abs() <= (step_old * ds).abs();
        step_old = step;
        if use_newton {
            step = s / ds;
            x = newton;
            if step.abs() <= f64::EPSILON * x.abs() {
                return Ok(polish(p, x, lo, hi, iteration));
            }
        } else {
            step = 0.5 * (hi - lo);
            x = lo + step;
        }
    }
    Err(Error::SecularNoConvergence(MAX_ITERATIONS))
}

enum Endpoint {
    Inside(f64),
    Root(f64),
}

/// Moves `δ = 1e-12 × width` inside the bracket from `pole` (direction
/// `dir`), widening the offset while `S` overflows and narrowing it if the
/// sign is not yet the pole's (the root is then closer than `δ`).
fn bracket_endpoint(p: &SecularProblem, pole: f64, width: f64, dir: f64) -> Endpoint {
    let want_negative = dir > 0.0;
    let mut delta = ENDPOINT_OFFSET * width;
    for _ in 0..40 {
        let x = pole + dir * delta;
        let (s, _, _) = p.eval_unchecked(x);
        if !s.is_finite() {
            delta *= 10.0;
            continue;
        }
        if (want_negative && s < 0.0) || (!want_negative && s > 0.0) {
            return Endpoint::Inside(x);
        }
        let closer = pole + dir * delta * 0.1;
        if closer == pole || closer == x {
            return Endpoint::Root(x);
        }
        delta *= 0.1;
    }
    Endpoint::Root(pole + dir * delta)
}

fn polish(p: &SecularProblem, x: f64, lo: f64, hi: f64, iterations: usize) -> SecularRoot {
    let (s, ds, _) = p.eval_unchecked(x);
    if ds > 0.0 {
        let candidate = x - s / ds;
        if candidate >= lo && candidate <= hi {
            let (sc, _, _) = p.eval_unchecked(candidate);
            if sc.abs() < s.abs() {
                return SecularRoot {
                    lambda_star: candidate,
                    residual: sc,
                    iterations,
                };
            }
        }
    }
    SecularRoot {
        lambda_star: x,
        residual: s,
        iterations,
    }
}

fn finish(p: &SecularProblem, x: f64, iterations: usize) -> SecularRoot {
    let (s, _, _) = p.eval_unchecked(x);
    SecularRoot {
        lambda_star: x,
        residual: s,
        iterations,
    }
}
