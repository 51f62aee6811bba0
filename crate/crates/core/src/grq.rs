//! Maximum generalized Rayleigh quotient and its penalized variant.
//!
//! The penalized quotient adds a diagonal electrical-power term `ΓΣ` to the
//! reject covariance, with `Γ = diag(diag(R))`. It is parametrized by the
//! bounded weights `λ_n = (1 + σ_n)^{-1/2}` so that, with `w = Λy`,
//!
//! ```text
//! wᴴAw / wᴴ(R + ΓΣ)w  =  yᴴ ΛAΛ y / yᴴ R̂ y,    R̂ = Γ + Λ(R − Γ)Λ
//! ```
//!
//! and the maximizer is found as an ordinary generalized eigenproblem on
//! `(ΛAΛ, R̂)`. Driving `λ_n` toward zero suppresses transducer `n`.

use num_complex::Complex64;

use crate::directivity::to_db;
use crate::error::{Error, Result};
use crate::linalg::{generalized_eig, HermitianMatrix};

/// Smallest accepted penalty weight; exact zero would make `Λ` singular.
pub const MIN_PENALTY_WEIGHT: f64 = 1e-6;

/// Per-transducer weights `λ_n ∈ [1e-6, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyWeights(Vec<f64>);

impl PenaltyWeights {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::InvalidArgument("empty penalty weights".into()));
        }
        for &l in &lambdas {
            if !(MIN_PENALTY_WEIGHT..=1.0).contains(&l) {
                return Err(Error::InvalidArgument(format!(
                    "penalty weight {l} outside [{MIN_PENALTY_WEIGHT}, 1]"
                )));
            }
        }
        Ok(Self(lambdas))
    }

    /// No penalty: `Λ = I`.
    pub fn unit(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    /// From the unbounded penalties `σ_n ≥ 0`.
    pub fn from_sigmas(sigmas: &[f64]) -> Result<Self> {
        if sigmas.iter().any(|s| !(*s >= 0.0)) {
            return Err(Error::InvalidArgument("penalties must be nonnegative".into()));
        }
        Self::new(sigmas.iter().map(|s| (1.0 + s).powf(-0.5)).collect())
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.0
    }

    /// `σ_n = λ_n⁻² − 1`.
    pub fn sigmas(&self) -> Vec<f64> {
        self.0.iter().map(|l| l.powi(-2) - 1.0).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct GrqResult {
    pub weights: Vec<Complex64>,
    pub value: f64,
    pub value_db: f64,
}

/// Maximizes `wᴴAw / wᴴRw`; the weights are normalized to `wᴴRw = 1`.
pub fn max_grq(a: &HermitianMatrix, r: &HermitianMatrix) -> Result<GrqResult> {
    let g = generalized_eig(a, r)?;
    let top = a.n() - 1;
    let value = g.values()[top];
    Ok(GrqResult {
        weights: g.vectors.column(top),
        value,
        value_db: to_db(value, f64::NEG_INFINITY),
    })
}

/// Returns `(Γ, R̂)` with `Γ = diag(diag(R))` and `R̂ = Γ + Λ(R − Γ)Λ`.
pub fn build_penalty(r: &HermitianMatrix, weights: &PenaltyWeights) -> Result<(HermitianMatrix, HermitianMatrix)> {
    if weights.len() != r.n() {
        return Err(Error::Dimension(format!(
            "{} penalty weights for {} transducers",
            weights.len(),
            r.n()
        )));
    }
    let diag = r.diagonal();
    if let Some(bad) = diag.iter().find(|d| !(**d > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "reject covariance has nonpositive diagonal entry {bad}"
        )));
    }
    let gamma = HermitianMatrix::from_diagonal(&diag);
    // off-diagonals scale by λ_i λ_j, the diagonal stays exactly diag(R)
    let mut r_hat = r.diagonal_congruence(weights.lambdas()).into_matrix();
    for (i, &d) in diag.iter().enumerate() {
        r_hat[(i, i)] = Complex64::new(d, 0.0);
    }
    Ok((gamma, HermitianMatrix::new(r_hat)?))
}

/// The penalized reject covariance `R + ΓΣ` in the original coordinates.
pub fn penalized_reject(r: &HermitianMatrix, weights: &PenaltyWeights) -> Result<HermitianMatrix> {
    let (gamma, _) = build_penalty(r, weights)?;
    let penalty: Vec<f64> = gamma
        .diagonal()
        .iter()
        .zip(weights.sigmas())
        .map(|(g, s)| g * s)
        .collect();
    Ok(r.add_scaled(&HermitianMatrix::from_diagonal(&penalty), 1.0))
}

/// Maximizes the penalized quotient `wᴴAw / wᴴ(R + ΓΣ)w`.
///
/// The returned weights are `w = Λy*` with `y*ᴴ R̂ y* = 1`, which is the
/// same as `wᴴ(R + ΓΣ)w = 1`.
pub fn max_grpq(a: &HermitianMatrix, r: &HermitianMatrix, weights: &PenaltyWeights) -> Result<GrqResult> {
    if a.n() != r.n() {
        return Err(Error::Dimension("accept and reject covariances differ in size".into()));
    }
    let (_, r_hat) = build_penalty(r, weights)?;
    let a_scaled = a.diagonal_congruence(weights.lambdas());
    let y = max_grq(&a_scaled, &r_hat)?;
    let w = y.weights.iter().zip(weights.lambdas()).map(|(yi, l)| yi * *l).collect();
    Ok(GrqResult {
        weights: w,
        value: y.value,
        value_db: y.value_db,
    })
}

/// Penalty weights interpolated over frequency from `(frequency_hz, λ)`
/// breakpoints, linearly in `λ` against log-frequency and held constant
/// outside the breakpoint range.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltySchedule {
    per_transducer: Vec<Vec<(f64, f64)>>,
}

impl PenaltySchedule {
    pub fn new(per_transducer: Vec<Vec<(f64, f64)>>) -> Result<Self> {
        for points in &per_transducer {
            for w in points.windows(2) {
                if !(w[0].0 < w[1].0) {
                    return Err(Error::InvalidArgument(
                        "penalty breakpoints must be strictly increasing".into(),
                    ));
                }
            }
            for &(f, l) in points {
                if !(f > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "penalty breakpoint frequency {f} must be positive"
                    )));
                }
                if !(MIN_PENALTY_WEIGHT..=1.0).contains(&l) {
                    return Err(Error::InvalidArgument(format!(
                        "penalty weight {l} outside [{MIN_PENALTY_WEIGHT}, 1]"
                    )));
                }
            }
        }
        Ok(Self { per_transducer })
    }

    /// No penalty at any frequency.
    pub fn unit(n: usize) -> Self {
        Self {
            per_transducer: vec![Vec::new(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.per_transducer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_transducer.is_empty()
    }

    pub fn weights_at(&self, frequency_hz: f64) -> PenaltyWeights {
        let lf = frequency_hz.ln();
        let lambdas = self
            .per_transducer
            .iter()
            .map(|points| match points.as_slice() {
                [] => 1.0,
                [(_, l)] => *l,
                pts => {
                    if frequency_hz <= pts[0].0 {
                        return pts[0].1;
                    }
                    if frequency_hz >= pts[pts.len() - 1].0 {
                        return pts[pts.len() - 1].1;
                    }
                    let k = pts.partition_point(|(f, _)| *f <= frequency_hz);
                    let (f0, l0) = pts[k - 1];
                    let (f1, l1) = pts[k];
                    let t = (lf - f0.ln()) / (f1.ln() - f0.ln());
                    l0 + t * (l1 - l0)
                }
            })
            .collect();
        PenaltyWeights(lambdas)
    }
}
