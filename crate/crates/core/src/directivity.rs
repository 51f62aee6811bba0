//! Array geometry, steering vectors and direction-density covariances.
//!
//! Transducers are far-field monopoles with a smooth band-pass magnitude.
//! Covariances are weighted sums of steering-vector outer products over a
//! discrete direction density:
//!
//! ```text
//! A = Σ_k p_k d(r_k) d(r_k)ᴴ
//! ```
//!
//! The window shapes used for accept/reject densities are stand-ins: any
//! nonnegative weighting over directions can be supplied through
//! [`DirectionDensity::new`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, HermitianMatrix};

pub type Vec3 = [f64; 3];

const UNIT_TOL: f64 = 1e-12;

pub fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm3(a: &Vec3) -> f64 {
    dot3(a, a).sqrt()
}

/// Normalizes a direction; errors on the zero or non-finite vector.
pub fn unit3(a: &Vec3) -> Result<Vec3> {
    let n = norm3(a);
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidArgument(format!("direction {a:?} cannot be normalized")));
    }
    Ok([a[0] / n, a[1] / n, a[2] / n])
}

/// Horizontal-plane direction at `azimuth_deg` from +x toward +y.
pub fn horizontal_direction(azimuth_deg: f64) -> Vec3 {
    let phi = azimuth_deg.to_radians();
    [phi.cos(), phi.sin(), 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transducer {
    /// Position in meters.
    pub position: Vec3,
    pub band_low_hz: f64,
    pub band_high_hz: f64,
    pub sensitivity: f64,
    pub rolloff_order: u32,
}

impl Transducer {
    pub fn validate(&self) -> Result<()> {
        if self.position.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument("transducer position must be finite".into()));
        }
        if !(self.band_low_hz > 0.0 && self.band_low_hz < self.band_high_hz && self.band_high_hz.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "transducer band must satisfy 0 < low < high, got ({}, {})",
                self.band_low_hz, self.band_high_hz
            )));
        }
        if !(self.sensitivity > 0.0 && self.sensitivity.is_finite()) {
            return Err(Error::InvalidArgument("transducer sensitivity must be positive".into()));
        }
        if self.rolloff_order == 0 {
            return Err(Error::InvalidArgument("rolloff order must be at least 1".into()));
        }
        Ok(())
    }

    /// Real band-pass magnitude `g(f)`: a high-pass and a low-pass
    /// Butterworth-style section of order `k` at the band edges.
    pub fn magnitude(&self, frequency_hz: f64) -> f64 {
        let k = self.rolloff_order as i32;
        let lo = (frequency_hz / self.band_low_hz).powi(k);
        let hi = (frequency_hz / self.band_high_hz).powi(k);
        self.sensitivity * lo / (1.0 + lo * lo).sqrt() / (1.0 + hi * hi).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArraySpec {
    pub transducers: Vec<Transducer>,
    /// Meters per second.
    pub speed_of_sound: f64,
}

impl ArraySpec {
    pub const DEFAULT_SPEED_OF_SOUND: f64 = 343.0;

    pub fn new(transducers: Vec<Transducer>) -> Result<Self> {
        let spec = Self {
            transducers,
            speed_of_sound: Self::DEFAULT_SPEED_OF_SOUND,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.transducers.is_empty() {
            return Err(Error::InvalidArgument("array needs at least one transducer".into()));
        }
        if !(self.speed_of_sound > 0.0 && self.speed_of_sound.is_finite()) {
            return Err(Error::InvalidArgument("speed of sound must be positive".into()));
        }
        self.transducers.iter().try_for_each(Transducer::validate)
    }

    pub fn len(&self) -> usize {
        self.transducers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transducers.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    pub frequency_hz: f64,
    pub entries: Vec<Complex64>,
}

/// Free-field response `d_n = g_n(f) exp(+j 2π f (p_n · r) / c)`.
pub fn steering_vector(array: &ArraySpec, frequency_hz: f64, direction: &Vec3) -> Result<SteeringVector> {
    if !(frequency_hz > 0.0 && frequency_hz.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "frequency must be positive, got {frequency_hz}"
        )));
    }
    let n = norm3(direction);
    if !(n > 0.0) {
        return Err(Error::InvalidArgument("zero direction vector".into()));
    }
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "direction must be unit length, got |r| = {n}"
        )));
    }
    Ok(SteeringVector {
        frequency_hz,
        entries: steering_entries(array, frequency_hz, direction),
    })
}

fn steering_entries(array: &ArraySpec, frequency_hz: f64, direction: &Vec3) -> Vec<Complex64> {
    let k = 2.0 * PI * frequency_hz / array.speed_of_sound;
    array
        .transducers
        .iter()
        .map(|t| Complex64::from_polar(t.magnitude(frequency_hz), k * dot3(&t.position, direction)))
        .collect()
}

/// Weighted set of unit directions summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionDensity {
    samples: Vec<(Vec3, f64)>,
}

impl DirectionDensity {
    /// Normalizes nonnegative weights to unit sum and drops zero-weight
    /// samples.
    pub fn new(samples: Vec<(Vec3, f64)>) -> Result<Self> {
        let mut total = 0.0;
        for (dir, w) in &samples {
            if !(*w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "density weight {w} must be nonnegative"
                )));
            }
            if (norm3(dir) - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidArgument(format!("direction {dir:?} is not unit length")));
            }
            total += w;
        }
        if !(total > 0.0) {
            return Err(Error::InvalidArgument("density has no positive weight".into()));
        }
        let samples = samples
            .into_iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|(d, w)| (d, w / total))
            .collect();
        Ok(Self { samples })
    }

    pub fn single(direction: Vec3) -> Result<Self> {
        Self::new(vec![(unit3(&direction)?, 1.0)])
    }

    /// Convex combination of densities with the given relative weights.
    pub fn mixture(parts: &[(DirectionDensity, f64)]) -> Result<Self> {
        let total: f64 = parts.iter().map(|(_, w)| *w).sum();
        if parts.is_empty() || !(total > 0.0) {
            return Err(Error::InvalidArgument("empty mixture".into()));
        }
        let samples = parts
            .iter()
            .flat_map(|(d, w)| d.samples.iter().map(move |(dir, p)| (*dir, p * w / total)))
            .collect();
        Self::new(samples)
    }

    pub fn samples(&self) -> &[(Vec3, f64)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Weighted mean of the directions (not normalized).
    pub fn mean_direction(&self) -> Vec3 {
        let mut m = [0.0; 3];
        for (d, w) in &self.samples {
            for i in 0..3 {
                m[i] += d[i] * w;
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WindowKind {
    /// Full-sphere support weighted by `exp(κ (r·c − 1))`.
    VonmisesLike,
    /// Spherical cap of the given half-angle around the center, tilted by
    /// the same exponential factor when `κ > 0`.
    UniformCap { half_angle_deg: f64 },
    /// Uniform over the sphere; center and concentration are ignored.
    FullSphere,
}

/// Discretizes a direction window on an azimuth × polar-angle grid
/// (midpoint rule in polar angle, `sin θ` area weights).
pub fn density_from_window(
    kind: WindowKind,
    center: &Vec3,
    concentration: f64,
    n_azimuth: usize,
    n_elevation: usize,
) -> Result<DirectionDensity> {
    if n_azimuth == 0 || n_elevation == 0 {
        return Err(Error::InvalidArgument("grid sizes must be at least 1".into()));
    }
    if !(concentration >= 0.0) || !concentration.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "concentration {concentration} must be nonnegative"
        )));
    }
    let center = match kind {
        WindowKind::FullSphere => [0.0, 0.0, 1.0],
        _ => unit3(center)?,
    };
    let cap_cos = match kind {
        WindowKind::UniformCap { half_angle_deg } => {
            if !(half_angle_deg > 0.0 && half_angle_deg <= 180.0) {
                return Err(Error::InvalidArgument(format!(
                    "cap half-angle {half_angle_deg} outside (0, 180]"
                )));
            }
            Some(half_angle_deg.to_radians().cos())
        }
        _ => None,
    };
    let kappa = if matches!(kind, WindowKind::FullSphere) {
        0.0
    } else {
        concentration
    };

    let mut samples = Vec::with_capacity(n_azimuth * n_elevation);
    for j in 0..n_elevation {
        let theta = (j as f64 + 0.5) * PI / n_elevation as f64;
        let (st, ct) = theta.sin_cos();
        for i in 0..n_azimuth {
            let phi = 2.0 * PI * i as f64 / n_azimuth as f64;
            let (sp, cp) = phi.sin_cos();
            let dir = [st * cp, st * sp, ct];
            let cos_c = dot3(&dir, &center);
            if let Some(cc) = cap_cos {
                if cos_c < cc - UNIT_TOL {
                    continue;
                }
            }
            samples.push((dir, st * (kappa * (cos_c - 1.0)).exp()));
        }
    }
    if samples.is_empty() {
        return Err(Error::InvalidArgument(
            "window support contains no grid directions".into(),
        ));
    }
    DirectionDensity::new(samples)
}

/// `Σ_k p_k d(r_k) d(r_k)ᴴ`.
pub fn covariance_from_density(
    array: &ArraySpec,
    frequency_hz: f64,
    density: &DirectionDensity,
) -> Result<HermitianMatrix> {
    if density.is_empty() {
        return Err(Error::InvalidArgument("empty density".into()));
    }
    if !(frequency_hz > 0.0 && frequency_hz.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "frequency must be positive, got {frequency_hz}"
        )));
    }
    let vectors: Vec<(f64, Vec<Complex64>)> = density
        .samples()
        .iter()
        .map(|(dir, w)| (*w, steering_entries(array, frequency_hz, dir)))
        .collect();
    Ok(HermitianMatrix::from_weighted_outer_products(
        array.len(),
        vectors.iter().map(|(w, d)| (*w, d.as_slice())),
    ))
}

/// Generalized directivity index `wᴴAw / wᴴRw` (linear).
pub fn gdi(a: &HermitianMatrix, r: &HermitianMatrix, w: &[Complex64]) -> Result<f64> {
    if a.n() != w.len() || r.n() != w.len() {
        return Err(Error::Dimension(format!(
            "weights of length {} for {}x{} matrices",
            w.len(),
            a.n(),
            a.n()
        )));
    }
    let den = dot(w, &r.matvec(w)).re;
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::NonPositiveDenominator(den));
    }
    Ok(dot(w, &a.matvec(w)).re / den)
}

/// `10 log10(x)`, floored at `floor_db`.
pub fn to_db(x: f64, floor_db: f64) -> f64 {
    if x > 0.0 {
        (10.0 * x.log10()).max(floor_db)
    } else {
        floor_db
    }
}
