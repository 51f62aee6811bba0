//! TOML configuration for design sweeps, beam patterns and benchmarks.
//!
//! The schema is versioned through `schema_version` (currently 1). Frequency
//! values may be numbers or strings with an SI suffix (`"1k"`, `"2.5kHz"`,
//! `"20k"`). See `configs/three_way.toml` for a complete example.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::directivity::{density_from_window, unit3, ArraySpec, DirectionDensity, Transducer, Vec3, WindowKind};
use crate::error::{Error, Result};
use crate::grq::PenaltySchedule;

pub const SCHEMA_VERSION: u32 = 1;

/// Which design to run at every frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Grq,
    Grpq,
    Mecd,
    Mscd,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Grq => "grq",
            Mode::Grpq => "grpq",
            Mode::Mecd => "mecd",
            Mode::Mscd => "mscd",
        }
    }

    pub fn needs_tau(self) -> bool {
        matches!(self, Mode::Mecd | Mode::Mscd)
    }
}

/// Spectrum whose top eigenvalue caps the GDI target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TauCap {
    /// Maximum penalized quotient (GRPQ) at that frequency.
    Effective,
    /// Maximum unpenalized quotient (GRQ).
    Unregularized,
    /// No cap: targets outside the feasible range fail.
    Off,
}

/// A frequency written as a number or as a string such as `"1.5k"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum FrequencyValue {
    Hz(f64),
    Text(String),
}

impl FrequencyValue {
    pub fn hz(&self) -> Result<f64> {
        match self {
            FrequencyValue::Hz(x) => Ok(*x),
            FrequencyValue::Text(s) => parse_frequency(s),
        }
    }
}

/// Parses `"100"`, `"1k"`, `"2.5 kHz"`, `"1M"`.
pub fn parse_frequency(text: &str) -> Result<f64> {
    let t = text.trim();
    let t = t
        .strip_suffix("Hz")
        .or_else(|| t.strip_suffix("hz"))
        .unwrap_or(t)
        .trim_end();
    let (number, scale) = match t.chars().last() {
        Some('k') | Some('K') => (&t[..t.len() - 1], 1e3),
        Some('M') => (&t[..t.len() - 1], 1e6),
        _ => (t, 1.0),
    };
    let value: f64 = number
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse frequency {text:?}")))?;
    Ok(value * scale)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: u32,
    mode: Option<Mode>,
    tau_db: Option<f64>,
    #[serde(default)]
    seed: u64,
    frequency_grid: Option<RawGrid>,
    array: Option<RawArray>,
    #[serde(default)]
    densities: BTreeMap<String, toml::Value>,
    #[serde(default)]
    solver: RawSolver,
    #[serde(default)]
    beampattern: RawBeampattern,
    #[serde(default)]
    benchmark: RawBenchmark,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    start: Option<FrequencyValue>,
    stop: Option<FrequencyValue>,
    points: Option<usize>,
    points_per_octave: Option<f64>,
    list: Option<Vec<FrequencyValue>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArray {
    speed_of_sound: Option<f64>,
    transducers: Vec<RawTransducer>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransducer {
    name: Option<String>,
    position: Vec3,
    band_low_hz: FrequencyValue,
    band_high_hz: FrequencyValue,
    #[serde(default = "one")]
    sensitivity: f64,
    #[serde(default = "two")]
    rolloff_order: u32,
    #[serde(default)]
    penalty: Vec<(FrequencyValue, f64)>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWindow {
    kind: String,
    center: Option<Vec3>,
    #[serde(default)]
    azimuth_deg: f64,
    #[serde(default)]
    elevation_deg: f64,
    #[serde(default)]
    concentration: f64,
    half_angle_deg: Option<f64>,
    #[serde(default = "default_n_azimuth")]
    n_azimuth: usize,
    #[serde(default = "default_n_elevation")]
    n_elevation: usize,
    #[serde(default = "one")]
    weight: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    alpha: Option<f64>,
    max_iters: Option<usize>,
    tolerance: Option<f64>,
    tau_cap: Option<TauCap>,
    reference_azimuth_deg: Option<f64>,
    reference_elevation_deg: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBeampattern {
    resolution_deg: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBenchmark {
    n: Option<usize>,
    trials: Option<usize>,
    tau_db: Option<f64>,
    residual: Option<f64>,
    pa_max_iters: Option<usize>,
    dm_max_iters: Option<usize>,
    alpha: Option<f64>,
    alpha_w: Option<f64>,
    alpha_lambda: Option<f64>,
}

fn one() -> f64 {
    1.0
}

fn two() -> u32 {
    2
}

fn default_n_azimuth() -> usize {
    72
}

fn default_n_elevation() -> usize {
    19
}

/// Solver settings shared by the design modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    pub alpha: f64,
    pub max_iters: usize,
    pub tolerance: f64,
    pub tau_cap: TauCap,
    /// Direction of the distortionless constraint; `None` uses the accept
    /// density's mean direction.
    pub reference: Option<Vec3>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            max_iters: 100,
            tolerance: 1e-10,
            tau_cap: TauCap::Effective,
            reference: None,
        }
    }
}

/// Random-instance solver comparison settings.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSettings {
    pub n: usize,
    pub trials: usize,
    pub tau_db: f64,
    pub seed: u64,
    /// Constraint residual that counts as reached.
    pub residual: f64,
    pub pa_max_iters: usize,
    pub dm_max_iters: usize,
    pub alpha: f64,
    pub alpha_w: f64,
    pub alpha_lambda: f64,
}

impl Default for BenchmarkSettings {
    fn default() -> Self {
        Self {
            n: 8,
            trials: 100,
            tau_db: 6.0,
            seed: 0,
            residual: 1e-6,
            pa_max_iters: 100,
            dm_max_iters: 2000,
            alpha: 1.0,
            alpha_w: 1e-2,
            alpha_lambda: 1e-3,
        }
    }
}

impl BenchmarkSettings {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config("benchmark needs n >= 2".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("benchmark needs at least one trial".into()));
        }
        if !(self.alpha > 0.0) || !(self.alpha_w >= 0.0) || !(self.alpha_lambda >= 0.0) {
            return Err(Error::Config("benchmark step sizes must be positive".into()));
        }
        if !self.tau_db.is_finite() || !(self.residual > 0.0) {
            return Err(Error::Config(
                "benchmark tau_db and residual must be finite and positive".into(),
            ));
        }
        Ok(())
    }
}

/// Validated design configuration.
#[derive(Debug, Clone)]
pub struct DesignConfig {
    pub array: ArraySpec,
    pub transducer_names: Vec<String>,
    pub accept: DirectionDensity,
    pub reject: DirectionDensity,
    pub evaluate: DirectionDensity,
    pub penalty: PenaltySchedule,
    pub frequencies: Vec<f64>,
    pub mode: Mode,
    pub tau_db: Option<f64>,
    pub solver: SolverSettings,
    pub seed: u64,
    pub resolution_deg: f64,
    pub benchmark: BenchmarkSettings,
}

impl DesignConfig {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        resolve(raw)
    }

    /// Checks mode-dependent requirements.
    pub fn validate(&self) -> Result<()> {
        if self.mode.needs_tau() && self.tau_db.is_none() {
            return Err(Error::Config(format!("mode {} requires tau_db", self.mode.as_str())));
        }
        if let Some(t) = self.tau_db {
            if !t.is_finite() {
                return Err(Error::Config("tau_db must be finite".into()));
            }
        }
        validate_grid(&self.frequencies)?;
        if !(self.resolution_deg > 0.0 && self.resolution_deg <= 360.0) {
            return Err(Error::Config(
                "beampattern resolution must be in (0, 360] degrees".into(),
            ));
        }
        if !(self.solver.alpha > 0.0) || self.solver.max_iters == 0 || !(self.solver.tolerance > 0.0) {
            return Err(Error::Config(
                "solver alpha, max_iters and tolerance must be positive".into(),
            ));
        }
        self.benchmark.validate()
    }

    /// Unit direction of the distortionless constraint.
    pub fn reference_direction(&self) -> Vec3 {
        if let Some(r) = self.solver.reference {
            return r;
        }
        unit3(&self.accept.mean_direction()).unwrap_or([1.0, 0.0, 0.0])
    }
}

fn validate_grid(frequencies: &[f64]) -> Result<()> {
    if frequencies.is_empty() {
        return Err(Error::Config("frequency grid is empty".into()));
    }
    if frequencies.iter().any(|f| !(*f > 0.0) || !f.is_finite()) {
        return Err(Error::Config("frequencies must be positive and finite".into()));
    }
    if frequencies.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::Config("frequency grid must be strictly increasing".into()));
    }
    Ok(())
}

fn resolve(raw: RawConfig) -> Result<DesignConfig> {
    if raw.schema_version != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            raw.schema_version
        )));
    }
    let grid = raw
        .frequency_grid
        .ok_or_else(|| Error::Config("missing [frequency_grid]".into()))?;
    let frequencies = resolve_grid(&grid)?;
    let raw_array = raw.array.ok_or_else(|| Error::Config("missing [array]".into()))?;

    let mut transducers = Vec::new();
    let mut names = Vec::new();
    let mut breakpoints = Vec::new();
    for (i, t) in raw_array.transducers.iter().enumerate() {
        transducers.push(Transducer {
            position: t.position,
            band_low_hz: t.band_low_hz.hz()?,
            band_high_hz: t.band_high_hz.hz()?,
            sensitivity: t.sensitivity,
            rolloff_order: t.rolloff_order,
        });
        names.push(t.name.clone().unwrap_or_else(|| format!("transducer_{i}")));
        let points = t
            .penalty
            .iter()
            .map(|(f, l)| Ok((f.hz()?, *l)))
            .collect::<Result<Vec<_>>>()?;
        breakpoints.push(points);
    }
    let array = ArraySpec {
        transducers,
        speed_of_sound: raw_array.speed_of_sound.unwrap_or(ArraySpec::DEFAULT_SPEED_OF_SOUND),
    };
    array.validate().map_err(|e| Error::Config(format!("array: {e}")))?;
    let penalty = PenaltySchedule::new(breakpoints).map_err(|e| Error::Config(format!("penalty: {e}")))?;

    let mut densities = raw.densities;
    let accept =
        take_density(&mut densities, "accept")?.ok_or_else(|| Error::Config("missing densities.accept".into()))?;
    let reject =
        take_density(&mut densities, "reject")?.ok_or_else(|| Error::Config("missing densities.reject".into()))?;
    let evaluate = take_density(&mut densities, "evaluate")?.unwrap_or_else(|| accept.clone());
    if let Some(extra) = densities.keys().next() {
        return Err(Error::Config(format!(
            "unknown density {extra:?} (expected accept, reject, evaluate)"
        )));
    }

    let defaults = SolverSettings::default();
    let reference = match (raw.solver.reference_azimuth_deg, raw.solver.reference_elevation_deg) {
        (None, None) => None,
        (az, el) => Some(direction(az.unwrap_or(0.0), el.unwrap_or(0.0))),
    };
    let solver = SolverSettings {
        alpha: raw.solver.alpha.unwrap_or(defaults.alpha),
        max_iters: raw.solver.max_iters.unwrap_or(defaults.max_iters),
        tolerance: raw.solver.tolerance.unwrap_or(defaults.tolerance),
        tau_cap: raw.solver.tau_cap.unwrap_or(defaults.tau_cap),
        reference,
    };
    let b = BenchmarkSettings::default();
    let benchmark = BenchmarkSettings {
        n: raw.benchmark.n.unwrap_or(b.n),
        trials: raw.benchmark.trials.unwrap_or(b.trials),
        tau_db: raw.benchmark.tau_db.unwrap_or(b.tau_db),
        seed: raw.seed,
        residual: raw.benchmark.residual.unwrap_or(b.residual),
        pa_max_iters: raw.benchmark.pa_max_iters.unwrap_or(b.pa_max_iters),
        dm_max_iters: raw.benchmark.dm_max_iters.unwrap_or(b.dm_max_iters),
        alpha: raw.benchmark.alpha.unwrap_or(b.alpha),
        alpha_w: raw.benchmark.alpha_w.unwrap_or(b.alpha_w),
        alpha_lambda: raw.benchmark.alpha_lambda.unwrap_or(b.alpha_lambda),
    };
    let config = DesignConfig {
        array,
        transducer_names: names,
        accept,
        reject,
        evaluate,
        penalty,
        frequencies,
        mode: raw.mode.unwrap_or(Mode::Grpq),
        tau_db: raw.tau_db,
        solver,
        seed: raw.seed,
        resolution_deg: raw.beampattern.resolution_deg.unwrap_or(1.0),
        benchmark,
    };
    config.validate()?;
    Ok(config)
}

fn resolve_grid(grid: &RawGrid) -> Result<Vec<f64>> {
    if let Some(list) = &grid.list {
        if grid.start.is_some() || grid.stop.is_some() || grid.points.is_some() || grid.points_per_octave.is_some() {
            return Err(Error::Config(
                "frequency_grid.list cannot be combined with start/stop".into(),
            ));
        }
        let f = list.iter().map(FrequencyValue::hz).collect::<Result<Vec<_>>>()?;
        validate_grid(&f)?;
        return Ok(f);
    }
    let (start, stop) = match (&grid.start, &grid.stop) {
        (Some(a), Some(b)) => (a.hz()?, b.hz()?),
        _ => return Err(Error::Config("frequency_grid needs start and stop (or list)".into())),
    };
    if !(start > 0.0 && stop > start && stop.is_finite()) {
        return Err(Error::Config(format!(
            "frequency_grid needs 0 < start < stop, got {start}..{stop}"
        )));
    }
    let f: Vec<f64> = match (grid.points, grid.points_per_octave) {
        (Some(n), None) => {
            if n < 2 {
                return Err(Error::Config("frequency_grid.points must be at least 2".into()));
            }
            let ratio = stop / start;
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        stop
                    } else {
                        start * ratio.powf(i as f64 / (n - 1) as f64)
                    }
                })
                .collect()
        }
        (None, Some(ppo)) => {
            if !(ppo > 0.0 && ppo.is_finite()) {
                return Err(Error::Config(
                    "frequency_grid.points_per_octave must be positive".into(),
                ));
            }
            let count = ((stop / start).log2() * ppo + 1e-9).floor() as usize + 1;
            (0..count).map(|i| start * 2f64.powf(i as f64 / ppo)).collect()
        }
        _ => {
            return Err(Error::Config(
                "frequency_grid needs exactly one of points, points_per_octave".into(),
            ))
        }
    };
    validate_grid(&f)?;
    Ok(f)
}

/// Unit direction from azimuth (from +x toward +y) and elevation above the
/// horizontal plane, in degrees.
pub fn direction(azimuth_deg: f64, elevation_deg: f64) -> Vec3 {
    let (az, el) = (azimuth_deg.to_radians(), elevation_deg.to_radians());
    [el.cos() * az.cos(), el.cos() * az.sin(), el.sin()]
}

fn take_density(map: &mut BTreeMap<String, toml::Value>, key: &str) -> Result<Option<DirectionDensity>> {
    let Some(value) = map.remove(key) else {
        return Ok(None);
    };
    let context = |e: toml::de::Error| Error::Config(format!("densities.{key}: {e}"));
    let windows: Vec<RawWindow> = match value {
        toml::Value::Array(_) => value.try_into().map_err(context)?,
        other => vec![other.try_into().map_err(context)?],
    };
    let parts = windows
        .iter()
        .map(|w| {
            Ok((
                window_density(w).map_err(|e| Error::Config(format!("densities.{key}: {e}")))?,
                w.weight,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    if parts.len() == 1 {
        return Ok(Some(parts.into_iter().next().map(|(d, _)| d).expect("one part")));
    }
    Ok(Some(
        DirectionDensity::mixture(&parts).map_err(|e| Error::Config(format!("densities.{key}: {e}")))?,
    ))
}

fn window_density(w: &RawWindow) -> Result<DirectionDensity> {
    let kind = match w.kind.as_str() {
        "vonmises-like" => WindowKind::VonmisesLike,
        "uniform-cap" => WindowKind::UniformCap {
            half_angle_deg: w
                .half_angle_deg
                .ok_or_else(|| Error::Config("uniform-cap needs half_angle_deg".into()))?,
        },
        "full-sphere" => WindowKind::FullSphere,
        other => {
            return Err(Error::Config(format!(
                "unknown window kind {other:?} (expected vonmises-like, uniform-cap, full-sphere)"
            )))
        }
    };
    if !(w.weight >= 0.0) || !w.weight.is_finite() {
        return Err(Error::Config(format!("window weight {} must be nonnegative", w.weight)));
    }
    let center = w.center.unwrap_or_else(|| direction(w.azimuth_deg, w.elevation_deg));
    density_from_window(kind, &center, w.concentration, w.n_azimuth, w.n_elevation)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        schema_version = 1
        mode = "grq"
        [frequency_grid]
        start = "100"
        stop = "1.6k"
        points_per_octave = 1
        [array]
        [[array.transducers]]
        position = [0.0, 0.0, 0.0]
        band_low_hz = 50
        band_high_hz = "20k"
        [densities.accept]
        kind = "vonmises-like"
        concentration = 4.0
        [densities.reject]
        kind = "full-sphere"
    "#;

    #[test]
    fn si_suffixes() {
        assert_eq!(parse_frequency("1k").unwrap(), 1000.0);
        assert_eq!(parse_frequency("2.5kHz").unwrap(), 2500.0);
        assert_eq!(parse_frequency(" 20 k ").unwrap(), 20_000.0);
        assert_eq!(parse_frequency("60").unwrap(), 60.0);
        assert_eq!(parse_frequency("1M").unwrap(), 1e6);
        assert!(parse_frequency("fast").is_err());
    }

    #[test]
    fn minimal_config_resolves() {
        let cfg = DesignConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(cfg.frequencies, vec![100.0, 200.0, 400.0, 800.0, 1600.0]);
        assert_eq!(cfg.mode, Mode::Grq);
        assert_eq!(cfg.array.speed_of_sound, 343.0);
        assert_eq!(cfg.array.transducers[0].rolloff_order, 2);
        assert_eq!(cfg.transducer_names, vec!["transducer_0".to_string()]);
        assert_eq!(cfg.evaluate, cfg.accept);
        assert_eq!(cfg.solver, SolverSettings::default());
    }

    #[test]
    fn points_grid_is_log_spaced_and_hits_stop() {
        let text = MINIMAL.replace("points_per_octave = 1", "points = 3");
        let cfg = DesignConfig::from_toml_str(&text).unwrap();
        assert_eq!(cfg.frequencies[0], 100.0);
        assert!((cfg.frequencies[1] - 400.0).abs() < 1e-9);
        assert_eq!(cfg.frequencies[2], 1600.0);
    }

    #[test]
    fn mixtures_and_list_grid() {
        let text = MINIMAL
            .replace("start = \"100\"\n        stop = \"1.6k\"\n        points_per_octave = 1", "list = [\"1k\", 2000]")
            .replace(
                "[densities.reject]\n        kind = \"full-sphere\"",
                "[[densities.reject]]\n        kind = \"full-sphere\"\n        weight = 1.0\n        [[densities.reject]]\n        kind = \"uniform-cap\"\n        half_angle_deg = 30\n        azimuth_deg = 90\n        weight = 3.0",
            );
        let cfg = DesignConfig::from_toml_str(&text).unwrap();
        assert_eq!(cfg.frequencies, vec![1000.0, 2000.0]);
        let total: f64 = cfg.reject.samples().iter().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(cfg.reject.mean_direction()[1] > 0.3);
    }

    #[test]
    fn validation_errors() {
        let bad_version = MINIMAL.replace("schema_version = 1", "schema_version = 9");
        assert!(matches!(
            DesignConfig::from_toml_str(&bad_version),
            Err(Error::Config(_))
        ));
        let needs_tau = MINIMAL.replace("mode = \"grq\"", "mode = \"mecd\"");
        assert!(DesignConfig::from_toml_str(&needs_tau)
            .unwrap_err()
            .to_string()
            .contains("tau_db"));
        let unknown_key = MINIMAL.replace("mode = \"grq\"", "mode = \"grq\"\n        colour = 3");
        assert!(DesignConfig::from_toml_str(&unknown_key).is_err());
        let bad_kind = MINIMAL.replace("kind = \"full-sphere\"", "kind = \"cardioid\"");
        assert!(DesignConfig::from_toml_str(&bad_kind)
            .unwrap_err()
            .to_string()
            .contains("cardioid"));
        let no_reject = MINIMAL.replace("[densities.reject]\n        kind = \"full-sphere\"", "");
        assert!(DesignConfig::from_toml_str(&no_reject)
            .unwrap_err()
            .to_string()
            .contains("reject"));
        let decreasing = MINIMAL.replace(
            "start = \"100\"\n        stop = \"1.6k\"\n        points_per_octave = 1",
            "list = [200, 100]",
        );
        assert!(DesignConfig::from_toml_str(&decreasing).is_err());
    }
}
