//! CSV outputs. All files have a header row, UTF-8 text and LF line
//! endings; floats are written in shortest round-trip form so reruns are
//! byte-identical.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::directivity::{horizontal_direction, steering_vector, ArraySpec};
use crate::error::{Error, Result};
use crate::linalg::dot;

use super::design::DesignResult;

/// Lowest level written to any dB column.
pub const DB_FLOOR: f64 = -80.0;

pub const WEIGHTS_FILE: &str = "weights.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const BEAMPATTERN_FILE: &str = "beampattern.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    Horizontal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamRow {
    pub frequency_hz: f64,
    pub azimuth_deg: f64,
    pub level_db: f64,
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn num(x: f64) -> String {
    format!("{x}")
}

/// Azimuths `0, Δ, 2Δ, …` covering one turn.
pub fn azimuth_grid(resolution_deg: f64) -> Result<Vec<f64>> {
    if !(resolution_deg > 0.0 && resolution_deg <= 360.0) {
        return Err(Error::InvalidArgument(format!(
            "resolution {resolution_deg} outside (0, 360]"
        )));
    }
    let count = (360.0 / resolution_deg - 1e-9).ceil() as usize;
    Ok((0..count).map(|i| i as f64 * resolution_deg).collect())
}

/// `20 log10 |wᴴd(r)|` over azimuth for every successful record, normalized
/// to a 0 dB peak per frequency and clamped at [`DB_FLOOR`].
pub fn export_beampattern(
    result: &DesignResult,
    array: &ArraySpec,
    plane: Plane,
    resolution_deg: f64,
) -> Result<Vec<BeamRow>> {
    let Plane::Horizontal = plane;
    let azimuths = azimuth_grid(resolution_deg)?;
    let records: Vec<_> = result.records.iter().filter(|r| r.status.is_success()).collect();
    if records.is_empty() {
        return Err(Error::InvalidArgument("no successful records to export".into()));
    }
    let mut rows = Vec::with_capacity(records.len() * azimuths.len());
    for rec in records {
        let levels = azimuths
            .iter()
            .map(|&az| {
                let d = steering_vector(array, rec.frequency_hz, &horizontal_direction(az))?;
                Ok(dot(&rec.weights, &d.entries).norm_sqr())
            })
            .collect::<Result<Vec<f64>>>()?;
        let peak = levels.iter().copied().fold(0.0, f64::max);
        for (&az, &p) in azimuths.iter().zip(&levels) {
            let level_db = if peak > 0.0 && p > 0.0 {
                (10.0 * (p / peak).log10()).max(DB_FLOOR)
            } else {
                DB_FLOOR
            };
            rows.push(BeamRow {
                frequency_hz: rec.frequency_hz,
                azimuth_deg: az,
                level_db,
            });
        }
    }
    Ok(rows)
}

pub fn write_beampattern_csv<W: Write>(rows: &[BeamRow], out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["frequency_hz", "azimuth_deg", "level_db"])?;
    for r in rows {
        w.write_record([num(r.frequency_hz), num(r.azimuth_deg), num(r.level_db)])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-frequency weights; `magnitude_db` is relative to the largest weight
/// magnitude at that frequency.
pub fn write_weights_csv<W: Write>(result: &DesignResult, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record([
        "frequency_hz",
        "transducer_index",
        "re",
        "im",
        "magnitude_db",
        "phase_deg",
    ])?;
    for rec in result.records.iter().filter(|r| r.status.is_success()) {
        let peak = rec.weights.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (i, z) in rec.weights.iter().enumerate() {
            w.write_record([
                num(rec.frequency_hz),
                i.to_string(),
                num(z.re),
                num(z.im),
                num(relative_db(*z, peak)),
                num(z.arg().to_degrees()),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn relative_db(z: Complex64, peak: f64) -> f64 {
    if peak > 0.0 && z.norm() > 0.0 {
        (20.0 * (z.norm() / peak).log10()).max(DB_FLOOR)
    } else {
        DB_FLOOR
    }
}

/// One row per grid frequency, including failures.
pub fn write_summary_csv<W: Write>(result: &DesignResult, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record([
        "frequency_hz",
        "mode",
        "status",
        "gdi_db",
        "tau_db",
        "objective",
        "iterations",
    ])?;
    for rec in &result.records {
        w.write_record([
            num(rec.frequency_hz),
            result.mode.as_str().to_string(),
            rec.status.label(),
            num(rec.gdi_db),
            rec.tau_db.map(num).unwrap_or_default(),
            num(rec.objective),
            rec.iterations.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn create(dir: &Path, name: &str) -> Result<(File, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    Ok((File::create(&path)?, path))
}

/// Writes `weights.csv` and `summary.csv` into `dir`.
pub fn write_design_outputs(result: &DesignResult, dir: &Path) -> Result<Vec<PathBuf>> {
    let (f, weights) = create(dir, WEIGHTS_FILE)?;
    write_weights_csv(result, f)?;
    let (f, summary) = create(dir, SUMMARY_FILE)?;
    write_summary_csv(result, f)?;
    Ok(vec![weights, summary])
}

/// Writes `beampattern.csv` into `dir`.
pub fn write_beampattern_output(rows: &[BeamRow], dir: &Path) -> Result<PathBuf> {
    let (f, path) = create(dir, BEAMPATTERN_FILE)?;
    write_beampattern_csv(rows, f)?;
    Ok(path)
}
