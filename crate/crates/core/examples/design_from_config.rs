//! Full frequency sweep from a TOML configuration: weights and per-frequency
//! summary CSVs, as the `cdbeam design` command writes them.
//!
//! ```text
//! cargo run --example design_from_config [config.toml] [mode] [out_dir]
//! ```

use std::path::PathBuf;

use cdbeam::pipeline::export::write_design_outputs;
use cdbeam::pipeline::{run_design, DesignConfig, Mode};

fn main() -> cdbeam::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/three_way.toml").into());
    let mut cfg = DesignConfig::from_path(&path)?;
    if let Some(mode) = args.next() {
        cfg.mode = match mode.as_str() {
            "grq" => Mode::Grq,
            "grpq" => Mode::Grpq,
            "mecd" => Mode::Mecd,
            "mscd" => Mode::Mscd,
            other => return Err(cdbeam::Error::Config(format!("unknown mode {other}"))),
        };
    }
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("cdbeam-design"));

    let result = run_design(&cfg)?;
    println!(
        "mode {}, {} frequencies, {} failed",
        cfg.mode.as_str(),
        result.records.len(),
        result.failures()
    );
    println!(
        "{:>9}  {:<14}  {:>8}  {:>8}  {:>5}",
        "freq Hz", "status", "GDI dB", "target", "iters"
    );
    for r in &result.records {
        let target = r.tau_db.map(|t| format!("{t:.3}")).unwrap_or_else(|| "-".into());
        println!(
            "{:>9.1}  {:<14}  {:>8.3}  {:>8}  {:>5}",
            r.frequency_hz,
            r.status.label(),
            r.gdi_db,
            target,
            r.iterations
        );
    }
    for p in write_design_outputs(&result, &out)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}
