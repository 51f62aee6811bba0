//! Horizontal-plane beam patterns of a constant-directivity design,
//! written as long-form CSV and sketched in the terminal.
//!
//! ```text
//! cargo run --example beampattern_export [out_dir]
//! ```

use std::path::PathBuf;

use cdbeam::pipeline::export::{export_beampattern, write_beampattern_output};
use cdbeam::pipeline::{run_design, DesignConfig, Mode, Plane};

fn main() -> cdbeam::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("cdbeam-beampattern"));
    let mut cfg = DesignConfig::from_path(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/three_way.toml"))?;
    cfg.mode = Mode::Mecd;
    let result = run_design(&cfg)?;
    let rows = export_beampattern(&result, &cfg.array, Plane::Horizontal, 5.0)?;
    let path = write_beampattern_output(&rows, &out)?;
    println!("wrote {} rows to {}", rows.len(), path.display());

    // one line per frequency: level every 15 degrees, from front (0) round
    // to the back (180) and on to 345
    let shades = [' ', '.', ':', '-', '=', '+', '*', '#', '%', '@'];
    println!("\n{:>8}  0°    90°   180°  270°", "freq Hz");
    for chunk in rows.chunks(72).step_by(5) {
        let line: String = chunk
            .iter()
            .step_by(3)
            .map(|r| {
                let x = ((r.level_db + 30.0) / 30.0).clamp(0.0, 0.999);
                shades[(x * shades.len() as f64) as usize]
            })
            .collect();
        println!("{:>8.0}  {line}", chunk[0].frequency_hz);
    }
    Ok(())
}
