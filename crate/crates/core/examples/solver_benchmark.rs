//! Iterations each MECD solver needs to reach the GDI constraint on random
//! N = 8 instances at a 6 dB target.
//!
//! ```text
//! cargo run --release --example solver_benchmark [trials] [out_dir]
//! ```

use std::path::PathBuf;

use cdbeam::pipeline::benchmark::{run_benchmark, write_benchmark_outputs};
use cdbeam::pipeline::{BenchmarkSettings, Solver};

fn main() -> cdbeam::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("cdbeam-benchmark"));
    let settings = BenchmarkSettings {
        trials,
        ..BenchmarkSettings::default()
    };
    let report = run_benchmark(&settings)?;

    let mut histogram = [0usize; 6];
    for t in &report.trials {
        let k = t.dm.iterations_to_residual.unwrap_or(settings.dm_max_iters + 1);
        histogram[match k {
            0..=10 => 0,
            11..=50 => 1,
            51..=200 => 2,
            201..=500 => 3,
            501..=2000 => 4,
            _ => 5,
        }] += 1;
    }
    println!(
        "{} trials, N = {}, target {} dB, residual {:e}",
        trials, settings.n, settings.tau_db, settings.residual
    );
    println!(
        "median iterations: projected ascent {}, differential multipliers {}",
        report.median_iterations(Solver::Pa),
        report.median_iterations(Solver::Dm)
    );
    println!("differential multipliers iterations histogram:");
    for (label, count) in ["<= 10", "11-50", "51-200", "201-500", "501-2000", "not reached"]
        .iter()
        .zip(histogram)
    {
        println!("  {label:>11}  {count}");
    }
    for path in write_benchmark_outputs(&report, &out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
