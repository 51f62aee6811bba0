//! Maximum-directivity weights with and without the band-limited drive
//! penalty on the three-way array.
//!
//! Without the penalty the optimizer drives transducers far outside their
//! passbands; with it, each transducer fades out past its crossover.
//!
//! ```text
//! cargo run --example grq_crossover [config.toml]
//! ```

use cdbeam::grq::{max_grpq, max_grq};
use cdbeam::pipeline::design::FrequencyProblem;
use cdbeam::pipeline::DesignConfig;

fn main() -> cdbeam::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/three_way.toml").into());
    let cfg = DesignConfig::from_path(&path)?;
    let names = cfg.transducer_names.join(" / ");
    println!("relative drive level per transducer ({names}), dB re loudest");
    println!(
        "{:>9}  {:>26}  {:>7}  {:>26}  {:>7}",
        "freq Hz", "GRQ", "GDI dB", "GRPQ", "GDI dB"
    );
    for f in [60.0, 100.0, 250.0, 1000.0, 2500.0, 6000.0, 12_000.0, 16_000.0] {
        let p = FrequencyProblem::build(&cfg, f)?;
        let free = max_grq(&p.accept, &p.reject)?;
        let penalized = max_grpq(&p.accept, &p.reject, &p.weights)?;
        println!(
            "{f:>9.0}  {:>26}  {:>7.3}  {:>26}  {:>7.3}",
            levels(&free.weights),
            free.value_db,
            levels(&penalized.weights),
            10.0 * cdbeam::directivity::gdi(&p.accept, &p.reject, &penalized.weights)?.log10(),
        );
    }
    Ok(())
}

fn levels(w: &[num_complex::Complex64]) -> String {
    let peak = w.iter().map(|z| z.norm()).fold(0.0, f64::max);
    w.iter()
        .map(|z| format!("{:7.1}", (20.0 * (z.norm() / peak).log10()).max(-120.0)))
        .collect::<Vec<_>>()
        .join(" ")
}
