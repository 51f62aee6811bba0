//! Minimum-norm distortionless design with a GDI constraint, solved in
//! closed form, across the three-way array's band.
//!
//! ```text
//! cargo run --example mscd_analytic [tau_db]
//! ```

use cdbeam::directivity::steering_vector;
use cdbeam::grq::max_grq;
use cdbeam::linalg::dot;
use cdbeam::mecd::build_constraint_capped;
use cdbeam::mscd::mscd_solve;
use cdbeam::pipeline::design::FrequencyProblem;
use cdbeam::pipeline::DesignConfig;

fn main() -> cdbeam::Result<()> {
    let tau_db: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let cfg = DesignConfig::from_path(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/three_way.toml"))?;
    let look = cfg.reference_direction();
    println!("target {tau_db} dB, look direction {look:?}");
    println!(
        "{:>8}  {:>9}  {:>9}  {:>10}  {:>12}",
        "freq Hz", "target", "GDI dB", "|w|²", "|cᴴw − 1|"
    );
    for f in [200.0, 500.0, 1000.0, 1500.0, 2000.0, 3000.0, 5000.0] {
        let p = FrequencyProblem::build(&cfg, f)?;
        let cap = max_grq(&p.accept, &p.reject)?.value;
        let d = build_constraint_capped(&p.accept, &p.reject, tau_db, cap)?;
        let c = steering_vector(&cfg.array, f, &look)?.entries;
        let res = mscd_solve(&d, &c)?;
        println!(
            "{f:>8.0}  {:>9.4}  {:>9.4}  {:>10.4e}  {:>12.2e}",
            d.tau_db(),
            10.0 * res.gdi_achieved.log10(),
            res.norm_sq,
            (dot(&c, &res.weights) - 1.0).norm()
        );
    }
    Ok(())
}
