//! Maximum-efficiency constant-directivity design on a random instance:
//! projected ascent against differential multipliers.
//!
//! ```text
//! cargo run --example mecd_projected_ascent [seed]
//! ```

use cdbeam::mecd::{mecd_dm, mecd_pa, DmOptions, PaOptions};
use cdbeam::pipeline::benchmark::{random_instance, trial_rng};

fn main() -> cdbeam::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let mut rng = trial_rng(seed, 0);
    let (c, d) = random_instance(&mut rng, 8, 6.0)?;
    let (lo, hi) = d.feasible_range();
    println!(
        "N = 8, target {:.2} dB, feasible GDI range ({:.2}, {:.2}) dB",
        d.tau_db(),
        10.0 * lo.log10(),
        10.0 * hi.log10()
    );

    let pa = mecd_pa(&c, &d, PaOptions::default(), None)?;
    println!(
        "\nprojected ascent: {} iterations, converged {}",
        pa.iterations, pa.converged
    );
    for e in pa.trace.iter().take(8) {
        println!(
            "  {:>4}  objective {:>12.6}  residual {:.2e}",
            e.iteration, e.objective, e.residual
        );
    }
    println!(
        "  GDI {:.6} dB, multiplier λ = {:.4}",
        10.0 * pa.gdi_achieved.log10(),
        pa.lambda
    );

    let dm = match mecd_dm(
        &c,
        &d,
        DmOptions {
            max_iters: 5000,
            ..DmOptions::default()
        },
        None,
    ) {
        Ok(r) => r,
        Err(e) => {
            println!("\ndifferential multipliers: {e}");
            return Ok(());
        }
    };
    println!(
        "\ndifferential multipliers: {} iterations, converged {}",
        dm.iterations, dm.converged
    );
    for e in dm.trace.iter().filter(|e| e.iteration % 50 == 0) {
        println!(
            "  {:>4}  objective {:>12.6}  residual {:.2e}",
            e.iteration, e.objective, e.residual
        );
    }
    println!("  GDI {:.6} dB", 10.0 * dm.gdi_achieved.log10());
    Ok(())
}
