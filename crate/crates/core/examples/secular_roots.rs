//! The scalar root problem behind the quadric projection.
//!
//! `S(λ) = Σ aₙ bₙ / (λ − bₙ)²` has exactly one root between the poles
//! closest to zero on either side; that root gives the shortest step onto
//! the constraint surface.
//!
//! ```text
//! cargo run --example secular_roots
//! ```

use cdbeam::secular::{build_secular, eval_secular, solve_secular, SecularProblem};
use num_complex::Complex64;

fn main() -> cdbeam::Result<()> {
    let p = SecularProblem::from_terms(&[1.0, 1.0, 1.0], &[1.0, -2.0, -1.0])?;
    report("three poles", &p)?;

    // the same kind of problem built from eigen-coordinates u = Vᴴw of a
    // constraint matrix with eigenvalues e
    let u = [
        Complex64::new(0.3, 0.1),
        Complex64::new(-0.5, 0.2),
        Complex64::new(0.1, 0.0),
        Complex64::new(0.7, -0.4),
    ];
    let e = [-3.0, -0.4, 0.25, 2.0];
    report("from eigen-coordinates", &build_secular(&u, &e)?)?;

    // a heavy pole drags the root toward the opposite bracket end
    let p = SecularProblem::from_terms(&[1.0, 1e-6], &[-1.0, 1.0])?;
    report("lopsided weights", &p)?;
    Ok(())
}

fn report(label: &str, p: &SecularProblem) -> cdbeam::Result<()> {
    let (lo, hi) = p.bracket();
    let root = solve_secular(p)?;
    println!("{label}");
    println!("  poles {:?}", p.poles());
    println!("  bracket ({lo}, {hi})");
    println!(
        "  root {:.15} after {} iterations, S = {:e}",
        root.lambda_star, root.iterations, root.residual
    );
    for x in [lo + 0.25 * (hi - lo), 0.0, lo + 0.75 * (hi - lo)] {
        let (s, ds) = eval_secular(p, x)?;
        println!("  S({x:+.4}) = {s:+.6e}, S' = {ds:+.6e}");
    }
    Ok(())
}
