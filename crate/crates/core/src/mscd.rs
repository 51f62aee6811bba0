//! Maximum-sensitivity constant-directivity design
//!
//! ```text
//! minimize wᴴw   subject to   wᴴDw = 0,   cᴴw = 1
//! ```
//!
//! The stationarity conditions give `w = (I − λD)⁻¹c / cᴴ(I − λD)⁻¹c`, and
//! the GDI constraint turns into the secular equation for `u = Vᴴc`. The
//! resolvent is applied in the eigenbasis of `D`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::norm_sqr;
use crate::mecd::ConstraintMatrix;
use crate::secular::{build_secular, solve_secular, COEFF_DROP};

#[derive(Debug, Clone)]
pub struct MscdResult {
    pub weights: Vec<Complex64>,
    /// `wᴴw`.
    pub norm_sq: f64,
    pub lambda: f64,
    /// `1 / cᴴ(I − λD)⁻¹c`.
    pub mu: f64,
    pub gdi_achieved: f64,
}

/// Minimum-norm weights with unit response along `c` and `wᴴDw = 0`.
pub fn mscd_solve(d: &ConstraintMatrix, c: &[Complex64]) -> Result<MscdResult> {
    if c.len() != d.n() {
        return Err(Error::Dimension(format!(
            "constraint vector of length {} for {} transducers",
            c.len(),
            d.n()
        )));
    }
    let c_norm = norm_sqr(c);
    if !(c_norm > 0.0) || !c_norm.is_finite() {
        return Err(Error::InvalidArgument(
            "distortionless vector must be nonzero and finite".into(),
        ));
    }
    let eig = d.eig();
    let u = eig.to_eigenbasis(c);
    let lambda = if d.d().quad_form(c).abs() <= 1e-15 * d.norm() * c_norm {
        0.0
    } else {
        solve_secular(&build_secular(&u, &eig.values)?)?.lambda_star
    };

    let u_max = u.iter().map(|x| x.norm_sqr()).fold(0.0, f64::max);
    let mut denominator = 0.0;
    let z: Vec<Complex64> = u
        .iter()
        .zip(&eig.values)
        .map(|(un, en)| {
            let scale = 1.0 - lambda * en;
            if un.norm_sqr() <= COEFF_DROP * u_max && scale.abs() < 1e-3 {
                return Complex64::new(0.0, 0.0);
            }
            denominator += un.norm_sqr() / scale;
            un / scale
        })
        .collect();
    if denominator.abs() < 1e-12 * norm_sqr(&u) {
        return Err(Error::ConstraintDegenerate);
    }
    let weights: Vec<Complex64> = eig.from_eigenbasis(&z).into_iter().map(|x| x / denominator).collect();
    Ok(MscdResult {
        norm_sq: norm_sqr(&weights),
        gdi_achieved: d.gdi(&weights)?,
        lambda,
        mu: 1.0 / denominator,
        weights,
    })
}
