//! Constant-directivity beamformer design for heterogeneous loudspeaker
//! arrays.
//!
//! The crate builds accept/reject covariances from direction densities over
//! a synthetic array model, maximizes the (optionally penalized) generalized
//! Rayleigh quotient, and solves two constant-directivity programs:
//!
//! * [`mecd`]: maximum efficiency `wᴴCw` on the unit sphere with a fixed GDI,
//!   by projected ascent or by the differential-multipliers baseline.
//! * [`mscd`]: minimum norm with a fixed GDI and a distortionless response,
//!   solved analytically.
//!
//! Both reduce to the quadratic secular equation in [`secular`]. The
//! [`pipeline`] module sweeps a frequency grid from a TOML configuration and
//! writes CSV tables.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod directivity;
pub mod error;
pub mod grq;
pub mod linalg;
pub mod mecd;
pub mod mscd;
pub mod pipeline;
pub mod secular;

#[cfg(test)]
#[path = "../tests/common/mod.rs"]
mod oracle;

pub use error::{Error, Result};
