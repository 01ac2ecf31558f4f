//! Second-order continuum traffic model derived from a kinetic equation for
//! aggressive drivers.
//!
//! The crate is split into four layers:
//!
//! * [`kinetic`]: closed-form Chapman-Enskog and Grad closures together with
//!   Gauss-Laguerre quadrature oracles that integrate the velocity
//!   distribution directly.
//! * [`macro_model`]: the conservative system `U_t + F(U)_x = S(U)`, its flux
//!   Jacobian and characteristic speeds.
//! * [`solver`]: Roe flux-difference splitting on a periodic ring with a
//!   fractional-step source update and CFL-controlled time stepping.
//! * [`scenario`]: configuration, the blockade-removal initial data, CSV
//!   snapshots, SVG plots and the validation suites behind the CLI.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod kinetic;
pub mod macro_model;
pub mod params;
pub mod scenario;
pub mod snapshot;
pub mod solver;

pub use error::{Error, Result};
pub use params::ModelParams;
