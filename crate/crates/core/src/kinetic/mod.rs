//! Kinetic closures of the aggressive-driver traffic equation.
//!
//! Both closures are expressed in terms of the macroscopic state `(rho, v)`
//! and the velocity gradient. The equilibrium velocity distribution is a
//! gamma density with constant shape `alpha`; every distribution in this
//! module is that density times a low-order polynomial in the reduced
//! velocity, which is what lets [`quadrature`] integrate them to round-off.

mod aggressiveness;
pub mod chapman_enskog;
mod distribution;
pub mod grad;
pub mod quadrature;

pub use aggressiveness::{aggressiveness, aggressiveness_excess};
pub use chapman_enskog::{
    ce_pressure, collective_relaxation_time, equilibrium_distribution, first_order_distribution,
    first_order_negativity, passing_factor, relaxation_time_from_excess, shape_parameter, velocity_variance, viscosity,
};
pub use distribution::{ChapmanEnskog, Equilibrium, FirstOrderCorrection, VelocityDistribution};
pub use grad::{
    grad_coefficients, grad_distribution, maxwellian_first_iterate, orthonormal_polynomial, orthonormal_polynomials,
    third_moment_closure, GradDistribution,
};
pub use quadrature::{moment_quadrature, GaussLaguerre, QuadratureEstimate};

use serde::{Deserialize, Serialize};

/// Local macroscopic state at which a closure is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KineticPoint {
    /// Density [veh/m].
    pub rho: f64,
    /// Mean velocity [m/s].
    pub v: f64,
    /// Velocity gradient [1/s].
    pub dv_dx: f64,
}

impl KineticPoint {
    pub fn new(rho: f64, v: f64, dv_dx: f64) -> Self {
        Self { rho, v, dv_dx }
    }

    pub fn equilibrium_pressure(&self, alpha: f64) -> f64 {
        equilibrium_pressure(self.rho, self.v, alpha)
    }
}

/// Second and third central moments carried by a Grad expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradMoments {
    /// Traffic pressure [veh m/s^2].
    pub pressure: f64,
    /// Third central moment [veh m^2/s^3].
    pub third_moment: f64,
}

/// Equilibrium traffic pressure `rho v^2 / alpha`.
#[inline]
pub fn equilibrium_pressure(rho: f64, v: f64, alpha: f64) -> f64 {
    rho * v * v / alpha
}

/// Equilibrium third central moment `2 rho v^3 / alpha^2`.
#[inline]
pub fn equilibrium_third_moment(rho: f64, v: f64, alpha: f64) -> f64 {
    2.0 * rho * v * v * v / (alpha * alpha)
}
