//! Conservative form of the Navier-Stokes-like traffic model.
//!
//! `U = (rho, q)` with `q = rho v`, flux `F(U) = (q, rho v^2 + rho c^2)` where
//! `c = v / sqrt(alpha)` is the traffic sound speed, and source
//! `S(U) = (0, rho (u - v)/tau - b v_x + (mu v_x)_x)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinetic::{aggressiveness, equilibrium_pressure, passing_factor};
use crate::params::ModelParams;

/// Conserved variables of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedState {
    /// Density [veh/m].
    pub rho: f64,
    /// Flow `rho v` [veh/s].
    pub q: f64,
}

impl ConservedState {
    pub fn new(rho: f64, q: f64) -> Self {
        Self { rho, q }
    }

    pub fn from_primitive(rho: f64, v: f64) -> Self {
        Self { rho, q: rho * v }
    }

    /// `q / rho`. Callers are expected to have applied the density floor.
    #[inline]
    pub fn velocity(&self) -> f64 {
        self.q / self.rho
    }

    fn checked_velocity(&self) -> Result<f64> {
        if self.rho > 0.0 && self.rho.is_finite() && self.q.is_finite() {
            Ok(self.velocity())
        } else {
            Err(Error::DegenerateState {
                rho: self.rho,
                q: self.q,
            })
        }
    }
}

impl std::ops::Sub for ConservedState {
    type Output = ConservedState;
    fn sub(self, rhs: Self) -> Self {
        ConservedState::new(self.rho - rhs.rho, self.q - rhs.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxVector {
    /// [veh/s]
    pub f1: f64,
    /// [veh m/s^2]
    pub f2: f64,
}

impl FluxVector {
    pub fn new(f1: f64, f2: f64) -> Self {
        Self { f1, f2 }
    }
}

impl std::ops::Sub for FluxVector {
    type Output = FluxVector;
    fn sub(self, rhs: Self) -> Self {
        FluxVector::new(self.f1 - rhs.f1, self.f2 - rhs.f2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SourceVector {
    /// Always zero: vehicles are neither created nor destroyed.
    pub s1: f64,
    /// [veh/s^2]
    pub s2: f64,
}

/// Traffic sound speed `v / sqrt(alpha)`.
pub fn sound_speed(v: f64, alpha: f64) -> f64 {
    v / alpha.sqrt()
}

/// Bando-type equilibrium speed `v_0/2 (tanh(rho_0/rho - a) + tanh(a))`.
pub fn equilibrium_speed(rho: f64, p: &ModelParams) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Domain {
            quantity: "rho",
            value: rho,
            expected: "rho > 0 (apply the density floor first)",
        });
    }
    Ok(0.5 * p.v_0 * ((p.rho_0 / rho - p.a).tanh() + p.a.tanh()))
}

/// Optimal velocity driving the relaxation term.
///
/// Relaxation is towards the equilibrium speed-density curve, so the result
/// does not depend on `v`.
pub fn optimal_velocity(rho: f64, _v: f64, p: &ModelParams) -> Result<f64> {
    equilibrium_speed(rho, p)
}

/// Kinetic optimal velocity `w v - tau (1 - p) rho v^2/alpha`, with `1 - p`
/// taken from the constant-shape relation. Diagnostic only: it reduces to
/// `v` identically.
pub fn kinetic_optimal_velocity(rho: f64, v: f64, p: &ModelParams) -> Result<f64> {
    let w = aggressiveness(rho, p)?;
    let one_minus_p = passing_factor(rho, v, w, p.tau, p.alpha)?;
    Ok(w * v - p.tau * one_minus_p * equilibrium_pressure(rho, v, p.alpha))
}

/// Anticipation coefficient `b = -((alpha-1)/2) d(rho v^2/alpha)/dv = -(alpha-1) rho v/alpha`.
pub fn anticipation_coefficient(rho: f64, v: f64, alpha: f64) -> f64 {
    -(alpha - 1.0) * rho * v / alpha
}

/// Physical flux `(q, (alpha+1)/alpha q^2/rho)`.
pub fn flux(u: &ConservedState, alpha: f64) -> Result<FluxVector> {
    let v = u.checked_velocity()?;
    Ok(FluxVector::new(u.q, (alpha + 1.0) / alpha * u.q * v))
}

/// Flux Jacobian `dF/dU` as row-major `[[a11, a12], [a21, a22]]`.
pub fn jacobian(u: &ConservedState, alpha: f64) -> Result<[[f64; 2]; 2]> {
    let v = u.checked_velocity()?;
    Ok(jacobian_at_velocity(v, alpha))
}

pub(crate) fn jacobian_at_velocity(v: f64, alpha: f64) -> [[f64; 2]; 2] {
    let k = (alpha + 1.0) / alpha;
    [[0.0, 1.0], [-k * v * v, 2.0 * k * v]]
}

/// Eigenvalue factors `(alpha + 1 -/+ sqrt(alpha + 1)) / alpha`.
#[inline]
pub fn characteristic_factors(alpha: f64) -> [f64; 2] {
    let root = (alpha + 1.0).sqrt();
    [(alpha + 1.0 - root) / alpha, (alpha + 1.0 + root) / alpha]
}

/// Characteristic speeds `(Lambda_1, Lambda_2)`.
pub fn eigenvalues(v: f64, alpha: f64) -> [f64; 2] {
    let [k1, k2] = characteristic_factors(alpha);
    [k1 * v, k2 * v]
}

/// Right eigenvectors `(1, Lambda_k)`.
pub fn eigenvectors(v: f64, alpha: f64) -> [[f64; 2]; 2] {
    let [l1, l2] = eigenvalues(v, alpha);
    [[1.0, l1], [1.0, l2]]
}

/// Momentum source assembled from its ingredients. `viscous_divergence` is
/// the discretised `(mu v_x)_x`.
pub fn source(
    u: &ConservedState,
    optimal_velocity: f64,
    anticipation: f64,
    viscous_divergence: f64,
    v_x: f64,
    tau: f64,
) -> SourceVector {
    let v = u.velocity();
    SourceVector {
        s1: 0.0,
        s2: u.rho * (optimal_velocity - v) / tau - anticipation * v_x + viscous_divergence,
    }
}
