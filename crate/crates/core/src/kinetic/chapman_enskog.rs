//! First-order Chapman-Enskog closure.
//!
//! The zeroth-order distribution is a gamma density with shape `alpha` and
//! mean `v`; the first-order correction is proportional to the velocity
//! gradient and yields a Navier-Stokes-like traffic pressure
//! `p = rho v^2/alpha - mu dv/dx`.

use super::distribution::{check_state, gamma_density, Equilibrium, FirstOrderCorrection};
use super::{aggressiveness_excess, equilibrium_pressure, KineticPoint};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Collective relaxation time `tau0 = tau / (2 (w - 1))`.
pub fn collective_relaxation_time(w: f64, tau: f64) -> Result<f64> {
    relaxation_time_from_excess(w - 1.0, tau)
}

/// Same as [`collective_relaxation_time`] but takes `w - 1` directly.
pub fn relaxation_time_from_excess(excess: f64, tau: f64) -> Result<f64> {
    if !(excess > 0.0) {
        return Err(Error::Singular {
            quantity: "collective relaxation time",
            excess,
        });
    }
    Ok(tau / (2.0 * excess))
}

/// Equilibrium phase density `f0(c)` [veh s/m^2].
pub fn equilibrium_distribution(c: f64, rho: f64, v: f64, alpha: f64) -> Result<f64> {
    check_state(rho, v, alpha)?;
    if !(c >= 0.0) {
        return Err(Error::Domain {
            quantity: "c",
            value: c,
            expected: "c >= 0",
        });
    }
    Ok(gamma_density(c, rho, v, alpha))
}

/// Velocity variance of the equilibrium, `v^2 / alpha`.
pub fn velocity_variance(v: f64, alpha: f64) -> f64 {
    v * v / alpha
}

/// Interaction factor `1 - p = alpha (w - 1) / (rho v tau)` implied by a
/// constant shape parameter.
pub fn passing_factor(rho: f64, v: f64, w: f64, tau: f64, alpha: f64) -> Result<f64> {
    let denominator = rho * v * tau;
    if !(denominator > 0.0 && denominator.is_finite()) {
        return Err(Error::Domain {
            quantity: "rho * v * tau",
            value: denominator,
            expected: "positive",
        });
    }
    if !(w >= 1.0) {
        return Err(Error::Domain {
            quantity: "w",
            value: w,
            expected: "w >= 1",
        });
    }
    Ok(alpha * (w - 1.0) / denominator)
}

/// Inverse of [`passing_factor`]: `alpha = rho (1 - p) v tau / (w - 1)`.
pub fn shape_parameter(rho: f64, one_minus_p: f64, v: f64, tau: f64, w: f64) -> Result<f64> {
    let excess = w - 1.0;
    if !(excess > 0.0) {
        return Err(Error::Singular {
            quantity: "shape parameter",
            excess,
        });
    }
    Ok(rho * one_minus_p * v * tau / excess)
}

pub(crate) fn checked_excess(rho: f64, p: &ModelParams) -> Result<f64> {
    let excess = aggressiveness_excess(rho, p)?;
    if excess > 0.0 {
        Ok(excess)
    } else {
        Err(Error::Singular {
            quantity: "first-order closure",
            excess,
        })
    }
}

/// The first-order correction at `point` as a distribution object.
pub fn first_order_correction(point: &KineticPoint, p: &ModelParams) -> Result<FirstOrderCorrection> {
    let equilibrium = Equilibrium::new(point.rho, point.v, p.alpha)?;
    let excess = checked_excess(point.rho, p)?;
    Ok(FirstOrderCorrection {
        equilibrium,
        amplitude: p.tau / excess * point.dv_dx,
    })
}

/// First-order correction `f1(c)` [veh s/m^2].
pub fn first_order_distribution(c: f64, point: &KineticPoint, p: &ModelParams) -> Result<f64> {
    use super::VelocityDistribution;
    if !(c >= 0.0) {
        return Err(Error::Domain {
            quantity: "c",
            value: c,
            expected: "c >= 0",
        });
    }
    Ok(first_order_correction(point, p)?.value(c))
}

/// Whether `f0 + f1` dips below zero for some `c >= 0`.
///
/// `f0 + f1 = f0 (1 - A/2 [alpha y^2 - 2y - 1])` with `A = tau/(w-1) dv/dx`.
/// For `A > 0` the bracket grows without bound and the sum is negative in
/// the far tail; for `A < 0` its minimum sits at `y = 1/alpha`.
pub fn first_order_negativity(point: &KineticPoint, p: &ModelParams) -> Result<bool> {
    let correction = first_order_correction(point, p)?;
    let amplitude = correction.amplitude();
    let alpha = p.alpha;
    Ok(if amplitude > 0.0 {
        true
    } else {
        let bracket_min = -1.0 - 1.0 / alpha;
        1.0 - 0.5 * amplitude * bracket_min < 0.0
    })
}

/// Traffic viscosity `mu = 2 (rho v^2/alpha) tau0 (alpha+1)/alpha` [veh m/s].
///
/// Returns zero when `rho` or `v` vanishes; otherwise `w = 1` is a
/// singularity error.
pub fn viscosity(rho: f64, v: f64, p: &ModelParams) -> Result<f64> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::Domain {
            quantity: "v",
            value: v,
            expected: "v >= 0",
        });
    }
    let excess = aggressiveness_excess(rho, p)?;
    if rho == 0.0 || v == 0.0 {
        return Ok(0.0);
    }
    let tau0 = relaxation_time_from_excess(excess, p.tau).map_err(|_| Error::Singular {
        quantity: "viscosity",
        excess,
    })?;
    Ok(2.0 * equilibrium_pressure(rho, v, p.alpha) * tau0 * p.pressure_factor())
}

/// Navier-Stokes-like traffic pressure `rho v^2/alpha - mu dv/dx`.
pub fn ce_pressure(point: &KineticPoint, p: &ModelParams) -> Result<f64> {
    let mu = viscosity(point.rho, point.v, p)?;
    Ok(point.equilibrium_pressure(p.alpha) - mu * point.dv_dx)
}
