//! Grad moment closure around the gamma equilibrium.
//!
//! The orthonormal polynomials for the weight `s^(alpha-1) e^(-s) / Gamma(alpha)`
//! are rescaled generalised Laguerre polynomials. They are generated from the
//! three-term recurrence of the monic family,
//!
//! ```text
//! sqrt(b_{n+1}) P_{n+1} = (s - a_n) P_n - sqrt(b_n) P_{n-1},
//! a_n = 2n + alpha,  b_n = n (n + alpha - 1),
//! ```
//!
//! which keeps every `P_n` at unit norm without forming factorials.

use super::chapman_enskog::relaxation_time_from_excess;
use super::distribution::{check_state, Equilibrium};
use super::{equilibrium_pressure, equilibrium_third_moment, GradMoments, KineticPoint, VelocityDistribution};
use crate::error::Result;
use crate::params::ModelParams;

/// `P_n(s)` for shape `alpha`.
pub fn orthonormal_polynomial(n: usize, alpha: f64, s: f64) -> f64 {
    let mut previous = 0.0;
    let mut current = 1.0;
    for k in 0..n {
        let next = recurrence_step(k, alpha, s, current, previous);
        previous = current;
        current = next;
    }
    current
}

/// `[P_0(s), ..., P_{n_max}(s)]`.
pub fn orthonormal_polynomials(n_max: usize, alpha: f64, s: f64) -> Vec<f64> {
    let mut values = Vec::with_capacity(n_max + 1);
    values.push(1.0);
    let mut previous = 0.0;
    for k in 0..n_max {
        let current = values[k];
        values.push(recurrence_step(k, alpha, s, current, previous));
        previous = current;
    }
    values
}

#[inline]
fn recurrence_step(k: usize, alpha: f64, s: f64, current: f64, previous: f64) -> f64 {
    let k = k as f64;
    let a_k = 2.0 * k + alpha;
    let sqrt_b_k = (k * (k + alpha - 1.0)).sqrt();
    let sqrt_b_next = ((k + 1.0) * (k + alpha)).sqrt();
    ((s - a_k) * current - sqrt_b_k * previous) / sqrt_b_next
}

/// Expansion coefficients `C_0..C_3` implied by the pressure and third moment.
pub fn grad_coefficients(m: &GradMoments, rho: f64, v: f64, alpha: f64) -> [f64; 4] {
    let p0 = equilibrium_pressure(rho, v, alpha);
    let phi0 = equilibrium_third_moment(rho, v, alpha);
    let pressure_excess = (m.pressure - p0) / p0;
    let third_excess = (m.third_moment - phi0) / phi0;
    let c2 = (alpha / (2.0 * (alpha + 1.0))).sqrt() * pressure_excess;
    let c3 = (2.0 * alpha / (3.0 * (alpha + 1.0) * (alpha + 2.0))).sqrt() * (third_excess - 3.0 * pressure_excess);
    [1.0, 0.0, c2, c3]
}

/// Grad distribution truncated after `P_2`, with the pressure as an
/// independent field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradDistribution {
    equilibrium: Equilibrium,
    c2: f64,
}

impl GradDistribution {
    pub fn new(rho: f64, v: f64, pressure: f64, alpha: f64) -> Result<Self> {
        let equilibrium = Equilibrium::new(rho, v, alpha)?;
        let moments = GradMoments {
            pressure,
            third_moment: equilibrium_third_moment(rho, v, alpha),
        };
        let [_, _, c2, _] = grad_coefficients(&moments, rho, v, alpha);
        Ok(Self { equilibrium, c2 })
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }
}

impl VelocityDistribution for GradDistribution {
    fn rho(&self) -> f64 {
        self.equilibrium.rho()
    }
    fn mean_velocity(&self) -> f64 {
        self.equilibrium.mean_velocity()
    }
    fn alpha(&self) -> f64 {
        self.equilibrium.alpha()
    }
    fn equilibrium_ratio(&self, c: f64) -> f64 {
        if self.c2 == 0.0 {
            return 1.0;
        }
        let alpha = self.alpha();
        let s = alpha * c / self.mean_velocity();
        1.0 + self.c2 * orthonormal_polynomial(2, alpha, s)
    }
}

/// Grad phase density `f(c)` for the given pressure.
pub fn grad_distribution(c: f64, rho: f64, v: f64, pressure: f64, alpha: f64) -> Result<f64> {
    check_state(rho, v, alpha)?;
    Ok(GradDistribution::new(rho, v, pressure, alpha)?.value(c))
}

/// Third central moment of the truncated Grad distribution,
/// `phi = 3 (phi0/p0) (p - 2 p0/3)`.
///
/// Written as `phi0 + 3 (phi0/p0) (p - p0)` so that `p = p0` returns `phi0`
/// bit for bit.
pub fn third_moment_closure(pressure: f64, rho: f64, v: f64, alpha: f64) -> f64 {
    let p0 = equilibrium_pressure(rho, v, alpha);
    let phi0 = equilibrium_third_moment(rho, v, alpha);
    let ratio = 2.0 * v / alpha;
    phi0 + 3.0 * ratio * (pressure - p0)
}

/// Inputs of the pressure-deviator balance other than `dv/dx`.
#[derive(Debug, Clone, Copy, Default)]
struct DeviatorState {
    deviator: f64,
    d_deviator_dt: f64,
    d_deviator_dx: f64,
}

/// Left-hand side of the pressure-deviator balance; its right-hand side is
/// `-deviator / tau0`.
fn deviator_balance_lhs(state: DeviatorState, point: &KineticPoint, alpha: f64) -> f64 {
    let p0 = point.equilibrium_pressure(alpha);
    // phi0 / p0 without dividing by a possibly vanishing p0
    let phi0_over_p0 = 2.0 * point.v / alpha;
    state.d_deviator_dt
        + 0.5 * (alpha + 4.0) * phi0_over_p0 * state.d_deviator_dx
        + 3.0 * (alpha + 2.0) / alpha * state.deviator * point.dv_dx
        + 2.0 * p0 * (alpha + 1.0) / alpha * point.dv_dx
}

/// First Maxwellian iterate of the pressure deviator: the equilibrium
/// deviator (zero) on the left of the balance, solved for the deviator on
/// the right.
pub fn maxwellian_first_iterate(point: &KineticPoint, p: &ModelParams) -> Result<f64> {
    check_nonnegative_state(point)?;
    let excess = super::aggressiveness_excess(point.rho, p)?;
    if point.rho == 0.0 || point.v == 0.0 {
        return Ok(0.0);
    }
    let tau0 = relaxation_time_from_excess(excess, p.tau)?;
    let lhs = deviator_balance_lhs(DeviatorState::default(), point, p.alpha);
    Ok(-tau0 * lhs)
}

fn check_nonnegative_state(point: &KineticPoint) -> Result<()> {
    if !(point.v >= 0.0 && point.v.is_finite()) {
        return Err(crate::Error::Domain {
            quantity: "v",
            value: point.v,
            expected: "v >= 0",
        });
    }
    Ok(())
}
