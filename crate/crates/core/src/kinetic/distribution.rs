use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// A velocity distribution `f(c) = f0(c) * r(c)`, where `f0` is the gamma
/// equilibrium with the same density, mean velocity and shape.
///
/// Quadrature works on the ratio `r`, so the gamma weight never has to be
/// evaluated at the nodes.
pub trait VelocityDistribution {
    fn rho(&self) -> f64;
    fn mean_velocity(&self) -> f64;
    fn alpha(&self) -> f64;

    /// `f(c) / f0(c)`.
    fn equilibrium_ratio(&self, c: f64) -> f64;

    /// Phase density `f(c)` [veh s/m^2].
    fn value(&self, c: f64) -> f64 {
        gamma_density(c, self.rho(), self.mean_velocity(), self.alpha()) * self.equilibrium_ratio(c)
    }
}

/// `rho` times the gamma density with shape `alpha` and mean `v`, evaluated
/// in log space so that `Gamma(alpha)` never materialises.
pub(crate) fn gamma_density(c: f64, rho: f64, v: f64, alpha: f64) -> f64 {
    if c <= 0.0 || rho <= 0.0 {
        return 0.0;
    }
    let s = alpha * c / v;
    let log_f = alpha.ln() - ln_gamma(alpha) + rho.ln() - v.ln() + (alpha - 1.0) * s.ln() - s;
    log_f.exp()
}

pub(crate) fn check_state(rho: f64, v: f64, alpha: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Domain {
            quantity: "v",
            value: v,
            expected: "v > 0",
        });
    }
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::Domain {
            quantity: "rho",
            value: rho,
            expected: "rho >= 0",
        });
    }
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::Domain {
            quantity: "alpha",
            value: alpha,
            expected: "alpha > 1",
        });
    }
    Ok(())
}

/// Zeroth-order (gamma) distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    rho: f64,
    v: f64,
    alpha: f64,
}

impl Equilibrium {
    pub fn new(rho: f64, v: f64, alpha: f64) -> Result<Self> {
        check_state(rho, v, alpha)?;
        Ok(Self { rho, v, alpha })
    }

    /// Reduced deviation `c/v - 1`.
    #[inline]
    pub fn reduced_deviation(&self, c: f64) -> f64 {
        c / self.v - 1.0
    }
}

impl VelocityDistribution for Equilibrium {
    fn rho(&self) -> f64 {
        self.rho
    }
    fn mean_velocity(&self) -> f64 {
        self.v
    }
    fn alpha(&self) -> f64 {
        self.alpha
    }
    fn equilibrium_ratio(&self, _c: f64) -> f64 {
        1.0
    }
}

/// First-order Chapman-Enskog correction `f1` on its own.
///
/// `f1 = -(f0/2) * amplitude * [alpha y^2 - 2 y - 1]` with `y = c/v - 1` and
/// `amplitude = tau/(w-1) * dv/dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderCorrection {
    pub(crate) equilibrium: Equilibrium,
    pub(crate) amplitude: f64,
}

impl FirstOrderCorrection {
    pub fn equilibrium(&self) -> &Equilibrium {
        &self.equilibrium
    }

    /// `tau/(w-1) * dv/dx` [dimensionless].
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    fn bracket(&self, c: f64) -> f64 {
        let y = self.equilibrium.reduced_deviation(c);
        self.equilibrium.alpha * y * y - 2.0 * y - 1.0
    }
}

impl VelocityDistribution for FirstOrderCorrection {
    fn rho(&self) -> f64 {
        self.equilibrium.rho
    }
    fn mean_velocity(&self) -> f64 {
        self.equilibrium.v
    }
    fn alpha(&self) -> f64 {
        self.equilibrium.alpha
    }
    fn equilibrium_ratio(&self, c: f64) -> f64 {
        -0.5 * self.amplitude * self.bracket(c)
    }
}

/// `f0 + f1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChapmanEnskog(pub FirstOrderCorrection);

impl VelocityDistribution for ChapmanEnskog {
    fn rho(&self) -> f64 {
        self.0.rho()
    }
    fn mean_velocity(&self) -> f64 {
        self.0.mean_velocity()
    }
    fn alpha(&self) -> f64 {
        self.0.alpha()
    }
    fn equilibrium_ratio(&self, c: f64) -> f64 {
        1.0 + self.0.equilibrium_ratio(c)
    }
}
