use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical and model constants, SI units throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Shape parameter of the equilibrium gamma distribution (> 1).
    pub alpha: f64,
    /// Individual relaxation time [s].
    pub tau: f64,
    /// Peak aggressiveness, reached at `rho_c` (> 1).
    pub w_c: f64,
    /// Critical density [veh/m].
    pub rho_c: f64,
    /// Jam density [veh/m].
    pub rho_0: f64,
    /// Free-flow speed [m/s].
    pub v_0: f64,
    /// Offset of the tanh equilibrium speed-density curve.
    pub a: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            alpha: 125.0,
            tau: 8.0,
            w_c: 1.2,
            rho_c: 0.04,
            rho_0: 0.2,
            v_0: 30.0,
            a: 3.9,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, field: &'static str, reason: String) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter { field, reason })
            }
        }
        let finite = [
            ("alpha", self.alpha),
            ("tau", self.tau),
            ("w_c", self.w_c),
            ("rho_c", self.rho_c),
            ("rho_0", self.rho_0),
            ("v_0", self.v_0),
            ("a", self.a),
        ];
        for (field, value) in finite {
            check(value.is_finite(), field, format!("{value} is not finite"))?;
        }
        check(self.alpha > 1.0, "alpha", format!("{} must exceed 1", self.alpha))?;
        check(self.tau > 0.0, "tau", format!("{} must be positive", self.tau))?;
        check(self.w_c > 1.0, "w_c", format!("{} must exceed 1", self.w_c))?;
        check(self.rho_c > 0.0, "rho_c", format!("{} must be positive", self.rho_c))?;
        check(
            self.rho_c < self.rho_0,
            "rho_0",
            format!("jam density {} must exceed rho_c = {}", self.rho_0, self.rho_c),
        )?;
        check(self.v_0 > 0.0, "v_0", format!("{} must be positive", self.v_0))?;
        check(self.a > 0.0, "a", format!("{} must be positive", self.a))?;
        Ok(())
    }

    /// `(alpha + 1) / alpha`, the factor that turns `rho v^2` into `rho v^2 + rho c^2`.
    #[inline]
    pub fn pressure_factor(&self) -> f64 {
        (self.alpha + 1.0) / self.alpha
    }
}
