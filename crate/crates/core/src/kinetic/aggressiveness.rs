use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Density-dependent aggressiveness `w(rho)`.
///
/// `w = 1` at both `rho = 0` and `rho = rho_0`, with its maximum `w_c` at
/// `rho_c`.
pub fn aggressiveness(rho: f64, p: &ModelParams) -> Result<f64> {
    aggressiveness_excess(rho, p).map(|excess| 1.0 + excess)
}

/// `w(rho) - 1`, evaluated without the cancellation that forming `w` first
/// would cause near the jam density.
pub fn aggressiveness_excess(rho: f64, p: &ModelParams) -> Result<f64> {
    if !(0.0..=p.rho_0).contains(&rho) {
        return Err(Error::Domain {
            quantity: "rho",
            value: rho,
            expected: "0 <= rho <= rho_0",
        });
    }
    let exponent = (p.rho_0 - p.rho_c) / p.rho_c;
    let congestion = (p.rho_0 - rho) / (p.rho_0 - p.rho_c);
    Ok((p.w_c - 1.0) * (rho / p.rho_c) * congestion.powf(exponent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn vanishes_at_both_ends() {
        let p = ModelParams::default();
        assert_eq!(aggressiveness(0.0, &p).unwrap(), 1.0);
        assert_eq!(aggressiveness(p.rho_0, &p).unwrap(), 1.0);
    }

    #[test]
    fn peaks_at_critical_density() {
        let p = ModelParams::default();
        assert_relative_eq!(aggressiveness(p.rho_c, &p).unwrap(), 1.2, max_relative = 1e-15);
    }

    #[test]
    fn mid_density_value() {
        // exponent (rho_0 - rho_c)/rho_c = 4: 1 + 0.2 * 2.5 * (0.1/0.16)^4
        let p = ModelParams::default();
        let expected = 1.0 + 0.2 * 2.5 * 0.625_f64.powi(4);
        assert_relative_eq!(aggressiveness(0.1, &p).unwrap(), expected, max_relative = 1e-14);
        assert_relative_eq!(expected, 1.076_293_945_312_5, max_relative = 1e-15);
    }

    #[test]
    fn out_of_range_is_a_domain_error() {
        let p = ModelParams::default();
        for rho in [-1e-9, 0.2000001, f64::NAN] {
            assert!(matches!(aggressiveness(rho, &p), Err(Error::Domain { .. })));
        }
    }

    #[test]
    fn excess_stays_positive_next_to_jam_density() {
        let p = ModelParams::default();
        let rho = p.rho_0 * (1.0 - 1e-6);
        let excess = aggressiveness_excess(rho, &p).unwrap();
        assert!(excess > 0.0);
        // forming w first would round the excess away
        assert_eq!(1.0 + excess, 1.0);
    }
}
