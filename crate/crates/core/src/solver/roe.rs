//! Roe flux-difference splitting for the traffic system.
//!
//! The Roe-averaged velocity `v_bar` fully determines `A(U_bar)`; no density
//! average is needed. Both characteristic speeds are non-negative multiples of
//! `v_bar`, so for `v >= 0` the Roe flux reduces to pure upwinding from the
//! left cell.

use super::RoadField;
use crate::error::Result;
use crate::macro_model::{characteristic_factors, flux, jacobian_at_velocity, ConservedState, FluxVector};

/// Eigenstructure of `A(U_bar)` and the wave strengths of the interface jump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoeDecomposition {
    pub lambda: [f64; 2],
    pub sigma: [f64; 2],
    /// Right eigenvectors, `evec[k] = (1, lambda[k])`.
    pub evec: [[f64; 2]; 2],
}

/// Square-root density weighted average of the two velocities. Falls back to
/// the arithmetic mean when both densities vanish.
pub fn roe_average_velocity(left: &ConservedState, right: &ConservedState) -> f64 {
    let wl = left.rho.max(0.0).sqrt();
    let wr = right.rho.max(0.0).sqrt();
    let vl = if left.rho > 0.0 { left.velocity() } else { 0.0 };
    let vr = if right.rho > 0.0 { right.velocity() } else { 0.0 };
    if wl + wr > 0.0 {
        (wl * vl + wr * vr) / (wl + wr)
    } else {
        0.5 * (vl + vr)
    }
}

/// Wave decomposition of `right - left`.
///
/// At `v_bar = 0` the Jacobian is not diagonalisable; both waves then share
/// `(1, 0)` and split the density jump evenly. This only arises when both
/// velocities are zero, in which case the momentum jump is zero as well.
pub fn roe_decomposition(left: &ConservedState, right: &ConservedState, alpha: f64) -> Result<RoeDecomposition> {
    flux(left, alpha)?;
    flux(right, alpha)?;
    Ok(decompose(left, right, alpha))
}

fn decompose(left: &ConservedState, right: &ConservedState, alpha: f64) -> RoeDecomposition {
    let v_bar = roe_average_velocity(left, right);
    let [k1, k2] = characteristic_factors(alpha);
    let lambda = [k1 * v_bar, k2 * v_bar];
    let evec = [[1.0, lambda[0]], [1.0, lambda[1]]];
    let jump = *right - *left;
    let sigma = if v_bar == 0.0 {
        [0.5 * jump.rho, 0.5 * jump.rho]
    } else {
        let scale = alpha / (2.0 * (alpha + 1.0).sqrt());
        let reduced = jump.q / v_bar;
        [-scale * (reduced - k2 * jump.rho), scale * (reduced - k1 * jump.rho)]
    };
    RoeDecomposition { lambda, sigma, evec }
}

/// Roe numerical flux `(F_l + F_r)/2 - 1/2 sum sigma_k |lambda_k| e_k`.
pub fn roe_flux(left: &ConservedState, right: &ConservedState, alpha: f64) -> Result<FluxVector> {
    let fl = flux(left, alpha)?;
    let fr = flux(right, alpha)?;
    let d = decompose(left, right, alpha);
    let mut f1 = 0.5 * (fl.f1 + fr.f1);
    let mut f2 = 0.5 * (fl.f2 + fr.f2);
    for k in 0..2 {
        let w = 0.5 * d.sigma[k] * d.lambda[k].abs();
        f1 -= w * d.evec[k][0];
        f2 -= w * d.evec[k][1];
    }
    Ok(FluxVector::new(f1, f2))
}

/// `|F(U_r) - F(U_l) - A(U_bar)(U_r - U_l)| / |F(U_r) - F(U_l)|` in the
/// Euclidean norm; zero when the flux jump vanishes identically.
pub fn shock_capturing_residual(left: &ConservedState, right: &ConservedState, alpha: f64) -> Result<f64> {
    let df = flux(right, alpha)? - flux(left, alpha)?;
    let du = *right - *left;
    let a = jacobian_at_velocity(roe_average_velocity(left, right), alpha);
    let r1 = df.f1 - (a[0][0] * du.rho + a[0][1] * du.q);
    let r2 = df.f2 - (a[1][0] * du.rho + a[1][1] * du.q);
    let norm = df.f1.hypot(df.f2);
    let residual = r1.hypot(r2);
    Ok(if norm > 0.0 { residual / norm } else { residual })
}

/// `|U_r - U_l - sum sigma_k e_k| / |U_r - U_l|`.
pub fn reconstruction_residual(left: &ConservedState, right: &ConservedState, alpha: f64) -> Result<f64> {
    let d = roe_decomposition(left, right, alpha)?;
    let du = *right - *left;
    let r1 = du.rho - (d.sigma[0] * d.evec[0][0] + d.sigma[1] * d.evec[1][0]);
    let r2 = du.q - (d.sigma[0] * d.evec[0][1] + d.sigma[1] * d.evec[1][1]);
    let norm = du.rho.hypot(du.q);
    let residual = r1.hypot(r2);
    Ok(if norm > 0.0 { residual / norm } else { residual })
}

/// Interfaces `i + 1/2` where some characteristic speed changes sign from
/// negative in cell `i` to positive in cell `i + 1`, the configuration in
/// which plain Roe can admit an expansion shock.
pub fn sonic_interfaces(field: &RoadField, alpha: f64) -> Vec<usize> {
    let [k1, k2] = characteristic_factors(alpha);
    let cells = field.cells();
    (0..cells.len())
        .filter(|&i| {
            let vl = cells[i].velocity();
            let vr = cells[field.right_of(i)].velocity();
            [k1, k2].iter().any(|k| k * vl < 0.0 && k * vr > 0.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const ALPHA: f64 = 125.0;

    #[test]
    fn average_velocity_cases() {
        let a = ConservedState::from_primitive(0.1, 10.0);
        let b = ConservedState::from_primitive(0.1, 4.0);
        assert_relative_eq!(roe_average_velocity(&a, &b), 7.0, max_relative = 1e-15);
        let l = ConservedState::from_primitive(0.04, 10.0);
        let r = ConservedState::from_primitive(0.16, 5.0);
        assert_relative_eq!(roe_average_velocity(&l, &r), 20.0 / 3.0, max_relative = 1e-14);
        let same = ConservedState::from_primitive(0.07, 12.5);
        let other = ConservedState::from_primitive(0.01, 12.5);
        assert_relative_eq!(roe_average_velocity(&same, &other), 12.5, max_relative = 1e-15);
    }

    #[test]
    fn average_velocity_of_two_empty_cells() {
        let empty = ConservedState::new(0.0, 0.0);
        assert_eq!(roe_average_velocity(&empty, &empty), 0.0);
    }

    #[test]
    fn equal_states_have_no_waves() {
        let u = ConservedState::from_primitive(0.1, 20.0);
        let d = roe_decomposition(&u, &u, ALPHA).unwrap();
        assert_eq!(d.sigma, [0.0, 0.0]);
        assert_eq!(roe_flux(&u, &u, ALPHA).unwrap(), flux(&u, ALPHA).unwrap());
    }

    #[test]
    fn upwinds_from_the_left_when_both_speeds_positive() {
        let l = ConservedState::from_primitive(0.15, 3.0);
        let r = ConservedState::from_primitive(0.02, 28.0);
        let f = roe_flux(&l, &r, ALPHA).unwrap();
        let fl = flux(&l, ALPHA).unwrap();
        assert!((f.f1 - fl.f1).abs() <= 1e-12 * fl.f1.abs());
        assert!((f.f2 - fl.f2).abs() <= 1e-12 * fl.f2.abs());
    }

    #[test]
    fn degenerate_rest_states() {
        let l = ConservedState::new(0.19, 0.0);
        let r = ConservedState::new(0.05, 0.0);
        let d = roe_decomposition(&l, &r, ALPHA).unwrap();
        assert_eq!(d.lambda, [0.0, 0.0]);
        assert_eq!(reconstruction_residual(&l, &r, ALPHA).unwrap(), 0.0);
        assert_eq!(roe_flux(&l, &r, ALPHA).unwrap(), FluxVector::new(0.0, 0.0));
    }

    #[test]
    fn decomposition_rejects_empty_cell() {
        let l = ConservedState::new(0.0, 0.0);
        let r = ConservedState::from_primitive(0.05, 3.0);
        assert!(roe_decomposition(&l, &r, ALPHA).is_err());
    }

    #[test]
    fn no_sonic_points_for_forward_traffic() {
        let cells = (0..10).map(|i| ConservedState::from_primitive(0.1, i as f64)).collect();
        let field = RoadField::new(cells, 500.0).unwrap();
        assert!(sonic_interfaces(&field, ALPHA).is_empty());
        let cells = vec![
            ConservedState::from_primitive(0.1, -1.0),
            ConservedState::from_primitive(0.1, 2.0),
            ConservedState::from_primitive(0.1, 2.0),
        ];
        let field = RoadField::new(cells, 150.0).unwrap();
        assert_eq!(sonic_interfaces(&field, ALPHA), vec![0]);
    }
}
