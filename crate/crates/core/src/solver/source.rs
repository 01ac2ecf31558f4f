//! Cell-centred discretisation of the momentum source.

use super::RoadField;
use crate::error::Result;
use crate::kinetic::viscosity;
use crate::macro_model::{anticipation_coefficient, optimal_velocity, SourceVector};
use crate::params::ModelParams;

/// Per-cell ingredients of the source term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellCoefficients {
    pub rho: f64,
    /// `q / max(rho, floor)`.
    pub v: f64,
    pub optimal_velocity: f64,
    pub anticipation: f64,
    pub viscosity: f64,
}

/// The three terms of the momentum source of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceParts {
    /// `rho (v_e - v) / tau`.
    pub relaxation: f64,
    /// `-(b/2)(v_{i+1} - v_{i-1}) / dx`.
    pub anticipation: f64,
    /// Discrete `(mu v_x)_x`.
    pub viscous: f64,
}

impl SourceParts {
    pub fn total(&self) -> f64 {
        self.relaxation + self.anticipation + self.viscous
    }
}

/// Coefficients of one cell. The density entering `v_e` and `mu` is held in
/// `[floor, rho_0 - floor]` and the velocity entering `mu` at `>= 0`, which
/// keeps both finite on vacuum and jammed cells.
pub fn cell_coefficients(rho: f64, q: f64, p: &ModelParams, floor: f64) -> Result<CellCoefficients> {
    let v = q / rho.max(floor);
    let clamped = rho.clamp(floor, p.rho_0 - floor);
    Ok(CellCoefficients {
        rho,
        v,
        optimal_velocity: optimal_velocity(clamped, v, p)?,
        anticipation: anticipation_coefficient(rho, v, p.alpha),
        viscosity: viscosity(clamped, v.max(0.0), p)?,
    })
}

pub(crate) fn field_coefficients(
    field: &RoadField,
    p: &ModelParams,
    floor: f64,
    parallel: bool,
) -> Result<Vec<CellCoefficients>> {
    let build = |c: &crate::macro_model::ConservedState| cell_coefficients(c.rho, c.q, p, floor);
    if parallel {
        use rayon::prelude::*;
        field.cells().par_iter().map(build).collect()
    } else {
        field.cells().iter().map(build).collect()
    }
}

/// Interface viscosities `mu_{i+1/2}` as arithmetic means of the cell values.
pub(crate) fn interface_viscosities(coeffs: &[CellCoefficients]) -> Vec<f64> {
    let n = coeffs.len();
    (0..n)
        .map(|i| 0.5 * (coeffs[i].viscosity + coeffs[(i + 1) % n].viscosity))
        .collect()
}

pub(crate) fn source_parts(coeffs: &[CellCoefficients], i: usize, dx: f64, tau: f64) -> SourceParts {
    let n = coeffs.len();
    let left = &coeffs[(i + n - 1) % n];
    let cell = &coeffs[i];
    let right = &coeffs[(i + 1) % n];
    let relaxation = cell.rho * (cell.optimal_velocity - cell.v) / tau;
    let anticipation = -0.5 * cell.anticipation * (right.v - left.v) / dx;
    let mu_plus = 0.5 * (cell.viscosity + right.viscosity);
    let mu_minus = 0.5 * (left.viscosity + cell.viscosity);
    let viscous = (mu_plus * (right.v - cell.v) - mu_minus * (cell.v - left.v)) / (dx * dx);
    SourceParts {
        relaxation,
        anticipation,
        viscous,
    }
}

/// Discrete source `S_i` of cell `i`, with periodic neighbours.
pub fn source_discretization(field: &RoadField, i: usize, p: &ModelParams, floor: f64) -> Result<SourceVector> {
    let n = field.len();
    let cells = field.cells();
    let mut local = Vec::with_capacity(3);
    for j in [field.left_of(i), i, field.right_of(i)] {
        local.push(cell_coefficients(cells[j].rho, cells[j].q, p, floor)?);
    }
    // A ring of one or two cells aliases the neighbours.
    let parts = if n >= 3 {
        source_parts(&local, 1, field.dx(), p.tau)
    } else {
        let all = field_coefficients(field, p, floor, false)?;
        source_parts(&all, i, field.dx(), p.tau)
    };
    Ok(SourceVector {
        s1: 0.0,
        s2: parts.total(),
    })
}
