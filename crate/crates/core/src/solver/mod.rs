//! Finite-volume integrator on a periodic ring.
//!
//! Each step is a fractional step: a conservative update with Roe
//! flux-difference splitting, followed by a source update that averages the
//! source over the old and the convected state.

mod field;
mod roe;
mod source;
mod stepper;
mod tridiagonal;

pub use field::RoadField;
pub use roe::{
    reconstruction_residual, roe_average_velocity, roe_decomposition, roe_flux, shock_capturing_residual,
    sonic_interfaces, RoeDecomposition,
};
pub use source::{cell_coefficients, source_discretization, CellCoefficients, SourceParts};
pub use stepper::{RunOutcome, RunSummary, Solver, SolverConfig, SourceScheme, StepReport};
