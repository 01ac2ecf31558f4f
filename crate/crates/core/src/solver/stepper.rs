use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::roe::{roe_flux, sonic_interfaces};
use super::source::{field_coefficients, interface_viscosities, source_parts, CellCoefficients};
use super::tridiagonal::solve_ring_diffusion;
use super::RoadField;
use crate::error::{Error, Result};
use crate::macro_model::{characteristic_factors, ConservedState, FluxVector};
use crate::params::ModelParams;
use crate::snapshot::Snapshot;

/// Time integration of the source sub-stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceScheme {
    /// Anticipation by the two-stage average; relaxation and viscosity by
    /// backward Euler in `v`, with `v_e` and `mu` taken from the convected
    /// state.
    #[default]
    Imex,
    /// The whole source by the two-stage average. Only stable when `dt` is
    /// below both `2 tau` and the viscous limit `rho dx^2 / (2 mu)`.
    Heun,
}

impl SourceScheme {
    pub fn name(self) -> &'static str {
        match self {
            Self::Imex => "imex",
            Self::Heun => "heun",
        }
    }
}

impl std::str::FromStr for SourceScheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "imex" => Ok(Self::Imex),
            "heun" => Ok(Self::Heun),
            other => Err(format!("unknown source scheme `{other}` (expected imex or heun)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Courant number in `(0, 1]`.
    pub cfl: f64,
    /// Simulated horizon [s].
    pub t_end: f64,
    /// Simulated time between snapshots [s].
    pub snapshot_interval: f64,
    /// Smallest density a cell may hold [veh/m].
    pub density_floor: f64,
    pub source_scheme: SourceScheme,
    /// Evaluate fluxes and cell coefficients on the rayon pool. Results are
    /// bit-identical to the sequential path.
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl: 0.9,
            t_end: 300.0,
            snapshot_interval: 10.0,
            density_floor: 1e-6 * ModelParams::default().rho_0,
            source_scheme: SourceScheme::Imex,
            parallel: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |field, reason: String| Err(Error::InvalidConfig { field, reason });
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return fail("cfl", format!("{} must lie in (0, 1]", self.cfl));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return fail("t_end", format!("{} must be finite and non-negative", self.t_end));
        }
        if !(self.snapshot_interval > 0.0 && self.snapshot_interval.is_finite()) {
            return fail(
                "snapshot_interval",
                format!("{} must be positive", self.snapshot_interval),
            );
        }
        if !(self.density_floor > 0.0 && self.density_floor.is_finite()) {
            return fail("density_floor", format!("{} must be positive", self.density_floor));
        }
        Ok(())
    }
}

/// Diagnostics of one accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepReport {
    pub dt: f64,
    /// `dt / dx * max |Lambda|` over the field the step started from.
    pub courant: f64,
    /// Vehicles added by raising convected densities to the floor.
    pub floor_correction: f64,
    /// Momentum added by clipping negative `q` after the source stage [veh/s].
    pub momentum_clipped: f64,
    /// Interfaces flagged by [`sonic_interfaces`] before the step.
    pub sonic_interfaces: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunSummary {
    pub steps: usize,
    pub t_final: f64,
    pub max_courant: f64,
    pub cfl_violations: usize,
    pub floor_correction: f64,
    pub momentum_clipped: f64,
    pub sonic_interfaces: usize,
    pub vehicles_initial: f64,
    pub vehicles_final: f64,
    pub snapshots: usize,
}

impl RunSummary {
    /// Relative change of the vehicle count not explained by floor corrections.
    pub fn conservation_drift(&self) -> f64 {
        (self.vehicles_final - self.vehicles_initial - self.floor_correction) / self.vehicles_initial
    }

    /// Floor corrections relative to the initial vehicle count.
    pub fn floor_fraction(&self) -> f64 {
        self.floor_correction / self.vehicles_initial
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub field: RoadField,
    pub summary: RunSummary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solver {
    pub params: ModelParams,
    pub config: SolverConfig,
}

impl Solver {
    pub fn new(params: ModelParams, config: SolverConfig) -> Result<Self> {
        params.validate()?;
        config.validate()?;
        Ok(Self { params, config })
    }

    fn velocity(&self, cell: &ConservedState) -> f64 {
        cell.q / cell.rho.max(self.config.density_floor)
    }

    fn max_speed(&self, field: &RoadField) -> f64 {
        let [_, k2] = characteristic_factors(self.params.alpha);
        field
            .cells()
            .iter()
            .map(|c| k2 * self.velocity(c).abs())
            .fold(0.0, f64::max)
    }

    /// Largest stable step `cfl dx / max |Lambda|`; on a field at rest the
    /// free-flow speed stands in for `max |Lambda|`.
    pub fn cfl_dt(&self, field: &RoadField) -> f64 {
        let speed = self.max_speed(field);
        let speed = if speed > 0.0 { speed } else { self.params.v_0 };
        self.config.cfl * field.dx() / speed
    }

    fn map_cells<T, F>(&self, n: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> Result<T> + Sync + Send,
    {
        if self.config.parallel {
            (0..n).into_par_iter().map(f).collect()
        } else {
            (0..n).map(f).collect()
        }
    }

    fn coefficients(&self, field: &RoadField) -> Result<Vec<CellCoefficients>> {
        field_coefficients(field, &self.params, self.config.density_floor, self.config.parallel)
    }

    /// Advances `field` by `dt`: a conservative Roe update followed by the
    /// source update.
    pub fn step(&self, field: &RoadField, dt: f64) -> Result<(RoadField, StepReport)> {
        let mut report = StepReport {
            dt,
            courant: dt / field.dx() * self.max_speed(field),
            sonic_interfaces: sonic_interfaces(field, self.params.alpha).len(),
            ..StepReport::default()
        };
        if dt == 0.0 {
            return Ok((field.clone(), report));
        }
        let failure = |i: usize, cell: &ConservedState, reason| Error::StepFailure {
            cell: i,
            x: field.cell_center(i),
            rho: cell.rho,
            q: cell.q,
            reason,
        };

        let cells = field.cells();
        let n = cells.len();
        let alpha = self.params.alpha;
        let fluxes: Vec<FluxVector> = self.map_cells(n, |i| {
            roe_flux(&cells[i], &cells[field.right_of(i)], alpha)
                .map_err(|_| failure(i, &cells[i], "degenerate state at interface"))
        })?;

        let ratio = dt / field.dx();
        let floor = self.config.density_floor;
        let mut star = field.clone();
        for (i, cell) in star.cells_mut().iter_mut().enumerate() {
            let (fr, fl) = (fluxes[i], fluxes[field.left_of(i)]);
            cell.rho -= ratio * (fr.f1 - fl.f1);
            cell.q -= ratio * (fr.f2 - fl.f2);
            if !(cell.rho.is_finite() && cell.q.is_finite()) {
                return Err(failure(i, cell, "non-finite state after convection"));
            }
            if cell.rho < 0.0 {
                return Err(failure(i, cell, "negative density after convection"));
            }
            if cell.rho < floor {
                report.floor_correction += (floor - cell.rho) * field.dx();
                cell.rho = floor;
            }
        }

        let old = self.coefficients(field)?;
        let convected = self.coefficients(&star)?;
        let dx = field.dx();
        let tau = self.params.tau;
        let half = 0.5 * dt;
        let mut next = star.clone();
        match self.config.source_scheme {
            SourceScheme::Heun => {
                for (i, cell) in next.cells_mut().iter_mut().enumerate() {
                    let s = source_parts(&old, i, dx, tau).total() + source_parts(&convected, i, dx, tau).total();
                    cell.q += half * s;
                }
            }
            SourceScheme::Imex => {
                // rho* v - dt rho* (v_e - v)/tau - dt (mu v_x)_x = q* + anticipation
                let relax = dt / tau;
                let mut rhs = Vec::with_capacity(n);
                for (i, cell) in star.cells().iter().enumerate() {
                    let s =
                        source_parts(&old, i, dx, tau).anticipation + source_parts(&convected, i, dx, tau).anticipation;
                    let q = cell.q + half * s;
                    if q < 0.0 {
                        report.momentum_clipped -= q;
                    }
                    rhs.push(q.max(0.0) + relax * cell.rho * convected[i].optimal_velocity);
                }
                let theta = dt / (dx * dx);
                let coupling: Vec<f64> = interface_viscosities(&convected).iter().map(|m| theta * m).collect();
                let excess: Vec<f64> = star.cells().iter().map(|c| c.rho * (1.0 + relax)).collect();
                let v = solve_ring_diffusion(&excess, &coupling, &rhs);
                for (cell, v) in next.cells_mut().iter_mut().zip(v) {
                    cell.q = cell.rho * v;
                }
            }
        }
        for (i, cell) in next.cells_mut().iter_mut().enumerate() {
            if !cell.q.is_finite() {
                return Err(failure(i, cell, "non-finite momentum after source"));
            }
            if cell.q < 0.0 {
                report.momentum_clipped -= cell.q;
                cell.q = 0.0;
            }
        }
        Ok((next, report))
    }

    /// Integrates from `t = 0` to `t_end`, handing a snapshot to `sink` at
    /// `t = 0`, at every multiple of the snapshot interval and at `t_end`.
    /// Steps are shortened so that these times are hit exactly.
    pub fn run<E, S>(&self, field: RoadField, sink: S) -> Result<RunOutcome, E>
    where
        E: From<Error>,
        S: FnMut(Snapshot) -> Result<(), E>,
    {
        self.run_observed(field, sink, |_, _, _| {})
    }

    /// [`Solver::run`], additionally calling `observer(t, field, report)`
    /// after every accepted step.
    pub fn run_observed<E, S, O>(&self, field: RoadField, mut sink: S, mut observer: O) -> Result<RunOutcome, E>
    where
        E: From<Error>,
        S: FnMut(Snapshot) -> Result<(), E>,
        O: FnMut(f64, &RoadField, &StepReport),
    {
        self.params.validate()?;
        self.config.validate()?;
        let t_end = self.config.t_end;
        let interval = self.config.snapshot_interval;
        let mut summary = RunSummary {
            vehicles_initial: field.total_vehicles(),
            ..RunSummary::default()
        };
        let mut field = field;
        let mut t = 0.0;
        sink(field.snapshot(t))?;
        summary.snapshots += 1;
        let mut emitted = 1usize;
        while t < t_end {
            let target = (emitted as f64 * interval).min(t_end);
            let mut dt = self.cfl_dt(&field);
            let reached = t + dt >= target;
            if reached {
                dt = target - t;
            }
            let (next, report) = self.step(&field, dt).map_err(|e| Error::Run {
                t,
                step: summary.steps,
                source: Box::new(e),
            })?;
            field = next;
            t = if reached { target } else { t + dt };
            summary.steps += 1;
            summary.max_courant = summary.max_courant.max(report.courant);
            if report.courant > 1.0 {
                summary.cfl_violations += 1;
            }
            summary.floor_correction += report.floor_correction;
            summary.momentum_clipped += report.momentum_clipped;
            summary.sonic_interfaces += report.sonic_interfaces;
            observer(t, &field, &report);
            if reached {
                sink(field.snapshot(t))?;
                summary.snapshots += 1;
                emitted += 1;
            }
        }
        summary.t_final = t;
        summary.vehicles_final = field.total_vehicles();
        Ok(RunOutcome { field, summary })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::macro_model::equilibrium_speed;
    use approx::assert_relative_eq;

    fn solver() -> Solver {
        Solver::new(ModelParams::default(), SolverConfig::default()).unwrap()
    }

    fn uniform(rho: f64, v: f64, n: usize, dx: f64) -> RoadField {
        RoadField::new(vec![ConservedState::from_primitive(rho, v); n], n as f64 * dx).unwrap()
    }

    fn blockade(n: usize) -> RoadField {
        let p = ModelParams::default();
        let floor = SolverConfig::default().density_floor;
        let dx = 20_000.0 / n as f64;
        let cells = (0..n)
            .map(|i| {
                let x = (i as f64 + 0.5) * dx;
                let rho = if x > 2500.0 && x < 7500.0 { 0.198 } else { floor };
                ConservedState::from_primitive(rho, equilibrium_speed(rho, &p).unwrap())
            })
            .collect();
        RoadField::new(cells, 20_000.0).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            cfl: 1.5,
            ..SolverConfig::default()
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig { field: "cfl", .. })));
        let bad = SolverConfig {
            snapshot_interval: 0.0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!("HEUN".parse::<SourceScheme>().unwrap(), SourceScheme::Heun);
        assert!("rk4".parse::<SourceScheme>().is_err());
    }

    #[test]
    fn cfl_dt_values() {
        let s = solver();
        let dt = s.cfl_dt(&uniform(0.02, 30.0, 400, 50.0));
        assert!((dt - 1.366).abs() < 5e-4, "{dt}");
        let [_, k2] = characteristic_factors(125.0);
        let unit = Solver {
            config: SolverConfig {
                cfl: 1.0,
                ..SolverConfig::default()
            },
            ..s
        };
        let dt = unit.cfl_dt(&uniform(0.1, 50.0 / k2, 1, 50.0));
        assert_relative_eq!(dt, 1.0, max_relative = 1e-15);
        let dt = s.cfl_dt(&uniform(0.1, 0.0, 10, 50.0));
        assert_relative_eq!(dt, 0.9 * 50.0 / 30.0, max_relative = 1e-15);
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let s = solver();
        let p = ModelParams::default();
        for scheme in [SourceScheme::Imex, SourceScheme::Heun] {
            let s = Solver {
                config: SolverConfig {
                    source_scheme: scheme,
                    ..s.config
                },
                ..s
            };
            let field = uniform(0.05, equilibrium_speed(0.05, &p).unwrap(), 40, 50.0);
            let (next, _) = s.step(&field, s.cfl_dt(&field)).unwrap();
            for (a, b) in next.cells().iter().zip(field.cells()) {
                assert!((a.rho - b.rho).abs() <= 1e-14 * b.rho);
                assert!((a.q - b.q).abs() <= 1e-14 * b.q);
            }
        }
    }

    #[test]
    fn zero_dt_is_identity() {
        let s = solver();
        let field = blockade(400);
        let (next, report) = s.step(&field, 0.0).unwrap();
        assert_eq!(next, field);
        assert_eq!(report.courant, 0.0);
    }

    #[test]
    fn single_step_conserves_vehicles() {
        let s = solver();
        let field = blockade(400);
        let (next, report) = s.step(&field, s.cfl_dt(&field)).unwrap();
        let before = field.total_vehicles();
        let after = next.total_vehicles() - report.floor_correction;
        assert!(((after - before) / before).abs() <= 1e-12);
        assert!(report.courant <= 0.9 + 1e-12);
    }

    #[test]
    fn imex_keeps_velocity_bounded() {
        let s = solver();
        let mut field = blockade(400);
        for _ in 0..20 {
            field = s.step(&field, s.cfl_dt(&field)).unwrap().0;
        }
        for c in field.cells() {
            let v = c.q / c.rho;
            assert!((0.0..=30.5).contains(&v), "{v}");
        }
    }

    #[test]
    fn zero_horizon_emits_initial_snapshot_only() {
        let s = Solver {
            config: SolverConfig {
                t_end: 0.0,
                ..SolverConfig::default()
            },
            ..solver()
        };
        let mut seen = Vec::new();
        let out = s
            .run(blockade(40), |snap| {
                seen.push(snap);
                Ok::<_, Error>(())
            })
            .unwrap();
        assert_eq!(seen.len(), 1);
        assert_eq!(seen[0].t, 0.0);
        assert_eq!(out.summary.steps, 0);
    }

    #[test]
    fn snapshots_land_on_interval_multiples() {
        let config = SolverConfig {
            t_end: 25.0,
            snapshot_interval: 10.0,
            ..SolverConfig::default()
        };
        let s = Solver { config, ..solver() };
        let mut times = Vec::new();
        let out = s
            .run(blockade(80), |snap| {
                times.push(snap.t);
                Ok::<_, Error>(())
            })
            .unwrap();
        assert_eq!(times, vec![0.0, 10.0, 20.0, 25.0]);
        assert_eq!(out.summary.t_final, 25.0);
        assert_eq!(out.summary.cfl_violations, 0);
    }

    #[test]
    fn parallel_matches_sequential() {
        let config = SolverConfig {
            t_end: 20.0,
            ..SolverConfig::default()
        };
        let seq = Solver { config, ..solver() };
        let par = Solver {
            config: SolverConfig {
                parallel: true,
                ..config
            },
            ..seq
        };
        let a = seq.run(blockade(200), |_| Ok::<_, Error>(())).unwrap();
        let b = par.run(blockade(200), |_| Ok::<_, Error>(())).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sink_errors_abort_the_run() {
        let s = solver();
        let result: Result<RunOutcome, anyhow::Error> = s.run(blockade(40), |_| Err(anyhow::anyhow!("full")));
        assert_eq!(result.unwrap_err().to_string(), "full");
    }

    #[test]
    fn empty_cells_fail_with_diagnostics() {
        let s = solver();
        let mut cells = vec![ConservedState::from_primitive(0.1, 10.0); 5];
        cells[2] = ConservedState::new(0.0, 0.0);
        let field = RoadField::new(cells, 250.0).unwrap();
        let err = s.step(&field, 0.5).unwrap_err();
        assert!(
            matches!(
                err,
                Error::StepFailure { cell: 1, .. } | Error::StepFailure { cell: 2, .. }
            ),
            "{err}"
        );
    }
}
