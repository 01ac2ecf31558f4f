//! Blockade-removal scenario: configuration, initial data, snapshot files,
//! plots and the validation suites.
//!
//! A run directory holds `resolved_config.toml`, one `snapshot_NNNNN.csv`
//! per output time and `summary.json`.

mod config;
pub mod plot;
pub mod validate;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

pub use config::{
    load_config, load_config_unchecked, parse_config, parse_config_unchecked, ScenarioConfig, RESOLVED_CONFIG,
};
pub use plot::emit_plots;
pub use validate::{Suite, SuiteReport};

use crate::error::Error;
use crate::macro_model::{equilibrium_speed, ConservedState};
use crate::snapshot::{Snapshot, SnapshotError};
use crate::solver::{RoadField, RunOutcome, Solver};

pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },

    #[error("{}:{line}:{column}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: String, reason: String },

    #[error("cannot write {}: {source}", path.display())]
    Output { path: PathBuf, source: std::io::Error },

    #[error("{}: {source}", path.display())]
    Snapshot { path: PathBuf, source: SnapshotError },

    #[error("no snapshots to plot")]
    EmptyStream,

    #[error("{reason}")]
    Data { reason: String },

    #[error(transparent)]
    Solver(#[from] Error),
}

impl ScenarioError {
    /// Whether the error stems from the configuration rather than the run.
    pub fn is_config(&self) -> bool {
        matches!(self, Self::Read { .. } | Self::Parse { .. } | Self::Invalid { .. })
    }
}

/// Initial data: `rho*` at cell centres strictly inside the queue, the
/// density floor elsewhere, and the equilibrium speed everywhere.
pub fn blockade_scenario(cfg: &ScenarioConfig) -> Result<RoadField, ScenarioError> {
    cfg.validate()?;
    let dx = cfg.road_length / cfg.cells as f64;
    let floor = cfg.solver.density_floor;
    let cells = (0..cfg.cells)
        .map(|i| {
            let x = (i as f64 + 0.5) * dx;
            let rho = if x > cfg.queue_start && x < cfg.queue_end {
                cfg.queue_density
            } else {
                floor
            };
            Ok(ConservedState::from_primitive(
                rho,
                equilibrium_speed(rho, &cfg.params)?,
            ))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(RoadField::new(cells, cfg.road_length)?)
}

pub fn snapshot_file_name(index: usize) -> String {
    format!("snapshot_{index:05}.csv")
}

/// Writes `snapshot` as CSV to `path`, returning the byte count.
pub fn write_snapshot(snapshot: &Snapshot, path: &Path) -> Result<usize, ScenarioError> {
    let output = |source| ScenarioError::Output {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(output)?;
    let mut sink = BufWriter::new(file);
    let bytes = snapshot.write_csv(&mut sink).map_err(output)?;
    std::io::Write::flush(&mut sink).map_err(output)?;
    Ok(bytes)
}

/// Reads every `snapshot_*.csv` in `dir`, in file-name order.
pub fn read_snapshots(dir: &Path) -> Result<Vec<Snapshot>, ScenarioError> {
    let read = |source| ScenarioError::Read {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(read)?
        .map(|entry| entry.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(read)?;
    paths.retain(|p| {
        p.file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with("snapshot_") && n.ends_with(".csv"))
    });
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let file = File::open(&path).map_err(|source| ScenarioError::Read {
                path: path.clone(),
                source,
            })?;
            Snapshot::read_csv(std::io::BufReader::new(file)).map_err(|source| ScenarioError::Snapshot { path, source })
        })
        .collect()
}

/// Runs the scenario, writing the resolved configuration, every snapshot
/// and a run summary into `out_dir`.
pub fn run_scenario(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunOutcome, ScenarioError> {
    let field = blockade_scenario(cfg)?;
    let solver = Solver::new(cfg.params, cfg.solver)?;
    std::fs::create_dir_all(out_dir).map_err(|source| ScenarioError::Output {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let echo = out_dir.join(RESOLVED_CONFIG);
    std::fs::write(&echo, cfg.to_toml()).map_err(|source| ScenarioError::Output { path: echo, source })?;

    let mut index = 0;
    let outcome = solver.run(field, |snapshot: Snapshot| {
        write_snapshot(&snapshot, &out_dir.join(snapshot_file_name(index)))?;
        index += 1;
        Ok::<_, ScenarioError>(())
    })?;

    let s = &outcome.summary;
    let summary = serde_json::json!({
        "steps": s.steps,
        "t_final": s.t_final,
        "snapshots": s.snapshots,
        "max_courant": s.max_courant,
        "cfl_violations": s.cfl_violations,
        "vehicles_initial": s.vehicles_initial,
        "vehicles_final": s.vehicles_final,
        "floor_correction": s.floor_correction,
        "floor_fraction": s.floor_fraction(),
        "conservation_drift": s.conservation_drift(),
        "momentum_clipped": s.momentum_clipped,
        "sonic_interfaces": s.sonic_interfaces,
    });
    let path = out_dir.join(SUMMARY_FILE);
    let text = serde_json::to_string_pretty(&summary).expect("summary is serialisable") + "\n";
    std::fs::write(&path, text).map_err(|source| ScenarioError::Output { path, source })?;
    Ok(outcome)
}
