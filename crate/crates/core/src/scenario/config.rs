//! Scenario configuration: a TOML file of flat dotted keys.
//!
//! ```toml
//! road.length = "20 km"
//! road.cells = 400
//! queue.start = "2.5 km"
//! queue.end = "7.5 km"
//! queue.density = "198 veh/km"
//! model.v_0 = "108 km/h"
//! solver.t_end = "5 min"
//! solver.source_scheme = "imex"
//! output.dir = "out"
//! ```
//!
//! Dimensional values are plain SI numbers or strings carrying one of the
//! units `m`, `km`, `m/s`, `km/h`, `veh/m`, `veh/km`, `s`, `min`, `h`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::ScenarioError;
use crate::params::ModelParams;
use crate::solver::{SolverConfig, SourceScheme};

/// File name of the resolved configuration written next to the outputs.
pub const RESOLVED_CONFIG: &str = "resolved_config.toml";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    /// Ring length [m].
    pub road_length: f64,
    pub cells: usize,
    /// Upstream end of the initial queue [m].
    pub queue_start: f64,
    /// Downstream end of the initial queue [m].
    pub queue_end: f64,
    /// Density inside the queue [veh/m].
    pub queue_density: f64,
    pub params: ModelParams,
    pub solver: SolverConfig,
    pub output_dir: PathBuf,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            road_length: 20_000.0,
            cells: 400,
            queue_start: 2_500.0,
            queue_end: 7_500.0,
            queue_density: 0.198,
            params: ModelParams::default(),
            solver: SolverConfig::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Unit {
    Length,
    Speed,
    Density,
    Time,
    Pure,
}

impl Unit {
    fn scale(self, suffix: &str) -> Option<f64> {
        match (self, suffix) {
            (Self::Length, "m") => Some(1.0),
            (Self::Length, "km") => Some(1000.0),
            (Self::Speed, "m/s") => Some(1.0),
            (Self::Speed, "km/h") => Some(1.0 / 3.6),
            (Self::Density, "veh/m") => Some(1.0),
            (Self::Density, "veh/km") => Some(1e-3),
            (Self::Time, "s") => Some(1.0),
            (Self::Time, "min") => Some(60.0),
            (Self::Time, "h") => Some(3600.0),
            _ => None,
        }
    }

    fn expected(self) -> &'static str {
        match self {
            Self::Length => "a length in m or km",
            Self::Speed => "a speed in m/s or km/h",
            Self::Density => "a density in veh/m or veh/km",
            Self::Time => "a duration in s, min or h",
            Self::Pure => "a number",
        }
    }
}

fn invalid(field: &str, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        field: field.to_string(),
        reason: reason.into(),
    }
}

fn quantity(key: &str, value: &toml::Value, unit: Unit) -> Result<f64, ScenarioError> {
    let parsed = match value {
        toml::Value::Integer(i) => Some(*i as f64),
        toml::Value::Float(f) => Some(*f),
        toml::Value::String(s) if unit != Unit::Pure => {
            let s = s.trim();
            let split = s.find(|c: char| c.is_whitespace()).unwrap_or(s.len());
            let (number, suffix) = s.split_at(split);
            let suffix = suffix.trim();
            let number = number.parse::<f64>().ok();
            match (number, suffix) {
                (Some(n), "") => Some(n),
                (Some(n), suffix) => unit.scale(suffix).map(|k| n * k),
                _ => None,
            }
        }
        _ => None,
    };
    match parsed {
        Some(v) if v.is_finite() => Ok(v),
        _ => Err(invalid(key, format!("expected {}, found {value}", unit.expected()))),
    }
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut Vec<(String, toml::Value)>) {
    for (key, value) in table {
        let full = if prefix.is_empty() {
            key.clone()
        } else {
            format!("{prefix}.{key}")
        };
        match value {
            toml::Value::Table(inner) => flatten(&full, inner, out),
            other => out.push((full, other.clone())),
        }
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

/// Parses configuration text. `origin` names the source in error messages.
pub fn parse_config(text: &str, origin: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let cfg = parse_config_unchecked(text, origin)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Parses configuration text and resolves units without checking the
/// values against each other or the model constraints.
pub fn parse_config_unchecked(text: &str, origin: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let table: toml::Table = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
        ScenarioError::Parse {
            path: origin.to_path_buf(),
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    let mut entries = Vec::new();
    flatten("", &table, &mut entries);

    let mut cfg = ScenarioConfig::default();
    let mut floor_given = false;
    for (key, value) in &entries {
        let k = key.as_str();
        match k {
            "road.length" => cfg.road_length = quantity(k, value, Unit::Length)?,
            "road.cells" => {
                cfg.cells = value
                    .as_integer()
                    .and_then(|n| usize::try_from(n).ok())
                    .ok_or_else(|| invalid(k, format!("expected a non-negative integer, found {value}")))?
            }
            "queue.start" => cfg.queue_start = quantity(k, value, Unit::Length)?,
            "queue.end" => cfg.queue_end = quantity(k, value, Unit::Length)?,
            "queue.density" => cfg.queue_density = quantity(k, value, Unit::Density)?,
            "model.alpha" => cfg.params.alpha = quantity(k, value, Unit::Pure)?,
            "model.tau" => cfg.params.tau = quantity(k, value, Unit::Time)?,
            "model.w_c" => cfg.params.w_c = quantity(k, value, Unit::Pure)?,
            "model.rho_c" => cfg.params.rho_c = quantity(k, value, Unit::Density)?,
            "model.rho_0" => cfg.params.rho_0 = quantity(k, value, Unit::Density)?,
            "model.v_0" => cfg.params.v_0 = quantity(k, value, Unit::Speed)?,
            "model.a" => cfg.params.a = quantity(k, value, Unit::Pure)?,
            "solver.cfl" => cfg.solver.cfl = quantity(k, value, Unit::Pure)?,
            "solver.t_end" => cfg.solver.t_end = quantity(k, value, Unit::Time)?,
            "solver.snapshot_interval" => cfg.solver.snapshot_interval = quantity(k, value, Unit::Time)?,
            "solver.density_floor" => {
                cfg.solver.density_floor = quantity(k, value, Unit::Density)?;
                floor_given = true;
            }
            "solver.source_scheme" => {
                cfg.solver.source_scheme = value
                    .as_str()
                    .ok_or_else(|| invalid(k, "expected a string"))?
                    .parse::<SourceScheme>()
                    .map_err(|reason| invalid(k, reason))?
            }
            "solver.parallel" => {
                cfg.solver.parallel = value.as_bool().ok_or_else(|| invalid(k, "expected true or false"))?
            }
            "output.dir" => {
                cfg.output_dir = PathBuf::from(value.as_str().ok_or_else(|| invalid(k, "expected a path string"))?)
            }
            _ => return Err(invalid(k, "unknown key")),
        }
    }
    if !floor_given {
        cfg.solver.density_floor = 1e-6 * cfg.params.rho_0;
    }
    Ok(cfg)
}

fn read(path: &Path) -> Result<String, ScenarioError> {
    std::fs::read_to_string(path).map_err(|source| ScenarioError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads and validates a configuration file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, ScenarioError> {
    parse_config(&read(path)?, path)
}

/// Reads a configuration file without validating it.
pub fn load_config_unchecked(path: &Path) -> Result<ScenarioConfig, ScenarioError> {
    parse_config_unchecked(&read(path)?, path)
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let to_invalid = |e: crate::Error| match e {
            crate::Error::InvalidParameter { field, reason } => invalid(&format!("model.{field}"), reason),
            crate::Error::InvalidConfig { field, reason } => invalid(&format!("solver.{field}"), reason),
            other => invalid("config", other.to_string()),
        };
        self.params.validate().map_err(to_invalid)?;
        self.solver.validate().map_err(to_invalid)?;
        if !(self.road_length > 0.0) {
            return Err(invalid("road.length", format!("{} must be positive", self.road_length)));
        }
        if self.cells == 0 {
            return Err(invalid("road.cells", "at least one cell is required"));
        }
        if !(self.queue_start >= 0.0) {
            return Err(invalid(
                "queue.start",
                format!("{} must be non-negative", self.queue_start),
            ));
        }
        if !(self.queue_start < self.queue_end) {
            return Err(invalid(
                "queue.end",
                format!("{} must exceed queue.start = {}", self.queue_end, self.queue_start),
            ));
        }
        if !(self.queue_end <= self.road_length) {
            return Err(invalid(
                "queue.end",
                format!("{} lies beyond road.length = {}", self.queue_end, self.road_length),
            ));
        }
        if !(self.queue_density > 0.0 && self.queue_density <= self.params.rho_0) {
            return Err(invalid(
                "queue.density",
                format!("{} must lie in (0, rho_0 = {}]", self.queue_density, self.params.rho_0),
            ));
        }
        if !(self.solver.density_floor < self.queue_density && self.solver.density_floor < self.params.rho_c) {
            return Err(invalid(
                "solver.density_floor",
                format!(
                    "{} must be below the queue and critical densities",
                    self.solver.density_floor
                ),
            ));
        }
        Ok(())
    }

    /// Fully resolved configuration in SI units, in the same key layout the
    /// loader accepts. Floats are written in shortest round-trip form.
    pub fn to_toml(&self) -> String {
        let mut s = String::new();
        let mut num = |key: &str, v: f64| writeln!(s, "{key} = {v:?}").unwrap();
        num("road.length", self.road_length);
        num("queue.start", self.queue_start);
        num("queue.end", self.queue_end);
        num("queue.density", self.queue_density);
        let p = &self.params;
        for (key, v) in [
            ("model.alpha", p.alpha),
            ("model.tau", p.tau),
            ("model.w_c", p.w_c),
            ("model.rho_c", p.rho_c),
            ("model.rho_0", p.rho_0),
            ("model.v_0", p.v_0),
            ("model.a", p.a),
            ("solver.cfl", self.solver.cfl),
            ("solver.t_end", self.solver.t_end),
            ("solver.snapshot_interval", self.solver.snapshot_interval),
            ("solver.density_floor", self.solver.density_floor),
        ] {
            num(key, v);
        }
        writeln!(s, "road.cells = {}", self.cells).unwrap();
        writeln!(s, "solver.source_scheme = \"{}\"", self.solver.source_scheme.name()).unwrap();
        writeln!(s, "solver.parallel = {}", self.solver.parallel).unwrap();
        let dir = toml::Value::String(self.output_dir.to_string_lossy().into_owned());
        writeln!(s, "output.dir = {dir}").unwrap();
        s
    }
}
