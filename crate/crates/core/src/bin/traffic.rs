//! Command-line front end: run the blockade scenario, validate the model,
//! plot a run directory.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use traffic_core::scenario::{
    self, emit_plots, load_config, load_config_unchecked, read_snapshots, validate::validate, ScenarioConfig,
    ScenarioError, Suite, RESOLVED_CONFIG,
};

const EXIT_SUITE_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "traffic", version, about = "Kinetic-closure traffic flow on a ring road")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate the blockade-removal scenario and write CSV snapshots.
    Run {
        /// Scenario file; defaults apply to every key it omits.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory; overrides `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        cells: Option<usize>,
        #[arg(long)]
        cfl: Option<f64>,
        /// Horizon [s].
        #[arg(long)]
        t_end: Option<f64>,
        /// Snapshot interval [s].
        #[arg(long)]
        snapshot_every: Option<f64>,
        /// Evaluate fluxes and coefficients on all cores.
        #[arg(long)]
        parallel: bool,
    },
    /// Run the self-check suites and print one JSON record per suite.
    Validate {
        #[arg(long)]
        suite: Option<Suite>,
        /// Take model parameters from this scenario file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the shape parameter.
        #[arg(long)]
        alpha: Option<f64>,
        /// Also write the records to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Render heatmaps and the aggressiveness curve from a run directory.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn fail(error: &ScenarioError) -> ExitCode {
    eprintln!("error: {error}");
    ExitCode::from(if error.is_config() { EXIT_CONFIG } else { EXIT_RUNTIME })
}

fn load_or_default(path: Option<&Path>) -> Result<ScenarioConfig, ScenarioError> {
    path.map_or_else(|| Ok(ScenarioConfig::default()), load_config)
}

#[allow(clippy::too_many_arguments)]
fn run(
    config: Option<&Path>,
    out: Option<PathBuf>,
    cells: Option<usize>,
    cfl: Option<f64>,
    t_end: Option<f64>,
    snapshot_every: Option<f64>,
    parallel: bool,
) -> Result<(), ScenarioError> {
    let mut cfg = load_or_default(config)?;
    if let Some(n) = cells {
        cfg.cells = n;
    }
    if let Some(c) = cfl {
        cfg.solver.cfl = c;
    }
    if let Some(t) = t_end {
        cfg.solver.t_end = t;
    }
    if let Some(dt) = snapshot_every {
        cfg.solver.snapshot_interval = dt;
    }
    if parallel {
        cfg.solver.parallel = true;
    }
    if let Some(dir) = out {
        cfg.output_dir = dir;
    }
    cfg.validate()?;
    let started = std::time::Instant::now();
    let outcome = scenario::run_scenario(&cfg, &cfg.output_dir)?;
    let s = &outcome.summary;
    println!(
        "{} steps to t = {} s in {:.2} s; {} snapshots in {}; max Courant {:.4}; drift {:.2e}; floor corrections {:.2e}",
        s.steps,
        s.t_final,
        started.elapsed().as_secs_f64(),
        s.snapshots,
        cfg.output_dir.display(),
        s.max_courant,
        s.conservation_drift(),
        s.floor_fraction(),
    );
    Ok(())
}

fn run_validate(
    suite: Option<Suite>,
    config: Option<&Path>,
    alpha: Option<f64>,
    report: Option<&Path>,
) -> Result<bool, ScenarioError> {
    let mut params = match config {
        Some(path) => load_config_unchecked(path)?.params,
        None => ScenarioConfig::default().params,
    };
    if let Some(a) = alpha {
        params.alpha = a;
    }
    let reports = validate(&params, suite);
    let mut text = String::new();
    for r in &reports {
        text.push_str(&r.to_json_line());
        text.push('\n');
    }
    print!("{text}");
    if let Some(path) = report {
        std::fs::write(path, &text).map_err(|source| ScenarioError::Output {
            path: path.to_path_buf(),
            source,
        })?;
    }
    Ok(reports.iter().all(|r| r.passed))
}

fn run_plot(input: &Path, out: &Path) -> Result<(), ScenarioError> {
    let echo = input.join(RESOLVED_CONFIG);
    let params = if echo.exists() {
        load_config(&echo)?.params
    } else {
        ScenarioConfig::default().params
    };
    let snapshots = read_snapshots(input)?;
    for path in emit_plots(&snapshots, &params, out)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            out,
            cells,
            cfl,
            t_end,
            snapshot_every,
            parallel,
        } => match run(config.as_deref(), out, cells, cfl, t_end, snapshot_every, parallel) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(&e),
        },
        Command::Validate {
            suite,
            config,
            alpha,
            report,
        } => match run_validate(suite, config.as_deref(), alpha, report.as_deref()) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(EXIT_SUITE_FAILURE),
            Err(e) => fail(&e),
        },
        Command::Plot { input, out } => match run_plot(&input, &out) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(&e),
        },
    }
}
