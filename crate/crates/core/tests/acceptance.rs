//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;
use traffic_core::kinetic::chapman_enskog::first_order_correction;
use traffic_core::kinetic::quadrature::{adaptive_simpson, integrate_gamma_weighted};
use traffic_core::kinetic::{
    ce_pressure, maxwellian_first_iterate, moment_quadrature, orthonormal_polynomial, ChapmanEnskog, Equilibrium,
    KineticPoint,
};
use traffic_core::macro_model::{eigenvalues, flux, ConservedState};
use traffic_core::scenario::{blockade_scenario, snapshot_file_name, write_snapshot, ScenarioConfig};
use traffic_core::solver::{reconstruction_residual, roe_flux, shock_capturing_residual, RoadField, Solver};
use traffic_core::{Error, ModelParams};

const CE_GRAD_TOLERANCE: f64 = 1e-12;
const CE_GRAD_BUDGET: Duration = Duration::from_secs(1);
const MOMENT_TOLERANCE: f64 = 1e-8;
const CORRECTION_TOLERANCE: f64 = 1e-6;
const MOMENT_BUDGET: Duration = Duration::from_secs(5);
const ORTHONORMALITY_TOLERANCE: f64 = 1e-10;
const ORTHONORMALITY_BUDGET: Duration = Duration::from_secs(1);
const ROE_TOLERANCE: f64 = 1e-12;
const ROE_PAIRS: usize = 1000;
const EIGENVALUE_TOLERANCE: f64 = 1e-3;
const DRIFT_TOLERANCE: f64 = 1e-10;
const FLOOR_TOLERANCE: f64 = 1e-6;
const UPSTREAM_LIMIT_X: f64 = 2400.0;
const UPSTREAM_FLOOR_FACTOR: f64 = 10.0;
const FRONT_THRESHOLD: f64 = 0.01;
const TAIL_FRACTION: f64 = 0.9;
const TAIL_WINDOW: f64 = 60.0;
const RUN_BUDGET: Duration = Duration::from_secs(10);

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: String) -> Self {
        Self { passed, detail }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
}

fn ce_grad_equivalence() -> Outcome {
    let p = ModelParams::default();
    let n = 22;
    let started = Instant::now();
    let mut max = 0.0_f64;
    let mut points = 0;
    for rho in linspace(0.005, 0.19, n) {
        for v in linspace(0.5, 30.0, n) {
            for dv_dx in linspace(-0.02, 0.02, n) {
                let point = KineticPoint::new(rho, v, dv_dx);
                let grad = maxwellian_first_iterate(&point, &p).expect("grid lies in the domain");
                let ce = ce_pressure(&point, &p).expect("grid lies in the domain") - rho * v * v / p.alpha;
                let scale = grad.abs().max(ce.abs());
                if scale > 0.0 {
                    max = max.max((grad - ce).abs() / scale);
                }
                points += 1;
            }
        }
    }
    let elapsed = started.elapsed();
    Outcome::new(
        points >= 10_000 && max <= CE_GRAD_TOLERANCE && elapsed < CE_GRAD_BUDGET,
        format!("{points} points, max relative deviation {max:.2e} (tol {CE_GRAD_TOLERANCE:.0e}), {elapsed:.2?}"),
    )
}

fn moment_oracle() -> Outcome {
    let started = Instant::now();
    let mut max_f0 = 0.0_f64;
    let mut max_f1 = 0.0_f64;
    let rel = |got: f64, want: f64, scale: f64| (got - want).abs() / scale;
    for alpha in [5.0, 50.0, 125.0] {
        let p = ModelParams {
            alpha,
            ..ModelParams::default()
        };
        for (rho, v, dv_dx) in [(0.01, 28.0, 0.01), (0.08, 15.0, -0.02), (0.17, 2.0, 0.005)] {
            let f0 = Equilibrium::new(rho, v, alpha).unwrap();
            let m0 = moment_quadrature(&f0, 0).unwrap().value;
            let m1 = rho * integrate_gamma_weighted(alpha, |s| v * s / alpha).unwrap().value;
            let m2 = moment_quadrature(&f0, 2).unwrap().value;
            let m3 = moment_quadrature(&f0, 3).unwrap().value;
            max_f0 = max_f0
                .max(rel(m0, rho, rho))
                .max(rel(m1, rho * v, rho * v))
                .max(rel(m2, rho * v * v / alpha, rho * v * v / alpha))
                .max(rel(
                    m3,
                    2.0 * rho * v.powi(3) / alpha.powi(2),
                    2.0 * rho * v.powi(3) / alpha.powi(2),
                ));

            let point = KineticPoint::new(rho, v, dv_dx);
            let f1 = first_order_correction(&point, &p).unwrap();
            max_f1 = max_f1
                .max(moment_quadrature(&f1, 0).unwrap().value.abs() / rho)
                .max(moment_quadrature(&f1, 1).unwrap().value.abs() / (rho * v));
            let want = ce_pressure(&point, &p).unwrap();
            let got = moment_quadrature(&ChapmanEnskog(f1), 2).unwrap().value;
            max_f1 = max_f1.max(rel(got, want, want.abs()));
        }
    }
    let elapsed = started.elapsed();
    Outcome::new(
        max_f0 <= MOMENT_TOLERANCE && max_f1 <= CORRECTION_TOLERANCE && elapsed < MOMENT_BUDGET,
        format!(
            "alpha in {{5, 50, 125}}: equilibrium {max_f0:.2e} (tol {MOMENT_TOLERANCE:.0e}), \
             correction {max_f1:.2e} (tol {CORRECTION_TOLERANCE:.0e}), {elapsed:.2?}"
        ),
    )
}

/// Gamma weight integrated directly in `s` with adaptive Simpson, so the
/// check does not depend on the Gauss rule.
fn orthonormality() -> Outcome {
    let started = Instant::now();
    let mut max = 0.0_f64;
    for alpha in [125.0, 5.0] {
        let log_norm = ln_gamma(alpha);
        let upper = alpha + 40.0 * alpha.sqrt() + 40.0;
        for n in 0..=5 {
            for m in 0..=n {
                let integrand = |s: f64| {
                    if s <= 0.0 {
                        return 0.0;
                    }
                    let weight = ((alpha - 1.0) * s.ln() - s - log_norm).exp();
                    weight * orthonormal_polynomial(n, alpha, s) * orthonormal_polynomial(m, alpha, s)
                };
                let integral = adaptive_simpson(integrand, 0.0, upper, 1e-13).unwrap();
                let expected = if n == m { 1.0 } else { 0.0 };
                max = max.max((integral - expected).abs());
            }
        }
    }
    let elapsed = started.elapsed();
    Outcome::new(
        max <= ORTHONORMALITY_TOLERANCE && elapsed < ORTHONORMALITY_BUDGET,
        format!("n, m <= 5 at alpha 125 and 5: max |<P_n,P_m> - delta| {max:.2e} (tol {ORTHONORMALITY_TOLERANCE:.0e}), {elapsed:.2?}"),
    )
}

fn random_state(rng: &mut ChaCha8Rng, p: &ModelParams) -> ConservedState {
    let rho = p.rho_0 * rng.random_range(1e-3..=1.0);
    let v = p.v_0 * rng.random_range(0.0..=1.0);
    ConservedState::from_primitive(rho, v)
}

fn roe_properties() -> Outcome {
    let p = ModelParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut shock, mut recon) = (0.0_f64, 0.0_f64);
    let mut inconsistent = 0;
    for _ in 0..ROE_PAIRS {
        let l = random_state(&mut rng, &p);
        let r = random_state(&mut rng, &p);
        shock = shock.max(shock_capturing_residual(&l, &r, p.alpha).unwrap());
        recon = recon.max(reconstruction_residual(&l, &r, p.alpha).unwrap());
        if roe_flux(&l, &l, p.alpha).unwrap() != flux(&l, p.alpha).unwrap() {
            inconsistent += 1;
        }
    }
    Outcome::new(
        shock <= ROE_TOLERANCE && recon <= ROE_TOLERANCE && inconsistent == 0,
        format!(
            "{ROE_PAIRS} pairs: shock-capturing {shock:.2e}, reconstruction {recon:.2e} (tol {ROE_TOLERANCE:.0e}), \
             {inconsistent} inconsistent fluxes"
        ),
    )
}

fn characteristic_speeds() -> Outcome {
    let [l1, l2] = eigenvalues(30.0, 125.0);
    let close = (l1 - 27.546).abs() <= EIGENVALUE_TOLERANCE && (l2 - 32.934).abs() <= EIGENVALUE_TOLERANCE;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut slower = 0;
    for _ in 0..10_000 {
        let v = rng.random_range(1e-6..=30.0);
        let alpha = rng.random_range(1.0001..=500.0);
        if eigenvalues(v, alpha)[1] <= v {
            slower += 1;
        }
    }
    Outcome::new(
        close && slower == 0,
        format!("v = 30 m/s: ({l1:.4}, {l2:.4}) m/s (tol {EIGENVALUE_TOLERANCE:.0e}); Lambda_2 <= v in {slower} of 10000 samples"),
    )
}

struct BlockadeRun {
    drift: f64,
    floor_fraction: f64,
    steps: usize,
    max_courant: f64,
    cfl_violations: usize,
    upstream_max: f64,
    front_regressions: usize,
    front_final: f64,
    tail_min: f64,
    elapsed: Duration,
    floor: f64,
    queue_density: f64,
}

fn write_run(cfg: &ScenarioConfig, dir: &Path) -> Result<(RoadField, BlockadeRun), Error> {
    let field = blockade_scenario(cfg).expect("default scenario is valid");
    let solver = Solver::new(cfg.params, cfg.solver)?;
    let floor = cfg.solver.density_floor;
    let threshold = FRONT_THRESHOLD * cfg.params.rho_0;
    let tail_cell = (0..field.len())
        .find(|&i| field.cell_center(i) > cfg.queue_start)
        .expect("queue lies on the road");

    // Leading edge of the discharge: furthest cell beyond the queue head
    // above the threshold.
    let leading_edge = |f: &RoadField| {
        (0..f.len())
            .rev()
            .find(|&i| f.cell_center(i) > cfg.queue_end && f.cells()[i].rho > threshold)
            .map(|i| f.cell_center(i))
    };
    let upstream = |f: &RoadField| {
        (0..f.len())
            .filter(|&i| f.cell_center(i) < UPSTREAM_LIMIT_X)
            .map(|i| f.cells()[i].rho)
            .fold(0.0, f64::max)
    };

    let mut front = leading_edge(&field);
    let mut front_regressions = 0;
    let mut upstream_max = upstream(&field);
    let mut tail_min = field.cells()[tail_cell].rho;

    let mut index = 0;
    let started = Instant::now();
    let outcome = solver.run_observed(
        field,
        |snapshot| {
            write_snapshot(&snapshot, &dir.join(snapshot_file_name(index))).expect("temporary directory is writable");
            index += 1;
            Ok::<_, Error>(())
        },
        |t, f, _| {
            upstream_max = upstream_max.max(upstream(f));
            let now = leading_edge(f);
            if now < front {
                front_regressions += 1;
            }
            if now > front {
                front = now;
            }
            if t <= TAIL_WINDOW {
                tail_min = tail_min.min(f.cells()[tail_cell].rho);
            }
        },
    )?;
    let elapsed = started.elapsed();
    let s = &outcome.summary;
    let run = BlockadeRun {
        drift: s.conservation_drift(),
        floor_fraction: s.floor_fraction(),
        steps: s.steps,
        max_courant: s.max_courant,
        cfl_violations: s.cfl_violations,
        upstream_max,
        front_regressions,
        front_final: front.unwrap_or(cfg.queue_end),
        tail_min,
        elapsed,
        floor,
        queue_density: cfg.queue_density,
    };
    Ok((outcome.field, run))
}

fn directory_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            (
                path.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&path).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn main() {
    let mut outcomes: Vec<(usize, &str, Outcome)> = vec![
        (1, "CE-Grad equivalence", ce_grad_equivalence()),
        (2, "moment oracle", moment_oracle()),
        (3, "orthonormality", orthonormality()),
        (4, "Roe properties", roe_properties()),
        (5, "characteristic speeds", characteristic_speeds()),
    ];

    let cfg = ScenarioConfig::default();
    let sequential_dir = tempfile::tempdir().unwrap();
    let parallel_dir = tempfile::tempdir().unwrap();
    match write_run(&cfg, sequential_dir.path()) {
        Ok((_, run)) => {
            outcomes.push((
                6,
                "conservation",
                Outcome::new(
                    run.drift.abs() <= DRIFT_TOLERANCE && run.floor_fraction <= FLOOR_TOLERANCE,
                    format!(
                        "400 cells, 300 s, {} steps: drift {:.2e} (tol {DRIFT_TOLERANCE:.0e}), \
                         floor corrections {:.2e} (tol {FLOOR_TOLERANCE:.0e})",
                        run.steps, run.drift, run.floor_fraction
                    ),
                ),
            ));
            let upstream_ok = run.upstream_max <= UPSTREAM_FLOOR_FACTOR * run.floor;
            let front_ok = run.front_regressions == 0;
            let tail_ok = run.tail_min >= TAIL_FRACTION * run.queue_density;
            outcomes.push((
                7,
                "anisotropy",
                Outcome::new(
                    upstream_ok && front_ok && tail_ok,
                    format!(
                        "max rho at x < 2.4 km {:.3e} (limit {:.1e}); front reached {:.3} km with {} regressions; \
                         tail min over 60 s {:.4} (limit {:.4})",
                        run.upstream_max,
                        UPSTREAM_FLOOR_FACTOR * run.floor,
                        run.front_final / 1000.0,
                        run.front_regressions,
                        run.tail_min,
                        TAIL_FRACTION * run.queue_density
                    ),
                ),
            ));
            outcomes.push((
                8,
                "CFL compliance",
                Outcome::new(
                    run.cfl_violations == 0 && run.max_courant <= 1.0,
                    format!(
                        "max Courant {:.6} over {} steps, {} violations",
                        run.max_courant, run.steps, run.cfl_violations
                    ),
                ),
            ));

            let parallel_cfg = ScenarioConfig {
                solver: traffic_core::solver::SolverConfig {
                    parallel: true,
                    ..cfg.solver
                },
                ..cfg.clone()
            };
            let identical = match write_run(&parallel_cfg, parallel_dir.path()) {
                Ok(_) => directory_bytes(sequential_dir.path()) == directory_bytes(parallel_dir.path()),
                Err(_) => false,
            };
            outcomes.push((
                9,
                "performance",
                Outcome::new(
                    run.elapsed < RUN_BUDGET && identical,
                    format!(
                        "single-threaded run {:.2?} (budget {RUN_BUDGET:?}); parallel CSV bytes {}",
                        run.elapsed,
                        if identical { "identical" } else { "DIFFER" }
                    ),
                ),
            ));
        }
        Err(e) => {
            for (id, name) in [
                (6, "conservation"),
                (7, "anisotropy"),
                (8, "CFL compliance"),
                (9, "performance"),
            ] {
                outcomes.push((id, name, Outcome::new(false, format!("blockade run failed: {e}"))));
            }
        }
    }

    let mut failed = 0;
    for (id, name, outcome) in &outcomes {
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {id} ({name}): {}", outcome.detail);
        failed += usize::from(!outcome.passed);
    }
    println!(
        "acceptance: {} of {} criteria passed",
        outcomes.len() - failed,
        outcomes.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
