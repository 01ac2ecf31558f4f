//! Self-check suites over the closures and the Roe solver, reported as one
//! JSON record per suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::kinetic::chapman_enskog::first_order_correction;
use crate::kinetic::quadrature::integrate_gamma_weighted;
use crate::kinetic::{
    aggressiveness, ce_pressure, maxwellian_first_iterate, moment_quadrature, orthonormal_polynomial, ChapmanEnskog,
    Equilibrium, GaussLaguerre, KineticPoint,
};
use crate::macro_model::{eigenvalues, flux, ConservedState};
use crate::params::ModelParams;
use crate::solver::{reconstruction_residual, roe_flux, shock_capturing_residual};
use crate::Result;

pub const ORTHONORMALITY_TOLERANCE: f64 = 1e-10;
pub const MOMENT_TOLERANCE: f64 = 1e-8;
pub const CORRECTION_MOMENT_TOLERANCE: f64 = 1e-6;
pub const CE_GRAD_TOLERANCE: f64 = 1e-12;
pub const ROE_TOLERANCE: f64 = 1e-12;

/// Density, velocity and gradient ranges sampled by the closure comparison.
pub const CE_GRAD_RHO: (f64, f64) = (0.005, 0.19);
pub const CE_GRAD_V: (f64, f64) = (0.5, 30.0);
pub const CE_GRAD_DV_DX: (f64, f64) = (-0.02, 0.02);
pub const CE_GRAD_POINTS_PER_AXIS: usize = 22;
pub const ROE_PAIRS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Parameters,
    Orthonormality,
    Moments,
    CeGrad,
    Roe,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Self::Parameters,
        Self::Orthonormality,
        Self::Moments,
        Self::CeGrad,
        Self::Roe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Parameters => "parameters",
            Self::Orthonormality => "orthonormality",
            Self::Moments => "moments",
            Self::CeGrad => "ce-grad",
            Self::Roe => "roe",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|suite| suite.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|s| s.name()).collect();
            format!("unknown suite `{s}` (expected one of {})", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub passed: bool,
    /// Largest measured error; absent when the suite could not run.
    pub max_error: Option<f64>,
    pub tolerance: f64,
    pub checks: usize,
    /// Where the largest error occurred, when that is informative.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_case: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl SuiteReport {
    fn measured(suite: Suite, max_error: f64, tolerance: f64, checks: usize) -> Self {
        Self {
            suite: suite.name(),
            passed: max_error <= tolerance,
            max_error: Some(max_error),
            tolerance,
            checks,
            worst_case: None,
            message: None,
        }
    }

    fn failed(suite: Suite, tolerance: f64, message: String) -> Self {
        Self {
            suite: suite.name(),
            passed: false,
            max_error: None,
            tolerance,
            checks: 0,
            worst_case: None,
            message: Some(message),
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report fields are serialisable")
    }
}

fn tolerance(suite: Suite) -> f64 {
    match suite {
        Suite::Parameters => 0.0,
        Suite::Orthonormality => ORTHONORMALITY_TOLERANCE,
        Suite::Moments => MOMENT_TOLERANCE,
        Suite::CeGrad => CE_GRAD_TOLERANCE,
        Suite::Roe => ROE_TOLERANCE,
    }
}

/// Shape parameters exercised by the quadrature suites: two fixed reference
/// values plus the configured one.
fn alphas(params: &ModelParams) -> Vec<f64> {
    let mut a = vec![5.0, 50.0, params.alpha];
    a.sort_by(f64::total_cmp);
    a.dedup();
    a
}

fn relative(measured: f64, expected: f64, scale: f64) -> f64 {
    (measured - expected).abs() / scale
}

fn parameters(params: &ModelParams) -> Result<SuiteReport> {
    params.validate()?;
    let errors = [
        (aggressiveness(0.0, params)? - 1.0).abs(),
        (aggressiveness(params.rho_0, params)? - 1.0).abs(),
        (aggressiveness(params.rho_c, params)? - params.w_c).abs() / params.w_c,
    ];
    let max = errors.iter().copied().fold(0.0, f64::max);
    Ok(SuiteReport::measured(
        Suite::Parameters,
        max,
        4.0 * f64::EPSILON,
        errors.len(),
    ))
}

fn orthonormality(params: &ModelParams) -> Result<SuiteReport> {
    let mut max = 0.0_f64;
    let mut checks = 0;
    for alpha in alphas(params) {
        let rule = GaussLaguerre::new(16, alpha)?;
        for n in 0..=5 {
            for m in 0..=n {
                let integral =
                    rule.integrate(|s| orthonormal_polynomial(n, alpha, s) * orthonormal_polynomial(m, alpha, s));
                let expected = if n == m { 1.0 } else { 0.0 };
                max = max.max((integral - expected).abs());
                checks += 1;
            }
        }
    }
    Ok(SuiteReport::measured(
        Suite::Orthonormality,
        max,
        ORTHONORMALITY_TOLERANCE,
        checks,
    ))
}

/// States at which moments are checked; the gradient only enters the
/// first-order correction.
const MOMENT_STATES: [(f64, f64, f64); 3] = [(0.02, 29.0, 0.01), (0.1, 12.0, -0.015), (0.18, 1.5, 0.004)];

fn moments(params: &ModelParams) -> Result<SuiteReport> {
    let mut max_f0 = 0.0_f64;
    let mut max_f1 = 0.0_f64;
    let mut checks = 0;
    for alpha in alphas(params) {
        let p = ModelParams { alpha, ..*params };
        for (rho, v, dv_dx) in MOMENT_STATES {
            let f0 = Equilibrium::new(rho, v, alpha)?;
            let mass = moment_quadrature(&f0, 0)?.value;
            let momentum = rho * integrate_gamma_weighted(alpha, |s| v * s / alpha)?.value;
            let pressure = moment_quadrature(&f0, 2)?.value;
            let skew = moment_quadrature(&f0, 3)?.value;
            for (got, want) in [
                (mass, rho),
                (momentum, rho * v),
                (pressure, rho * v * v / alpha),
                (skew, 2.0 * rho * v.powi(3) / (alpha * alpha)),
            ] {
                max_f0 = max_f0.max(relative(got, want, want.abs()));
                checks += 1;
            }

            let point = KineticPoint::new(rho, v, dv_dx);
            let f1 = first_order_correction(&point, &p)?;
            max_f1 = max_f1.max(relative(moment_quadrature(&f1, 0)?.value, 0.0, rho));
            max_f1 = max_f1.max(relative(moment_quadrature(&f1, 1)?.value, 0.0, rho * v));
            let total = ChapmanEnskog(f1);
            let want = ce_pressure(&point, &p)?;
            max_f1 = max_f1.max(relative(moment_quadrature(&total, 2)?.value, want, want.abs()));
            checks += 3;
        }
    }
    let mut report = SuiteReport::measured(Suite::Moments, max_f0, MOMENT_TOLERANCE, checks);
    report.passed &= max_f1 <= CORRECTION_MOMENT_TOLERANCE;
    report.worst_case = Some(serde_json::json!({
        "equilibrium_max_error": max_f0,
        "correction_max_error": max_f1,
        "correction_tolerance": CORRECTION_MOMENT_TOLERANCE,
    }));
    Ok(report)
}

fn axis(range: (f64, f64), n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| range.0 + (range.1 - range.0) * k as f64 / (n - 1) as f64)
}

/// Relative gap between the Grad first iterate and the Chapman-Enskog
/// viscous stress. Both vanish together when the gradient is zero.
pub fn ce_grad_deviation(point: &KineticPoint, params: &ModelParams) -> Result<f64> {
    let grad = maxwellian_first_iterate(point, params)?;
    let ce = ce_pressure(point, params)? - point.equilibrium_pressure(params.alpha);
    let scale = grad.abs().max(ce.abs());
    Ok(if scale > 0.0 { (grad - ce).abs() / scale } else { 0.0 })
}

fn ce_grad(params: &ModelParams) -> Result<SuiteReport> {
    let n = CE_GRAD_POINTS_PER_AXIS;
    let mut max = 0.0_f64;
    let mut worst = KineticPoint::new(0.0, 0.0, 0.0);
    for rho in axis(CE_GRAD_RHO, n) {
        for v in axis(CE_GRAD_V, n) {
            for dv_dx in axis(CE_GRAD_DV_DX, n) {
                let point = KineticPoint::new(rho, v, dv_dx);
                let d = ce_grad_deviation(&point, params)?;
                if d > max {
                    max = d;
                    worst = point;
                }
            }
        }
    }
    let mut report = SuiteReport::measured(Suite::CeGrad, max, CE_GRAD_TOLERANCE, n * n * n);
    report.worst_case = Some(serde_json::json!({
        "rho": worst.rho,
        "v": worst.v,
        "dv_dx": worst.dv_dx,
        "relative_deviation": max,
    }));
    Ok(report)
}

/// Random state in the physical domain: `rho` in `[1e-3 rho_0, rho_0]`,
/// `v` in `[0, v_0]`.
pub fn random_state(rng: &mut impl Rng, params: &ModelParams) -> ConservedState {
    let rho = params.rho_0 * rng.random_range(1e-3..=1.0);
    let v = params.v_0 * rng.random_range(0.0..=1.0);
    ConservedState::from_primitive(rho, v)
}

fn roe(params: &ModelParams) -> Result<SuiteReport> {
    let alpha = params.alpha;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut shock = 0.0_f64;
    let mut reconstruction = 0.0_f64;
    let mut consistency = 0.0_f64;
    let mut eigen = 0.0_f64;
    for _ in 0..ROE_PAIRS {
        let l = random_state(&mut rng, params);
        let r = random_state(&mut rng, params);
        shock = shock.max(shock_capturing_residual(&l, &r, alpha)?);
        reconstruction = reconstruction.max(reconstruction_residual(&l, &r, alpha)?);
        let f = flux(&l, alpha)?;
        let same = roe_flux(&l, &l, alpha)?;
        consistency = consistency.max((same.f1 - f.f1).abs().max((same.f2 - f.f2).abs()));

        // Characteristic speeds against the roots of det(A - lambda I).
        let v = l.velocity();
        let k = (alpha + 1.0) / alpha;
        let (trace, det) = (2.0 * k * v, k * v * v);
        let disc = (trace * trace / 4.0 - det).max(0.0).sqrt();
        let [l1, l2] = eigenvalues(v, alpha);
        let scale = v.abs().max(f64::MIN_POSITIVE);
        eigen = eigen.max((l1 - (trace / 2.0 - disc)).abs().max((l2 - (trace / 2.0 + disc)).abs()) / scale);
    }
    let max = shock.max(reconstruction).max(consistency);
    let mut report = SuiteReport::measured(Suite::Roe, max, ROE_TOLERANCE, 4 * ROE_PAIRS);
    report.passed &= eigen <= 1e-10;
    report.worst_case = Some(serde_json::json!({
        "shock_capturing": shock,
        "reconstruction": reconstruction,
        "consistency": consistency,
        "eigenvalue_relative": eigen,
    }));
    Ok(report)
}

/// Runs one suite. Invalid parameters fail every suite, with the reason.
pub fn run_suite(suite: Suite, params: &ModelParams) -> SuiteReport {
    let result = params.validate().and_then(|()| match suite {
        Suite::Parameters => parameters(params),
        Suite::Orthonormality => orthonormality(params),
        Suite::Moments => moments(params),
        Suite::CeGrad => ce_grad(params),
        Suite::Roe => roe(params),
    });
    result.unwrap_or_else(|e| SuiteReport::failed(suite, tolerance(suite), e.to_string()))
}

/// Runs `only`, or every suite.
pub fn validate(params: &ModelParams, only: Option<Suite>) -> Vec<SuiteReport> {
    match only {
        Some(suite) => vec![run_suite(suite, params)],
        None => Suite::ALL.iter().map(|&s| run_suite(s, params)).collect(),
    }
}
