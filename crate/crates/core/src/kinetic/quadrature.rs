//! Gauss-Laguerre quadrature for the gamma weight.
//!
//! Moments are integrated in the reduced velocity `s = alpha c / v`, where
//! every distribution in this crate becomes `rho * Phi(s) * r(s)` with `Phi`
//! the normalised gamma density and `r` a low-degree polynomial. A rule of
//! `n` nodes is exact for `r` of degree `2n - 1`, so the default 64 nodes
//! already integrate every moment used here to round-off. The node count is
//! still doubled until two successive estimates agree, which turns a
//! non-polynomial integrand into an [`Error::Accuracy`] rather than a silent
//! error.

use super::VelocityDistribution;
use crate::error::{Error, Result};

pub const DEFAULT_NODES: usize = 64;
pub const MAX_NODES: usize = 1024;
pub const RELATIVE_TOLERANCE: f64 = 1e-9;

/// Nodes and weights for `int_0^inf Phi(s) g(s) ds`,
/// `Phi(s) = s^(alpha-1) e^(-s) / Gamma(alpha)`. Weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLaguerre {
    alpha: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLaguerre {
    /// Golub-Welsch: eigenvalues of the Jacobi matrix of the monic
    /// recurrence are the nodes, squared first eigenvector components the
    /// weights.
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain {
                quantity: "node count",
                value: 0.0,
                expected: "n >= 1",
            });
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Domain {
                quantity: "alpha",
                value: alpha,
                expected: "alpha > 0",
            });
        }
        let mut diagonal: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + alpha).collect();
        let mut off_diagonal: Vec<f64> = (0..n)
            .map(|k| {
                let k = (k + 1) as f64;
                (k * (k + alpha - 1.0)).sqrt()
            })
            .collect();
        let mut first_row = vec![0.0; n];
        first_row[0] = 1.0;
        implicit_ql(&mut diagonal, &mut off_diagonal, &mut first_row)
            .map_err(|_| Error::RuleConstruction { nodes: n })?;

        let mut pairs: Vec<(f64, f64)> = diagonal.into_iter().zip(first_row.into_iter().map(|z| z * z)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Ok(Self { alpha, nodes, weights })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sum w_i g(s_i)`.
    pub fn integrate(&self, g: impl FnMut(f64) -> f64) -> f64 {
        self.integrate_with_magnitude(g).0
    }

    /// Estimate together with `sum w_i |g(s_i)|`, the scale against which
    /// cancellation in the estimate is judged.
    pub fn integrate_with_magnitude(&self, mut g: impl FnMut(f64) -> f64) -> (f64, f64) {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold((0.0, 0.0), |(sum, magnitude), (&s, &w)| {
                let term = w * g(s);
                (sum + term, magnitude + term.abs())
            })
    }
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix,
/// tracking only the first row of the eigenvector matrix.
///
/// `off_diagonal[i]` couples rows `i` and `i + 1`; its last entry is scratch.
fn implicit_ql(diagonal: &mut [f64], off_diagonal: &mut [f64], first_row: &mut [f64]) -> Result<(), ()> {
    const MAX_ITERATIONS: usize = 60;
    let n = diagonal.len();
    off_diagonal[n - 1] = 0.0;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let scale = diagonal[m].abs() + diagonal[m + 1].abs();
                if off_diagonal[m].abs() <= f64::EPSILON * scale {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > MAX_ITERATIONS {
                return Err(());
            }
            let mut g = (diagonal[l + 1] - diagonal[l]) / (2.0 * off_diagonal[l]);
            let mut r = g.hypot(1.0);
            g = diagonal[m] - diagonal[l] + off_diagonal[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0_f64, 1.0_f64, 0.0_f64);
            for i in (l..m).rev() {
                let f = s * off_diagonal[i];
                let b = c * off_diagonal[i];
                if g.abs() <= f.abs() {
                    c = g / f;
                    r = c.hypot(1.0);
                    off_diagonal[i + 1] = f * r;
                    s = 1.0 / r;
                    c *= s;
                } else {
                    s = f / g;
                    r = s.hypot(1.0);
                    off_diagonal[i + 1] = g * r;
                    c = 1.0 / r;
                    s *= c;
                }
                g = diagonal[i + 1] - p;
                r = (diagonal[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diagonal[i + 1] = g + p;
                g = c * r - b;
                let z = first_row[i + 1];
                first_row[i + 1] = s * first_row[i] + c * z;
                first_row[i] = c * first_row[i] - s * z;
            }
            diagonal[l] -= p;
            off_diagonal[l] = g;
            off_diagonal[m] = 0.0;
        }
    }
    Ok(())
}

/// Converged quadrature estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureEstimate {
    pub value: f64,
    /// Node count of the finer of the two agreeing rules.
    pub nodes: usize,
    /// `|I_2n - I_n|`.
    pub change: f64,
}

/// `int_0^inf Phi(s) g(s) ds`, doubling the rule from [`DEFAULT_NODES`] until
/// successive estimates agree to [`RELATIVE_TOLERANCE`] of the integrand
/// magnitude.
pub fn integrate_gamma_weighted(alpha: f64, mut g: impl FnMut(f64) -> f64) -> Result<QuadratureEstimate> {
    let mut n = DEFAULT_NODES;
    let mut previous = GaussLaguerre::new(n, alpha)?.integrate(&mut g);
    loop {
        n *= 2;
        if n > MAX_NODES {
            return Err(Error::Accuracy {
                estimate: previous,
                change: f64::NAN,
                tolerance: RELATIVE_TOLERANCE,
                nodes: n / 2,
            });
        }
        let (value, magnitude) = GaussLaguerre::new(n, alpha)?.integrate_with_magnitude(&mut g);
        let change = (value - previous).abs();
        if change <= RELATIVE_TOLERANCE * magnitude.max(value.abs()) {
            return Ok(QuadratureEstimate {
                value,
                nodes: n,
                change,
            });
        }
        if n * 2 > MAX_NODES {
            return Err(Error::Accuracy {
                estimate: value,
                change,
                tolerance: RELATIVE_TOLERANCE,
                nodes: n,
            });
        }
        previous = value;
    }
}

/// Central moment `int_0^inf (c - v)^k f(c) dc` of a distribution.
pub fn moment_quadrature<D: VelocityDistribution + ?Sized>(f: &D, k: u32) -> Result<QuadratureEstimate> {
    let rho = f.rho();
    let v = f.mean_velocity();
    let alpha = f.alpha();
    let estimate = integrate_gamma_weighted(alpha, |s| {
        let c = v * s / alpha;
        (c - v).powi(k as i32) * f.equilibrium_ratio(c)
    })?;
    Ok(QuadratureEstimate {
        value: rho * estimate.value,
        change: rho * estimate.change,
        ..estimate
    })
}

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tolerance`.
///
/// Used to integrate a phase density directly in `c`, independently of the
/// gamma-weighted rule.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tolerance: f64) -> Result<f64> {
    const MAX_DEPTH: u32 = 50;

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tolerance: f64,
        depth: u32,
    ) -> Option<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tolerance {
            return Some(left + right + delta / 15.0);
        }
        if depth == 0 {
            return None;
        }
        let l = recurse(f, a, m, fa, flm, fm, left, 0.5 * tolerance, depth - 1)?;
        let r = recurse(f, m, b, fm, frm, fb, right, 0.5 * tolerance, depth - 1)?;
        Some(l + r)
    }

    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(&f, a, b, fa, fm, fb, whole, tolerance, MAX_DEPTH).ok_or(Error::Accuracy {
        estimate: whole,
        change: f64::NAN,
        tolerance,
        nodes: 0,
    })
}
