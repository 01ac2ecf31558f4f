//! Implicit three-point diffusion on a ring.
//!
//! The system `s_i v_i + sum_j g_ij (v_i - v_j) = r_i`, with `s_i > 0` and
//! couplings `g_ij >= 0` between ring neighbours, is a graph Laplacian plus a
//! positive diagonal. Eliminating one cell at a time keeps that form, so each
//! pivot is assembled from the excesses `s` and couplings `g` by additions
//! only. Nothing is lost to cancellation even when `g / s` reaches `1e20`,
//! and for `r >= 0` every operation is on non-negative numbers.

/// Solves the ring system. `coupling[i]` links cells `i` and `i + 1`
/// (cyclically). Requires `excess[i] > 0` and `coupling[i] >= 0`.
pub(crate) fn solve_ring_diffusion(excess: &[f64], coupling: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = excess.len();
    match n {
        0 => return Vec::new(),
        1 => return vec![rhs[0] / excess[0]],
        2 => {
            let w = coupling[0] + coupling[1];
            return solve_pair(excess[0], excess[1], w, rhs[0], rhs[1]);
        }
        _ => {}
    }
    let last = n - 1;
    let mut s = excess.to_vec();
    let mut r = rhs.to_vec();
    // Coupling of the cell about to be eliminated to the last cell.
    let mut to_last = coupling[last];
    let mut pivots = Vec::with_capacity(n - 2);
    for k in 0..n - 2 {
        let p = coupling[k];
        let q = to_last;
        let d = s[k] + p + q;
        s[k + 1] += s[k] * p / d;
        s[last] += s[k] * q / d;
        r[k + 1] += p * r[k] / d;
        r[last] += q * r[k] / d;
        to_last = p * q / d;
        pivots.push((d, p, q));
    }
    let w = coupling[n - 2] + to_last;
    let pair = solve_pair(s[n - 2], s[last], w, r[n - 2], r[last]);
    let mut v = vec![0.0; n];
    v[n - 2] = pair[0];
    v[last] = pair[1];
    for k in (0..n - 2).rev() {
        let (d, p, q) = pivots[k];
        v[k] = (r[k] + p * v[k + 1] + q * v[last]) / d;
    }
    v
}

fn solve_pair(sa: f64, sb: f64, w: f64, ra: f64, rb: f64) -> Vec<f64> {
    let det = sa * sb + w * (sa + sb);
    vec![((sb + w) * ra + w * rb) / det, (w * ra + (sa + w) * rb) / det]
}
