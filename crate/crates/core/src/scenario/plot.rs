//! Standalone SVG plots: space-time heatmaps and the aggressiveness curve.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::ScenarioError;
use crate::kinetic::aggressiveness;
use crate::params::ModelParams;
use crate::snapshot::Snapshot;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 45.0;
const BOTTOM: f64 = 60.0;

const VIRIDIS: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

fn color(u: f64) -> String {
    let u = if u.is_finite() { u.clamp(0.0, 1.0) } else { 0.0 };
    let scaled = u * (VIRIDIS.len() - 1) as f64;
    let k = (scaled.floor() as usize).min(VIRIDIS.len() - 2);
    let f = scaled - k as f64;
    let (a, b) = (VIRIDIS[k], VIRIDIS[k + 1]);
    let mix = |x: f64, y: f64| (x + f * (y - x)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn ticks(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..=count).map(|k| lo + (hi - lo) * k as f64 / count as f64).collect()
}

fn label(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-2..1e5).contains(&a) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn plot_width() -> f64 {
        WIDTH - LEFT - RIGHT
    }

    fn plot_height() -> f64 {
        HEIGHT - TOP - BOTTOM
    }

    fn px(&self, x: f64) -> f64 {
        let span = self.x.1 - self.x.0;
        LEFT + if span > 0.0 { (x - self.x.0) / span } else { 0.5 } * Self::plot_width()
    }

    fn py(&self, y: f64) -> f64 {
        let span = self.y.1 - self.y.0;
        TOP + Self::plot_height() * (1.0 - if span > 0.0 { (y - self.y.0) / span } else { 0.5 })
    }
}

fn open_svg(s: &mut String, title: &str) {
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="25" text-anchor="middle" font-size="15">{title}</text>"#,
        LEFT + Frame::plot_width() / 2.0
    )
    .unwrap();
}

fn axes(s: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let (x0, x1) = (LEFT, LEFT + Frame::plot_width());
    let (y0, y1) = (TOP, TOP + Frame::plot_height());
    writeln!(
        s,
        r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y1 - y0
    )
    .unwrap();
    for v in ticks(frame.x.0, frame.x.1, 5) {
        let px = frame.px(v);
        writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{y1}" x2="{px:.2}" y2="{}" stroke="black"/>"#,
            y1 + 5.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#,
            y1 + 19.0,
            label(v)
        )
        .unwrap();
    }
    for v in ticks(frame.y.0, frame.y.1, 5) {
        let py = frame.py(v);
        writeln!(
            s,
            r#"<line x1="{}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/>"#,
            x0 - 5.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 8.0,
            py + 4.0,
            label(v)
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{:.2}" y="{}" text-anchor="middle">{x_label}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="20" y="{0:.2}" text-anchor="middle" transform="rotate(-90 20 {0:.2})">{y_label}</text>"#,
        (y0 + y1) / 2.0
    )
    .unwrap();
}

/// Space-time heatmap of one field. Rows are snapshots in time order, each
/// drawn over the interval up to the next snapshot; a single snapshot gives
/// a single full-height row.
pub fn heatmap_svg(
    snapshots: &[Snapshot],
    values: impl Fn(&Snapshot) -> &[f64],
    title: &str,
    unit_label: &str,
) -> Result<String, ScenarioError> {
    let first = snapshots.first().ok_or(ScenarioError::EmptyStream)?;
    let n = first.len();
    if n == 0 || snapshots.iter().any(|s| s.len() != n) {
        return Err(ScenarioError::Data {
            reason: "snapshots must share a non-empty cell grid".into(),
        });
    }
    let dx = if n > 1 {
        first.x[1] - first.x[0]
    } else {
        2.0 * first.x[0]
    };
    let x_range = (first.x[0] - dx / 2.0, first.x[n - 1] + dx / 2.0);
    // Row k spans [t_k, t_{k+1}]; the last row repeats the previous spacing.
    let mut edges: Vec<f64> = snapshots.iter().map(|s| s.t).collect();
    let tail = match edges.len() {
        1 => 1.0,
        m => (edges[m - 1] - edges[m - 2]).max(f64::MIN_POSITIVE),
    };
    edges.push(edges[edges.len() - 1] + tail);
    let t_range = (edges[0], edges[edges.len() - 1]);
    let (lo, hi) = snapshots
        .iter()
        .flat_map(|s| values(s).iter().copied())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let frame = Frame { x: x_range, y: t_range };

    let mut s = String::new();
    open_svg(&mut s, title);
    let cell_w = Frame::plot_width() / n as f64;
    s.push_str("<g shape-rendering=\"crispEdges\">\n");
    for (k, snap) in snapshots.iter().enumerate() {
        let (top, bottom) = (frame.py(edges[k + 1]), frame.py(edges[k]));
        let height = (bottom - top).max(1.0);
        for (i, &v) in values(snap).iter().enumerate() {
            let u = if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
            writeln!(
                s,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
                LEFT + i as f64 * cell_w,
                top,
                cell_w + 0.05,
                height,
                color(u)
            )
            .unwrap();
        }
    }
    s.push_str("</g>\n");
    axes(&mut s, &frame, "x [m]", "t [s]");

    let bar_x = WIDTH - RIGHT + 25.0;
    let steps = 64;
    let bar_h = Frame::plot_height() / steps as f64;
    for k in 0..steps {
        let u = (k as f64 + 0.5) / steps as f64;
        let y = TOP + Frame::plot_height() - (k + 1) as f64 * bar_h;
        writeln!(
            s,
            r#"<rect x="{bar_x}" y="{y:.3}" width="18" height="{:.3}" fill="{}"/>"#,
            bar_h + 0.05,
            color(u)
        )
        .unwrap();
    }
    let bar_frame = Frame {
        x: (0.0, 1.0),
        y: (lo, hi),
    };
    for v in ticks(lo, hi, 4) {
        let py = bar_frame.py(v);
        writeln!(
            s,
            r#"<text x="{}" y="{:.2}">{}</text>"#,
            bar_x + 24.0,
            py + 4.0,
            label(v)
        )
        .unwrap();
    }
    writeln!(s, r#"<text x="{bar_x}" y="{}">{unit_label}</text>"#, TOP - 8.0).unwrap();
    s.push_str("</svg>\n");
    Ok(s)
}

/// `(rho, w(rho))` on a uniform grid over `[0, rho_0]`, with `rho_c`
/// inserted so that the peak is sampled exactly.
pub fn aggressiveness_curve(params: &ModelParams, samples: usize) -> Result<Vec<(f64, f64)>, ScenarioError> {
    let samples = samples.max(2);
    let mut rho: Vec<f64> = (0..samples)
        .map(|k| (params.rho_0 * k as f64 / (samples - 1) as f64).min(params.rho_0))
        .collect();
    rho.push(params.rho_c);
    rho.sort_by(f64::total_cmp);
    rho.dedup();
    rho.into_iter().map(|r| Ok((r, aggressiveness(r, params)?))).collect()
}

pub fn aggressiveness_svg(params: &ModelParams) -> Result<String, ScenarioError> {
    let curve = aggressiveness_curve(params, 400)?;
    let w_max = curve.iter().map(|p| p.1).fold(1.0, f64::max);
    let frame = Frame {
        x: (0.0, params.rho_0),
        y: (1.0, 1.0 + 1.1 * (w_max - 1.0)),
    };
    let mut s = String::new();
    open_svg(&mut s, "Aggressiveness");
    let points: Vec<String> = curve
        .iter()
        .map(|&(r, w)| format!("{:.3},{:.3}", frame.px(r), frame.py(w)))
        .collect();
    writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="navy" stroke-width="2"/>"#,
        points.join(" ")
    )
    .unwrap();
    writeln!(
        s,
        r#"<circle cx="{:.3}" cy="{:.3}" r="4" fill="crimson"/>"#,
        frame.px(params.rho_c),
        frame.py(params.w_c)
    )
    .unwrap();
    axes(&mut s, &frame, "rho [veh/m]", "w [-]");
    s.push_str("</svg>\n");
    Ok(s)
}

/// File names written by [`emit_plots`], in order.
pub const PLOT_FILES: [&str; 3] = ["density.svg", "flow.svg", "aggressiveness.svg"];

/// Writes the density and flow heatmaps and the aggressiveness curve into
/// `out_dir`. Nothing is written unless every plot renders.
pub fn emit_plots(snapshots: &[Snapshot], params: &ModelParams, out_dir: &Path) -> Result<Vec<PathBuf>, ScenarioError> {
    if snapshots.is_empty() {
        return Err(ScenarioError::EmptyStream);
    }
    let mut ordered = snapshots.to_vec();
    ordered.sort_by(|a, b| a.t.total_cmp(&b.t));
    let documents = [
        heatmap_svg(&ordered, |s| &s.rho, "Density", "rho [veh/m]")?,
        heatmap_svg(&ordered, |s| &s.q, "Flow", "q [veh/s]")?,
        aggressiveness_svg(params)?,
    ];
    std::fs::create_dir_all(out_dir).map_err(|source| ScenarioError::Output {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for (name, doc) in PLOT_FILES.iter().zip(documents) {
        let path = out_dir.join(name);
        std::fs::write(&path, doc).map_err(|source| ScenarioError::Output {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}
