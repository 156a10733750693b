//! Log-log plots of mean max error against n, one panel per weight range.
//!
//! Each `(mechanism, ε)` series is drawn solid, together with two dashed
//! reference curves anchored at its first point: linear growth `n` and
//! `√n · ln² n`. A gnuplot-ready data file carries the same numbers.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};

use crate::experiment::{mean_max_error, series, Panel};

const PANEL_W: f64 = 520.0;
const PANEL_H: f64 = 380.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// `err₀ · n / n₀`.
pub fn reference_linear(err0: f64, n0: usize, n: usize) -> f64 {
    err0 * n as f64 / n0 as f64
}

/// `err₀ · √n ln²n / (√n₀ ln²n₀)`.
pub fn reference_sqrt_log2(err0: f64, n0: usize, n: usize) -> f64 {
    let f = |x: usize| (x as f64).sqrt() * (x as f64).ln().powi(2);
    err0 * f(n) / f(n0)
}

/// One plotted series with its reference curves.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(usize, f64)>,
    pub linear: Vec<f64>,
    pub sqrt_log2: Vec<f64>,
}

pub fn curves(panel: &Panel) -> Vec<Curve> {
    series(&panel.records)
        .into_iter()
        .map(|(m, eps)| {
            let points = mean_max_error(&panel.records, m, eps);
            let (n0, e0) = points[0];
            Curve {
                label: format!("{m} ε={eps}"),
                linear: points.iter().map(|&(n, _)| reference_linear(e0, n0, n)).collect(),
                sqrt_log2: points.iter().map(|&(n, _)| reference_sqrt_log2(e0, n0, n)).collect(),
                points,
            }
        })
        .collect()
}

fn check(panels: &[Panel]) -> Result<()> {
    if panels.is_empty() || panels.iter().any(|p| p.records.is_empty()) {
        bail!("nothing to plot: no error records");
    }
    Ok(())
}

/// Renders the SVG document.
pub fn render_svg(panels: &[Panel]) -> Result<String> {
    check(panels)?;
    let width = PANEL_W * panels.len() as f64;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{PANEL_H}" font-family="sans-serif" font-size="11">"#
    )?;
    writeln!(s, r#"<rect width="{width}" height="{PANEL_H}" fill="white"/>"#)?;
    for (i, panel) in panels.iter().enumerate() {
        render_panel(&mut s, panel, PANEL_W * i as f64)?;
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn render_panel(s: &mut String, panel: &Panel, x_off: f64) -> Result<()> {
    let curves = curves(panel);
    let ys = curves
        .iter()
        .flat_map(|c| c.points.iter().map(|p| p.1).chain(c.linear.iter().copied()).chain(c.sqrt_log2.iter().copied()))
        .filter(|&y| y > 0.0);
    let (y_lo, y_hi) = ys.fold((f64::INFINITY, 0.0f64), |(lo, hi), y| (lo.min(y), hi.max(y)));
    let ns = curves.iter().flat_map(|c| c.points.iter().map(|p| p.0 as f64));
    let (x_lo, x_hi) = ns.fold((f64::INFINITY, 0.0f64), |(lo, hi), x| (lo.min(x), hi.max(x)));
    let (y_lo, y_hi) = if y_lo.is_finite() { pad(y_lo, y_hi) } else { (1.0, 10.0) };
    let (x_lo, x_hi) = pad(x_lo, x_hi);

    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let px = |x: f64| x_off + MARGIN_L + plot_w * (x.log10() - x_lo.log10()) / (x_hi.log10() - x_lo.log10());
    let py = |y: f64| {
        let y = y.max(y_lo);
        MARGIN_T + plot_h * (1.0 - (y.log10() - y_lo.log10()) / (y_hi.log10() - y_lo.log10()))
    };

    writeln!(
        s,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="13">weights in [{}, {}]</text>"#,
        x_off + PANEL_W / 2.0,
        panel.weight_range.0,
        panel.weight_range.1
    )?;
    writeln!(
        s,
        r#"<rect x="{:.1}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#,
        x_off + MARGIN_L
    )?;
    for (v, label) in log_ticks(x_lo, x_hi) {
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{label}</text>"#,
            px(v),
            MARGIN_T + plot_h + 15.0
        )?;
    }
    for (v, label) in log_ticks(y_lo, y_hi) {
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{label}</text>"#,
            x_off + MARGIN_L - 5.0,
            py(v) + 4.0
        )?;
    }
    writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">n</text>"#,
        x_off + MARGIN_L + plot_w / 2.0,
        PANEL_H - 12.0
    )?;
    writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">mean max |error|</text>"#,
        x_off + 16.0,
        MARGIN_T + plot_h / 2.0,
        x_off + 16.0,
        MARGIN_T + plot_h / 2.0
    )?;

    for (i, c) in curves.iter().enumerate() {
        let colour = COLOURS[i % COLOURS.len()];
        let line = |ys: &mut dyn Iterator<Item = f64>| -> String {
            c.points
                .iter()
                .zip(ys)
                .map(|(&(n, _), y)| format!("{:.2},{:.2}", px(n as f64), py(y)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let data = line(&mut c.points.iter().map(|p| p.1));
        writeln!(s, r#"<polyline points="{data}" fill="none" stroke="{colour}" stroke-width="2"/>"#)?;
        for &(n, y) in &c.points {
            writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{colour}"/>"#, px(n as f64), py(y))?;
        }
        let lin = line(&mut c.linear.iter().copied());
        writeln!(
            s,
            r#"<polyline points="{lin}" fill="none" stroke="{colour}" stroke-dasharray="6,4" stroke-opacity="0.6"/>"#
        )?;
        let sl = line(&mut c.sqrt_log2.iter().copied());
        writeln!(
            s,
            r#"<polyline points="{sl}" fill="none" stroke="{colour}" stroke-dasharray="2,3" stroke-opacity="0.6"/>"#
        )?;
        let ly = MARGIN_T + 14.0 + 14.0 * i as f64;
        writeln!(
            s,
            r#"<text x="{:.1}" y="{ly:.1}" fill="{colour}">{}</text>"#,
            x_off + MARGIN_L + 8.0,
            escape(&c.label)
        )?;
    }
    let ly = MARGIN_T + 14.0 + 14.0 * curves.len() as f64;
    writeln!(
        s,
        r#"<text x="{:.1}" y="{ly:.1}" fill="gray">dashed: ∝ n, dotted: ∝ √n·ln²n</text>"#,
        x_off + MARGIN_L + 8.0
    )?;
    Ok(())
}

fn pad(lo: f64, hi: f64) -> (f64, f64) {
    if hi <= lo {
        (lo / 1.5, hi * 1.5)
    } else {
        (lo / 1.1, hi * 1.1)
    }
}

fn log_ticks(lo: f64, hi: f64) -> Vec<(f64, String)> {
    let mut out = Vec::new();
    let mut decade = 10f64.powf(lo.log10().floor());
    while decade <= hi {
        for m in [1.0, 2.0, 5.0] {
            let v = decade * m;
            if v >= lo && v <= hi {
                out.push((v, format!("{v}")));
            }
        }
        decade *= 10.0;
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Whitespace-separated table, one row per plotted point.
pub fn render_data(panels: &[Panel]) -> Result<String> {
    check(panels)?;
    let mut s = String::from("# weight_low weight_high mechanism epsilon n mean_max_error ref_linear ref_sqrt_log2\n");
    for p in panels {
        for c in curves(p) {
            let (mech, eps) = c.label.split_once(" ε=").unwrap();
            for (i, &(n, y)) in c.points.iter().enumerate() {
                writeln!(
                    s,
                    "{} {} {mech} {eps} {n} {y:.16e} {:.16e} {:.16e}",
                    p.weight_range.0, p.weight_range.1, c.linear[i], c.sqrt_log2[i]
                )?;
            }
            s.push_str("\n\n");
        }
    }
    Ok(s)
}

/// Writes `<stem>.svg` and `<stem>.dat` into `dir`.
pub fn emit_plot(panels: &[Panel], dir: &Path, stem: &str) -> Result<()> {
    let svg = render_svg(panels)?;
    let dat = render_data(panels)?;
    let svg_path = dir.join(format!("{stem}.svg"));
    std::fs::write(&svg_path, svg).with_context(|| format!("writing {}", svg_path.display()))?;
    let dat_path = dir.join(format!("{stem}.dat"));
    std::fs::write(&dat_path, dat).with_context(|| format!("writing {}", dat_path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Mechanism;
    use crate::experiment::ErrorRecord;

    fn rec(n: usize, err: f64) -> ErrorRecord {
        ErrorRecord {
            mechanism: Mechanism::Alg1,
            n,
            epsilon: 1.0,
            rep: 0,
            max_abs_error: err,
            mean_abs_error: err / 2.0,
            runtime_ms: 0.0,
            clamped_count: 0,
        }
    }

    #[test]
    fn references_anchor_at_first_point() {
        assert_eq!(reference_linear(5.0, 100, 100), 5.0);
        assert_eq!(reference_linear(5.0, 100, 400), 20.0);
        let r = reference_sqrt_log2(5.0, 100, 400);
        let expect = 5.0 * 2.0 * (400f64.ln() / 100f64.ln()).powi(2);
        assert!((r - expect).abs() < 1e-12);
    }

    #[test]
    fn svg_and_data() {
        let panels = vec![Panel {
            weight_range: (1.0, 2.0),
            records: vec![rec(101, 10.0), rec(201, 15.0), rec(401, 22.0)],
        }];
        let svg = render_svg(&panels).unwrap();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<circle").count(), 3);
        let dat = render_data(&panels).unwrap();
        assert_eq!(dat.lines().filter(|l| l.starts_with("1 2 alg1")).count(), 3);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(render_svg(&[]).is_err());
        let empty = vec![Panel {
            weight_range: (1.0, 2.0),
            records: vec![],
        }];
        assert!(render_svg(&empty).is_err());
    }
}
