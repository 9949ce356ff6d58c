//! Log-log SVG figure of the excess-risk quantile curves, one panel per
//! prior. The first `n*` is drawn solid, the next ones dashed, and the
//! dotted reference `c (ln T)³/√T` goes through the first plotted point.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::experiment::{quantile_curves, QuantileCurve, ResultRow};
use crate::stable_domain::PriorKind;

const PANEL_W: f64 = 440.0;
const PANEL_H: f64 = 340.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

const DASHES: [&str; 4] = ["", "8,5", "12,4,3,4", "4,2"];
const COLORS: [&str; 4] = ["#1f4e9c", "#b3261e", "#2e7d32", "#6a1b9a"];

fn rate(t: f64) -> f64 {
    t.ln().powi(3) / t.sqrt()
}

/// `c (ln T)³/√T` at each `T`, with `c` chosen so the value at `anchor_t`
/// equals `anchor_value`.
pub fn reference_curve(anchor_t: usize, anchor_value: f64, ts: &[usize]) -> Vec<(usize, f64)> {
    let c = anchor_value / rate(anchor_t as f64);
    ts.iter().map(|&t| (t, c * rate(t as f64))).collect()
}

struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn new(min: f64, max: f64, px_lo: f64, px_hi: f64) -> Self {
        let (mut lo, mut hi) = (min.log10(), max.log10());
        if hi - lo < 1e-9 {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = 0.05 * (hi - lo);
        Axis {
            lo: lo - pad,
            hi: hi + pad,
            px_lo,
            px_hi,
        }
    }

    fn map(&self, v: f64) -> f64 {
        self.px_lo + (v.log10() - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }

    fn contains(&self, v: f64) -> bool {
        let l = v.log10();
        l >= self.lo - 1e-12 && l <= self.hi + 1e-12
    }

    /// 1-2-5 ticks inside the range.
    fn ticks(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for e in (self.lo.floor() as i32)..=(self.hi.ceil() as i32) {
            for m in [1.0, 2.0, 5.0] {
                let v = m * 10f64.powi(e);
                if self.contains(v) {
                    out.push(v);
                }
            }
        }
        out
    }
}

fn fmt_tick(v: f64) -> String {
    if (1e-3..1e4).contains(&v) {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.0e}")
    }
}

fn polyline(out: &mut String, pts: &[(f64, f64)], color: &str, dash: &str, width: f64) {
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let dash_attr = if dash.is_empty() {
        String::new()
    } else {
        format!(" stroke-dasharray=\"{dash}\"")
    };
    let _ = writeln!(
        out,
        "    <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\"{dash_attr} points=\"{}\"/>",
        coords.join(" ")
    );
}

fn draw_panel(out: &mut String, x0: f64, prior: PriorKind, curves: &[&QuantileCurve], n_stars: &[usize]) {
    let mut ts: Vec<usize> = curves.iter().flat_map(|c| c.points.iter().map(|p| p.0)).collect();
    ts.sort_unstable();
    ts.dedup();

    let positive = |c: &QuantileCurve| -> Vec<(usize, f64)> {
        c.points.iter().copied().filter(|&(_, v)| v > 0.0 && v.is_finite()).collect()
    };
    let anchor = curves.iter().find_map(|c| positive(c).first().copied());
    let reference = anchor.map(|(t, v)| reference_curve(t, v, &ts)).unwrap_or_default();

    let values: Vec<f64> = curves
        .iter()
        .flat_map(|c| positive(c).into_iter().map(|p| p.1))
        .chain(reference.iter().map(|p| p.1))
        .collect();
    let (vmin, vmax) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (vmin, vmax) = if vmin.is_finite() { (vmin, vmax) } else { (0.1, 1.0) };

    let left = x0 + MARGIN_L;
    let right = x0 + PANEL_W - MARGIN_R;
    let top = MARGIN_T;
    let bottom = PANEL_H - MARGIN_B;
    let x_axis = Axis::new(ts[0] as f64, *ts.last().unwrap() as f64, left, right);
    let y_axis = Axis::new(vmin, vmax, bottom, top);

    let _ = writeln!(out, "  <g class=\"panel\" data-prior=\"{}\">", prior.name());
    let title = match prior {
        PriorKind::InverseSquare => "order prior c_k = k^-2",
        PriorKind::Exponential => "order prior c_k = e^-k",
    };
    let _ = writeln!(
        out,
        "    <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"14\">{title}</text>",
        (left + right) / 2.0,
        top - 15.0
    );
    let _ = writeln!(
        out,
        "    <rect x=\"{left:.1}\" y=\"{top:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"#000\"/>",
        right - left,
        bottom - top
    );
    for &t in &ts {
        let x = x_axis.map(t as f64);
        let _ = writeln!(
            out,
            "    <line x1=\"{x:.2}\" y1=\"{bottom:.1}\" x2=\"{x:.2}\" y2=\"{:.1}\" stroke=\"#000\"/>",
            bottom + 5.0
        );
        let _ = writeln!(
            out,
            "    <text x=\"{x:.2}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"11\">{t}</text>",
            bottom + 18.0
        );
    }
    for v in y_axis.ticks() {
        let y = y_axis.map(v);
        let _ = writeln!(
            out,
            "    <line x1=\"{:.1}\" y1=\"{y:.2}\" x2=\"{left:.1}\" y2=\"{y:.2}\" stroke=\"#000\"/>",
            left - 5.0
        );
        let _ = writeln!(
            out,
            "    <text x=\"{:.1}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"11\">{}</text>",
            left - 8.0,
            y + 4.0,
            fmt_tick(v)
        );
    }
    let _ = writeln!(
        out,
        "    <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\">T</text>",
        (left + right) / 2.0,
        bottom + 38.0
    );

    let to_px = |pts: &[(usize, f64)]| -> Vec<(f64, f64)> {
        pts.iter().map(|&(t, v)| (x_axis.map(t as f64), y_axis.map(v))).collect()
    };
    for curve in curves {
        let idx = n_stars.iter().position(|&n| n == curve.n_star).unwrap_or(0);
        let pts = to_px(&positive(curve));
        let color = COLORS[idx % COLORS.len()];
        polyline(out, &pts, color, DASHES[idx % DASHES.len()], 2.0);
        for (x, y) in &pts {
            let _ = writeln!(out, "    <circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"2.5\" fill=\"{color}\"/>");
        }
    }
    if !reference.is_empty() {
        polyline(out, &to_px(&reference), "#555", "2,4", 1.5);
    }

    // legend
    let mut ly = top + 16.0;
    let lx = right - 150.0;
    for (idx, n) in n_stars.iter().enumerate() {
        let color = COLORS[idx % COLORS.len()];
        polyline(out, &[(lx, ly - 4.0), (lx + 30.0, ly - 4.0)], color, DASHES[idx % DASHES.len()], 2.0);
        let _ = writeln!(
            out,
            "    <text x=\"{:.1}\" y=\"{ly:.1}\" font-size=\"11\">n* = {n}</text>",
            lx + 36.0
        );
        ly += 16.0;
    }
    polyline(out, &[(lx, ly - 4.0), (lx + 30.0, ly - 4.0)], "#555", "2,4", 1.5);
    let _ = writeln!(
        out,
        "    <text x=\"{:.1}\" y=\"{ly:.1}\" font-size=\"11\">∝ (ln T)³/√T</text>",
        lx + 36.0
    );
    let _ = writeln!(out, "  </g>");
}

/// SVG document for the quantile curves of `rows`.
pub fn render_svg(rows: &[ResultRow], q: f64) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::invalid("nothing to plot"));
    }
    let curves = quantile_curves(rows, q)?;
    let mut by_prior: BTreeMap<PriorKind, Vec<&QuantileCurve>> = BTreeMap::new();
    for c in &curves {
        by_prior.entry(c.prior).or_default().push(c);
    }
    let mut n_stars: Vec<usize> = curves.iter().map(|c| c.n_star).collect();
    n_stars.sort_unstable();
    n_stars.dedup();

    let width = PANEL_W * by_prior.len() as f64;
    let mut out = String::new();
    let _ = writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{PANEL_H:.0}\" viewBox=\"0 0 {width:.0} {PANEL_H:.0}\" font-family=\"sans-serif\">"
    );
    let _ = writeln!(
        out,
        "  <title>{}-quantile of excess risk against T</title>",
        q
    );
    let _ = writeln!(out, "  <rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>");
    for (i, (prior, cs)) in by_prior.iter().enumerate() {
        draw_panel(&mut out, i as f64 * PANEL_W, *prior, cs, &n_stars);
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}

pub fn emit_plot(rows: &[ResultRow], q: f64, path: &Path) -> Result<()> {
    let svg = render_svg(rows, q)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(prior: PriorKind, t: usize, n_star: usize, replicate: usize, excess: f64) -> ResultRow {
        ResultRow {
            prior,
            t,
            n_star,
            replicate,
            seed: 0,
            theta_bar: vec![0.0],
            risk: excess + 0.8,
            excess_risk: excess,
            acceptance_rate: 0.5,
        }
    }

    #[test]
    fn reference_passes_through_anchor() {
        let ts = [64, 128, 256, 4096];
        let curve = reference_curve(64, 0.37, &ts);
        assert_eq!(curve[0].0, 64);
        assert!((curve[0].1 - 0.37).abs() < 1e-15);
        let expected = 0.37 * rate(4096.0) / rate(64.0);
        assert!((curve[3].1 - expected).abs() < 1e-15);
    }

    #[test]
    fn single_row_plot_is_valid_xml() {
        let svg = render_svg(&[row(PriorKind::InverseSquare, 64, 100, 0, 0.2)], 0.9).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let lines = doc.descendants().filter(|n| n.has_tag_name("polyline")).count();
        // curve + reference + two legend entries
        assert_eq!(lines, 4);
        let circles = doc.descendants().filter(|n| n.has_tag_name("circle")).count();
        assert_eq!(circles, 1);
    }

    #[test]
    fn two_priors_two_budgets() {
        let mut rows = Vec::new();
        for prior in PriorKind::ALL {
            for (i, t) in [64, 128, 256].into_iter().enumerate() {
                for n in [100, 1000] {
                    rows.push(row(prior, t, n, 0, 0.3 / (i + 1) as f64 / (n as f64).log10()));
                }
            }
        }
        let svg = render_svg(&rows, 0.9).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let panels = doc.descendants().filter(|n| n.attribute("class") == Some("panel")).count();
        assert_eq!(panels, 2);
        let dashed = doc
            .descendants()
            .filter(|n| n.attribute("stroke-dasharray") == Some("8,5"))
            .count();
        assert!(dashed >= 2);
        assert!(render_svg(&[], 0.9).is_err());
    }

    #[test]
    fn nonpositive_values_are_skipped() {
        let rows = vec![
            row(PriorKind::Exponential, 64, 100, 0, 0.0),
            row(PriorKind::Exponential, 128, 100, 0, 0.1),
        ];
        let svg = render_svg(&rows, 0.9).unwrap();
        assert!(roxmltree::Document::parse(&svg).is_ok());
    }
}
