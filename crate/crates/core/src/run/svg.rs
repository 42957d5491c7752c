//! Self-contained SVG log-log plots of convergence tables.

use std::fmt::Write;

use crate::verify::{ConvergenceTable, Metric};

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 540.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 230.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

fn color(m: Metric) -> &'static str {
    match m {
        Metric::U => "#1f77b4",
        Metric::L => "#d62728",
        Metric::P => "#2ca02c",
        Metric::Super => "#9467bd",
        Metric::Z2Scaled => "#ff7f0e",
    }
}

fn label(m: Metric) -> &'static str {
    match m {
        Metric::U => "u",
        Metric::L => "L",
        Metric::P => "p",
        Metric::Super => "J_h u - u_h",
        Metric::Z2Scaled => "sqrt(eps) Z2",
    }
}

const DASHES: [&str; 4] = ["", "6 3", "2 3", "8 3 2 3"];

struct Axes {
    x: (f64, f64),
    y: (f64, f64),
}

impl Axes {
    /// `h` decreases to the right.
    fn px(&self, h: f64) -> f64 {
        let t = (self.x.1 - h.log10()) / (self.x.1 - self.x.0);
        LEFT + t * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, e: f64) -> f64 {
        let t = (e.log10() - self.y.0) / (self.y.1 - self.y.0);
        HEIGHT - BOTTOM - t * (HEIGHT - TOP - BOTTOM)
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| *v > 0.0 && v.is_finite())
        .map(f64::log10)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    (lo <= hi).then_some((lo, hi))
}

/// Errors of every metric against `h`, with dashed reference slopes `k + 1`
/// (anchored at the finest velocity error) and `k` (anchored at the finest
/// scaled gradient error).
pub fn plot_svg(tables: &[ConvergenceTable], title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, (WIDTH - RIGHT + LEFT) / 2.0, escape(title));
    let rows = || tables.iter().flat_map(|t| t.rows.iter());
    let errs = bounds(rows().flat_map(|r| Metric::ALL.map(|m| m.of(r))));
    let hs = bounds(rows().map(|r| r.h));
    let (Some(ey), Some(hx)) = (errs, hs) else {
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">no data</text>"#, WIDTH / 2.0, HEIGHT / 2.0);
        s.push_str("</svg>\n");
        return s;
    };
    let axes = Axes {
        x: ((hx.0 - 0.1).floor().min(hx.0 - 0.15), (hx.1 + 0.1).max(hx.0 + 0.3)),
        y: (ey.0.floor(), ey.1.ceil().max(ey.0.floor() + 1.0)),
    };
    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (TOP, HEIGHT - BOTTOM);
    let _ = writeln!(s, r##"<g stroke="#ddd">"##);
    for d in (axes.y.0 as i32)..=(axes.y.1 as i32) {
        let y = axes.py(10f64.powi(d));
        let _ = writeln!(s, r#"<line x1="{x0}" y1="{y:.1}" x2="{x1}" y2="{y:.1}"/>"#);
    }
    for r in rows() {
        let x = axes.px(r.h);
        let _ = writeln!(s, r#"<line x1="{x:.1}" y1="{y0}" x2="{x:.1}" y2="{y1}"/>"#);
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#, x1 - x0, y1 - y0);
    for d in (axes.y.0 as i32)..=(axes.y.1 as i32) {
        let y = axes.py(10f64.powi(d));
        let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">1e{d}</text>"#, x0 - 6.0, y + 4.0);
    }
    let mut seen = Vec::new();
    for r in rows() {
        if !seen.iter().any(|h: &f64| (h - r.h).abs() < 1e-12) {
            seen.push(r.h);
            let _ = writeln!(s, r#"<text x="{:.1}" y="{}" text-anchor="middle">{:.3}</text>"#, axes.px(r.h), y1 + 18.0, r.h);
        }
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">h</text>"#, (x0 + x1) / 2.0, y1 + 42.0);
    let _ = writeln!(s, r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">error</text>"#, (y0 + y1) / 2.0, (y0 + y1) / 2.0);

    let mut legend = Vec::new();
    for (ti, t) in tables.iter().enumerate() {
        let dash = DASHES[ti % DASHES.len()];
        for m in Metric::ALL {
            let pts: Vec<(f64, f64)> = t.rows.iter().filter(|r| m.of(r) > 0.0).map(|r| (axes.px(r.h), axes.py(m.of(r)))).collect();
            if pts.is_empty() {
                continue;
            }
            let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.6" stroke-dasharray="{dash}"/>"#,
                path.join(" "),
                color(m)
            );
            for (x, y) in &pts {
                let _ = writeln!(s, r#"<circle cx="{x:.1}" cy="{y:.1}" r="3" fill="{}"/>"#, color(m));
            }
            legend.push((format!("{} (k={}, eps={:e})", label(m), t.k, t.epsilon), color(m), dash));
        }
        if let Some(last) = t.rows.last() {
            let first = &t.rows[0];
            for (m, slope) in [(Metric::U, t.k as f64 + 1.0), (Metric::Z2Scaled, t.k as f64)] {
                let e = m.of(last);
                if e <= 0.0 || slope <= 0.0 || t.rows.len() < 2 {
                    continue;
                }
                // factor 0.5 keeps the guide just below the data
                let anchor = 0.5 * e;
                let e0 = anchor * (first.h / last.h).powf(slope);
                let _ = writeln!(
                    s,
                    r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#555" stroke-dasharray="4 4"/>"##,
                    axes.px(first.h),
                    axes.py(e0),
                    axes.px(last.h),
                    axes.py(anchor)
                );
                let _ = writeln!(s, r##"<text x="{:.1}" y="{:.1}" fill="#555">h^{slope}</text>"##, axes.px(last.h) + 4.0, axes.py(anchor) + 4.0);
            }
        }
    }
    let lx = WIDTH - RIGHT + 16.0;
    for (i, (text, col, dash)) in legend.iter().enumerate() {
        let y = TOP + 8.0 + 16.0 * i as f64;
        let _ = writeln!(s, r#"<line x1="{lx}" y1="{y}" x2="{}" y2="{y}" stroke="{col}" stroke-width="2" stroke-dasharray="{dash}"/>"#, lx + 22.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="11">{}</text>"#, lx + 28.0, y + 4.0, escape(text));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::ConvergenceRow;

    fn table(k: usize) -> ConvergenceTable {
        let rows = [4usize, 8, 16]
            .iter()
            .map(|&n| {
                let h = 1.0 / n as f64;
                ConvergenceRow { level: n, h, n_dof: n, err_u: h * h, err_l: h, err_p: 2.0 * h * h, err_super: h.powi(3), err_z2_scaled: h }
            })
            .collect();
        ConvergenceTable { k, epsilon: 1.0, rows }
    }

    #[test]
    fn plot_has_series_and_guides() {
        let svg = plot_svg(&[table(1)], "k = 1 <square>");
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 5);
        assert!(svg.contains("h^2") && svg.contains("h^1"));
        assert!(svg.contains("&lt;square&gt;"));
    }

    #[test]
    fn coarse_h_is_on_the_left() {
        let t = table(1);
        let axes = Axes { x: (-1.5, -0.5), y: (-3.0, 0.0) };
        assert!(axes.px(t.rows[0].h) < axes.px(t.rows[2].h));
        assert!(axes.py(1e-3) > axes.py(1e-1));
    }

    #[test]
    fn empty_input() {
        assert!(plot_svg(&[], "x").contains("no data"));
    }
}
