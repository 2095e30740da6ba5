//! Minimal self-contained SVG line charts. Plots are a convenience; the
//! CSVs are the contract.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

impl Chart {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            log_x: false,
            log_y: false,
            series: Vec::new(),
        }
    }

    pub fn log_log(mut self) -> Self {
        self.log_x = true;
        self.log_y = true;
        self
    }

    pub fn log_y(mut self) -> Self {
        self.log_y = true;
        self
    }

    pub fn with_series(mut self, label: &str, points: Vec<(f64, f64)>) -> Self {
        self.series.push(Series { label: label.to_string(), points });
        self
    }

    fn map_value(v: f64, log: bool) -> Option<f64> {
        if log {
            (v > 0.0).then(|| v.log10())
        } else {
            v.is_finite().then_some(v)
        }
    }

    pub fn render(&self) -> String {
        let mut pts: Vec<Vec<(f64, f64)>> = Vec::new();
        for s in &self.series {
            pts.push(
                s.points
                    .iter()
                    .filter_map(|&(x, y)| {
                        Some((Self::map_value(x, self.log_x)?, Self::map_value(y, self.log_y)?))
                    })
                    .collect(),
            );
        }
        let all: Vec<(f64, f64)> = pts.iter().flatten().copied().collect();
        let (x_min, x_max) = bounds(all.iter().map(|p| p.0));
        let (y_min, y_max) = bounds(all.iter().map(|p| p.1));

        let plot_w = WIDTH - MARGIN_L - MARGIN_R;
        let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
        let sx = |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * plot_w;
        let sy = |y: f64| MARGIN_T + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h;

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );

        // axes
        let x0 = MARGIN_L;
        let y0 = HEIGHT - MARGIN_B;
        let _ = writeln!(
            svg,
            r#"<line x1="{x0:.1}" y1="{y0:.1}" x2="{:.1}" y2="{y0:.1}" stroke="black"/>"#,
            WIDTH - MARGIN_R
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{x0:.1}" y1="{y0:.1}" x2="{x0:.1}" y2="{MARGIN_T:.1}" stroke="black"/>"#
        );

        // ticks: 5 per axis in mapped space
        for k in 0..=4 {
            let fx = x_min + (x_max - x_min) * k as f64 / 4.0;
            let px = sx(fx);
            let label = tick_label(fx, self.log_x);
            let _ = writeln!(
                svg,
                r#"<line x1="{px:.1}" y1="{y0:.1}" x2="{px:.1}" y2="{:.1}" stroke="black"/>"#,
                y0 + 5.0
            );
            let _ = writeln!(
                svg,
                r#"<text x="{px:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{label}</text>"#,
                y0 + 19.0
            );

            let fy = y_min + (y_max - y_min) * k as f64 / 4.0;
            let py = sy(fy);
            let label = tick_label(fy, self.log_y);
            let _ = writeln!(
                svg,
                r#"<line x1="{:.1}" y1="{py:.1}" x2="{x0:.1}" y2="{py:.1}" stroke="black"/>"#,
                x0 - 5.0
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{label}</text>"#,
                x0 - 8.0,
                py + 4.0
            );
        }

        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
            MARGIN_L + plot_w / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="16" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
            MARGIN_T + plot_h / 2.0,
            MARGIN_T + plot_h / 2.0,
            escape(&self.y_label)
        );

        for (idx, mapped) in pts.iter().enumerate() {
            let color = PALETTE[idx % PALETTE.len()];
            if mapped.len() > 1 {
                let path: Vec<String> =
                    mapped.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
                let _ = writeln!(
                    svg,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"/>"#,
                    path.join(" ")
                );
            }
            for &(x, y) in mapped {
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="2.2" fill="{color}"/>"#,
                    sx(x),
                    sy(y)
                );
            }
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" fill="{color}">{}</text>"#,
                MARGIN_L + 10.0,
                MARGIN_T + 16.0 + 16.0 * idx as f64,
                escape(&self.series[idx].label)
            );
        }

        svg.push_str("</svg>\n");
        svg
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render())
            .with_context(|| format!("cannot write chart {}", path.display()))
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for v in values {
        min = min.min(v);
        max = max.max(v);
    }
    if !min.is_finite() || !max.is_finite() {
        return (0.0, 1.0);
    }
    if (max - min).abs() < 1e-300 {
        return (min - 0.5, max + 0.5);
    }
    let pad = 0.04 * (max - min);
    (min - pad, max + pad)
}

fn tick_label(mapped: f64, log: bool) -> String {
    let v = if log { 10f64.powf(mapped) } else { mapped };
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        format!("{v:.3}")
    } else {
        format!("{v:.1e}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_wellformed_svg() {
        let chart = Chart::new("front", "t", "s")
            .with_series("s(t)", vec![(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)])
            .with_series("ref", vec![(0.0, 0.0), (1.0, 0.9)]);
        let svg = chart.render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn log_axes_drop_nonpositive_points() {
        let chart = Chart::new("err", "dxi", "E")
            .log_log()
            .with_series("E", vec![(0.1, 1e-3), (0.05, 0.0), (0.025, 1e-4)]);
        let svg = chart.render();
        // the zero point cannot be drawn on a log axis
        assert_eq!(svg.matches("<circle").count(), 2);
    }
}
