//! Static SVG charts. Output is a pure function of the inputs.

use std::fmt::Write as _;

use trendfolio_core::{PerformanceSummary64, SweepTable64, TimingMode};

use crate::output::ValuePath;

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 300.0;
const MARGIN: f64 = 50.0;

#[derive(Debug, Clone, Copy)]
enum Marker {
    Filled,
    Hollow,
    None,
}

struct Series<'a> {
    points: Vec<(f64, f64)>,
    color: &'a str,
    dashed: bool,
    line: bool,
    marker: Marker,
    label: &'a str,
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * (1.0 + lo.abs()) {
        return (
            lo - 0.5 * (1.0 + lo.abs()) * 1e-3,
            hi + 0.5 * (1.0 + hi.abs()) * 1e-3,
        );
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn panel(out: &mut String, x0: f64, title: &str, x_label: &str, series: &[Series]) {
    let (xmin, xmax) = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (ymin, ymax) = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let left = x0 + MARGIN;
    let top = MARGIN;
    let w = PANEL_W - 1.5 * MARGIN;
    let h = PANEL_H - 2.0 * MARGIN;
    let sx = |x: f64| left + (x - xmin) / (xmax - xmin) * w;
    let sy = |y: f64| top + h - (y - ymin) / (ymax - ymin) * h;

    writeln!(
        out,
        r#"<rect x="{left:.2}" y="{top:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{title}</text>"#,
        left + w / 2.0,
        top - 15.0
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x_label}</text>"#,
        left + w / 2.0,
        top + h + 35.0
    )
    .unwrap();
    for (v, y) in [(ymin, top + h), (ymax, top)] {
        writeln!(
            out,
            r#"<text x="{:.2}" y="{y:.2}" text-anchor="end" font-size="10">{v:.4}</text>"#,
            left - 4.0
        )
        .unwrap();
    }
    for (v, x) in [(xmin, left), (xmax, left + w)] {
        writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" font-size="10">{v:.4}</text>"#,
            top + h + 14.0
        )
        .unwrap();
    }

    for (k, s) in series.iter().enumerate() {
        if s.line && !s.points.is_empty() {
            let pts: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let dash = if s.dashed {
                r#" stroke-dasharray="6,4""#
            } else {
                ""
            };
            writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{}"{dash}/>"#,
                pts.join(" "),
                s.color
            )
            .unwrap();
        }
        for &(x, y) in &s.points {
            let fill = match s.marker {
                Marker::Filled => s.color,
                Marker::Hollow => "white",
                Marker::None => continue,
            };
            writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{fill}" stroke="{}"/>"#,
                sx(x),
                sy(y),
                s.color
            )
            .unwrap();
        }
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" fill="{}">{}</text>"#,
            left + 6.0,
            top + 14.0 + 12.0 * k as f64,
            s.color,
            s.label
        )
        .unwrap();
    }
}

fn document(width: f64, body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{PANEL_H:.0}\" \
         font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

fn marker(mode: TimingMode) -> Marker {
    match mode {
        TimingMode::InSample => Marker::Filled,
        TimingMode::OutOfSample => Marker::Hollow,
    }
}

/// Standard deviation and Sharpe ratio against alpha, one panel each.
/// In-sample points are filled, out-of-sample hollow; the benchmark is a
/// dashed red line.
pub fn sweep_svg(tables: &[SweepTable64], benchmark: Option<&PerformanceSummary64>) -> String {
    let alphas: Vec<f64> = tables
        .iter()
        .flat_map(|t| t.rows.iter().map(|r| r.alpha))
        .collect();
    let (amin, amax) = bounds(alphas.iter().copied());
    let mut body = String::new();
    for (k, (title, metric)) in [
        (
            "standard deviation",
            (|s: &PerformanceSummary64| Some(s.std_dev)) as fn(&_) -> Option<f64>,
        ),
        ("Sharpe ratio", |s: &PerformanceSummary64| s.sharpe),
    ]
    .into_iter()
    .enumerate()
    {
        let mut series: Vec<Series> = tables
            .iter()
            .map(|t| Series {
                points: t
                    .rows
                    .iter()
                    .filter_map(|r| metric(&r.summary).map(|v| (r.alpha, v)))
                    .collect(),
                color: "black",
                dashed: false,
                line: false,
                marker: marker(t.mode),
                label: t.mode.label(),
            })
            .collect();
        if let Some(v) = benchmark.and_then(metric) {
            series.push(Series {
                points: vec![(amin, v), (amax, v)],
                color: "red",
                dashed: true,
                line: true,
                marker: Marker::None,
                label: "benchmark",
            });
        }
        panel(&mut body, k as f64 * PANEL_W, title, "alpha", &series);
    }
    document(2.0 * PANEL_W, &body)
}

/// Portfolio value against weeks since the start: benchmark red,
/// out-of-sample black, in-sample grey.
pub fn value_paths_svg(
    paths: &[(TimingMode, &ValuePath)],
    benchmark: Option<&ValuePath>,
) -> String {
    let to_points = |p: &ValuePath| -> Vec<(f64, f64)> {
        p.values
            .iter()
            .enumerate()
            .map(|(t, v)| (t as f64, *v))
            .collect()
    };
    let mut series: Vec<Series> = paths
        .iter()
        .map(|(mode, p)| Series {
            points: to_points(p),
            color: match mode {
                TimingMode::InSample => "grey",
                TimingMode::OutOfSample => "black",
            },
            dashed: false,
            line: true,
            marker: Marker::None,
            label: mode.label(),
        })
        .collect();
    if let Some(b) = benchmark {
        series.push(Series {
            points: to_points(b),
            color: "red",
            dashed: false,
            line: true,
            marker: Marker::None,
            label: "benchmark",
        });
    }
    let mut body = String::new();
    panel(&mut body, 0.0, "portfolio value", "weeks", &series);
    document(PANEL_W, &body)
}
