//! Cumulative-regret curves as standalone SVG.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};
use crate::trace::read_trace;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 60.0;
/// Polylines are thinned to at most this many vertices.
const MAX_POINTS: usize = 2000;

/// Axis ranges `[0, T] × [y_min, y_max]` with `y_min = min(0, min regret)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axes {
    pub t_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Axes {
    pub fn covering(curves: &[Vec<f64>]) -> Self {
        let t_max = curves.iter().map(Vec::len).max().unwrap_or(0) as f64;
        let values = curves.iter().flatten().copied();
        let (lo, hi) = values.fold((0.0f64, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        Axes {
            t_max: t_max.max(1.0),
            y_min: lo,
            y_max: if hi > lo { hi } else { lo + 1.0 },
        }
    }

    fn x(&self, t: f64) -> f64 {
        MARGIN + t / self.t_max * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (v - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - 2.0 * MARGIN)
    }
}

/// Mean over the curves that reach each round.
pub fn mean_curve(curves: &[Vec<f64>]) -> Vec<f64> {
    let len = curves.iter().map(Vec::len).max().unwrap_or(0);
    (0..len)
        .map(|t| {
            let (sum, count) = curves
                .iter()
                .filter_map(|c| c.get(t))
                .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
            sum / count as f64
        })
        .collect()
}

fn polyline(svg: &mut String, axes: &Axes, curve: &[f64], class: &str, style: &str) {
    let stride = curve.len().div_ceil(MAX_POINTS).max(1);
    let mut points = format!("{:.2},{:.2}", axes.x(0.0), axes.y(0.0));
    for (t, v) in curve.iter().enumerate() {
        if (t + 1) % stride == 0 || t + 1 == curve.len() {
            write!(points, " {:.2},{:.2}", axes.x((t + 1) as f64), axes.y(*v))
                .expect("writing to a string");
        }
    }
    writeln!(
        svg,
        r#"<polyline class="{class}" fill="none" {style} points="{points}"/>"#
    )
    .expect("writing to a string");
}

/// One faint line per curve plus a bold mean; a single curve is drawn once.
pub fn render_svg(curves: &[Vec<f64>]) -> Result<String> {
    if curves.is_empty() || curves.iter().all(Vec::is_empty) {
        return Err(HarnessError::Input("no regret curves to plot".into()));
    }
    let axes = Axes::covering(curves);
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" data-x-range="0 {}" data-y-range="{} {}">"#,
        axes.t_max, axes.y_min, axes.y_max
    )
    .expect("writing to a string");
    svg.push_str("<title>cumulative regret</title>\n");
    svg.push_str(r#"<rect width="100%" height="100%" fill="white"/>"#);
    svg.push('\n');
    let (x0, x1, y0, y1) = (
        axes.x(0.0),
        axes.x(axes.t_max),
        axes.y(axes.y_min),
        axes.y(axes.y_max),
    );
    writeln!(
        svg,
        r#"<path class="axes" d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" stroke="black" fill="none"/>"#
    )
    .expect("writing to a string");
    if axes.y_min < 0.0 {
        let z = axes.y(0.0);
        writeln!(svg, r##"<line x1="{x0:.2}" y1="{z:.2}" x2="{x1:.2}" y2="{z:.2}" stroke="#999" stroke-dasharray="4 3"/>"##)
            .expect("writing to a string");
    }
    let label = |svg: &mut String, x: f64, y: f64, anchor: &str, text: String| {
        writeln!(
            svg,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="12" text-anchor="{anchor}">{text}</text>"#
        )
        .expect("writing to a string");
    };
    label(&mut svg, x0, y0 + 18.0, "middle", "0".into());
    label(&mut svg, x1, y0 + 18.0, "middle", format!("{}", axes.t_max));
    label(
        &mut svg,
        x0 - 6.0,
        y0 + 4.0,
        "end",
        format!("{:.3}", axes.y_min),
    );
    label(
        &mut svg,
        x0 - 6.0,
        y1 + 4.0,
        "end",
        format!("{:.3}", axes.y_max),
    );
    label(
        &mut svg,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0,
        "middle",
        "t".into(),
    );
    label(&mut svg, 15.0, (y0 + y1) / 2.0, "middle", "regret".into());
    if let [only] = curves {
        polyline(
            &mut svg,
            &axes,
            only,
            "mean",
            r##"stroke="#1f4e9c" stroke-width="2.5""##,
        );
    } else {
        for c in curves {
            polyline(
                &mut svg,
                &axes,
                c,
                "seed",
                r##"stroke="#1f4e9c" stroke-opacity="0.25" stroke-width="1""##,
            );
        }
        polyline(
            &mut svg,
            &axes,
            &mean_curve(curves),
            "mean",
            r##"stroke="#0b2454" stroke-width="2.5""##,
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Plots every trace matching `pattern` in path order.
pub fn plot_traces(pattern: &str, out: &Path) -> Result<usize> {
    let mut paths: Vec<PathBuf> = glob::glob(pattern)?
        .filter_map(std::result::Result::ok)
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(HarnessError::Input(format!(
            "no trace files match {pattern}"
        )));
    }
    let curves = paths
        .iter()
        .map(|p| Ok(read_trace(p)?.iter().map(|r| r.cum_regret).collect()))
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let svg = render_svg(&curves)?;
    std::fs::write(out, svg).map_err(|e| HarnessError::io(out, e))?;
    Ok(curves.len())
}
