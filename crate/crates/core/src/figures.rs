//! CSV tables and standalone SVG plots of computed curves and orbits.
//!
//! Every CSV table starts with a `schema` column holding the format
//! version, so downstream scripts can detect layout changes.

use std::fmt::Write as _;
use std::io::Write;

use crate::hexagon::{MonteCarloReport, OrbitRecord};
use crate::levelset::LevelCurve;
use crate::scalar::format_f64;
use crate::Error;

pub const CSV_SCHEMA: u32 = 1;

fn csv_error(e: impl std::fmt::Display) -> Error {
    Error::Numerical(format!("csv output failed: {e}"))
}

/// Columns `schema, r, component_id, kind, x, y, theta`, one row per
/// sample of every curve.
pub fn write_level_curve_csv<W: Write>(out: W, curves: &[LevelCurve]) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["schema", "r", "component_id", "kind", "x", "y", "theta"])
        .map_err(csv_error)?;
    for curve in curves {
        for (id, c) in curve.components.iter().enumerate() {
            for s in &c.samples {
                w.write_record([
                    CSV_SCHEMA.to_string(),
                    format_f64(curve.r),
                    id.to_string(),
                    c.kind.to_string(),
                    format_f64(s.x),
                    format_f64(s.y),
                    format_f64(s.theta),
                ])
                .map_err(csv_error)?;
            }
        }
    }
    w.flush().map_err(csv_error)
}

const ORBIT_HEADER: [&str; 12] = [
    "iter",
    "x5",
    "y5",
    "x6",
    "y6",
    "A",
    "B",
    "C",
    "D",
    "quadric_residual",
    "d_residual",
    "residual",
];

fn orbit_row(r: &OrbitRecord) -> Vec<String> {
    let mut row = vec![r.iter.to_string()];
    row.extend(
        [
            r.x5,
            r.y5,
            r.x6,
            r.y6,
            r.a,
            r.b,
            r.c,
            r.d,
            r.quadric_residual,
            r.d_residual,
            r.residual(),
        ]
        .iter()
        .map(|v| format_f64(*v)),
    );
    row
}

/// One row per orbit record.
pub fn write_orbit_csv<W: Write>(out: W, records: &[OrbitRecord]) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["schema"];
    header.extend(ORBIT_HEADER);
    w.write_record(&header).map_err(csv_error)?;
    for r in records {
        let mut row = vec![CSV_SCHEMA.to_string()];
        row.extend(orbit_row(r));
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush().map_err(csv_error)
}

/// Every record of every run, tagged with the run index.
pub fn write_monte_carlo_csv<W: Write>(out: W, report: &MonteCarloReport) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["schema", "run"];
    header.extend(ORBIT_HEADER);
    w.write_record(&header).map_err(csv_error)?;
    for run in &report.runs {
        for r in &run.orbit.records {
            let mut row = vec![CSV_SCHEMA.to_string(), run.index.to_string()];
            row.extend(orbit_row(r));
            w.write_record(&row).map_err(csv_error)?;
        }
    }
    w.flush().map_err(csv_error)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    /// Open polyline, broken where consecutive points jump apart.
    Line,
    /// Closed polygon outline.
    Closed,
    Dots,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub points: Vec<(f64, f64)>,
    pub mark: Mark,
    pub color: String,
}

impl Series {
    pub fn new(points: Vec<(f64, f64)>, mark: Mark, color: &str) -> Self {
        Series {
            points,
            mark,
            color: color.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// `[xmin, xmax, ymin, ymax]`; fitted to the data when `None`.
    pub window: Option<[f64; 4]>,
}

impl Panel {
    pub fn new(title: &str, series: Vec<Series>) -> Self {
        Panel {
            title: title.into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series,
            window: None,
        }
    }

    pub fn labels(mut self, x: &str, y: &str) -> Self {
        self.x_label = x.into();
        self.y_label = y.into();
        self
    }

    pub fn window(mut self, w: [f64; 4]) -> Self {
        self.window = Some(w);
        self
    }

    fn bounds(&self) -> [f64; 4] {
        if let Some(w) = self.window {
            return w;
        }
        let pts = self
            .series
            .iter()
            .flat_map(|s| s.points.iter())
            .filter(|p| p.0.is_finite() && p.1.is_finite());
        let mut b = [
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        ];
        for &(x, y) in pts {
            b = [b[0].min(x), b[1].max(x), b[2].min(y), b[3].max(y)];
        }
        if !b[0].is_finite() {
            return [-1.0, 1.0, -1.0, 1.0];
        }
        let pad = |lo: f64, hi: f64| {
            let w = (hi - lo).max(1e-9);
            (lo - 0.05 * w, hi + 0.05 * w)
        };
        let (x0, x1) = pad(b[0], b[1]);
        let (y0, y1) = pad(b[2], b[3]);
        [x0, x1, y0, y1]
    }
}

const PANEL: f64 = 360.0;
const MARGIN: f64 = 44.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn render_panel(svg: &mut String, panel: &Panel, ox: f64, oy: f64) {
    let [x0, x1, y0, y1] = panel.bounds();
    let inner = PANEL - 2.0 * MARGIN;
    let sx = |x: f64| ox + MARGIN + (x - x0) / (x1 - x0) * inner;
    let sy = |y: f64| oy + PANEL - MARGIN - (y - y0) / (y1 - y0) * inner;
    let inside = |p: &(f64, f64)| p.0 >= x0 && p.0 <= x1 && p.1 >= y0 && p.1 <= y1;
    let _ = writeln!(
        svg,
        r##"<rect x="{:.2}" y="{:.2}" width="{inner:.2}" height="{inner:.2}" fill="none" stroke="#999"/>"##,
        ox + MARGIN,
        oy + MARGIN
    );
    if x0 < 0.0 && 0.0 < x1 {
        let _ = writeln!(
            svg,
            r##"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="#ccc"/>"##,
            sx(0.0),
            sy(y0),
            sy(y1)
        );
    }
    if y0 < 0.0 && 0.0 < y1 {
        let _ = writeln!(
            svg,
            r##"<line x1="{1:.2}" y1="{0:.2}" x2="{2:.2}" y2="{0:.2}" stroke="#ccc"/>"##,
            sy(0.0),
            sx(x0),
            sx(x1)
        );
    }
    let text = |svg: &mut String, x: f64, y: f64, anchor: &str, s: &str| {
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="11" font-family="sans-serif" text-anchor="{anchor}">{}</text>"#,
            escape(s)
        );
    };
    text(
        svg,
        ox + PANEL / 2.0,
        oy + MARGIN - 12.0,
        "middle",
        &panel.title,
    );
    text(
        svg,
        ox + PANEL / 2.0,
        oy + PANEL - 8.0,
        "middle",
        &panel.x_label,
    );
    text(svg, ox + 12.0, oy + PANEL / 2.0, "middle", &panel.y_label);
    text(
        svg,
        sx(x0),
        oy + PANEL - MARGIN + 14.0,
        "start",
        &format!("{x0:.3}"),
    );
    text(
        svg,
        sx(x1),
        oy + PANEL - MARGIN + 14.0,
        "end",
        &format!("{x1:.3}"),
    );
    text(svg, ox + MARGIN - 4.0, sy(y0), "end", &format!("{y0:.3}"));
    text(
        svg,
        ox + MARGIN - 4.0,
        sy(y1) + 8.0,
        "end",
        &format!("{y1:.3}"),
    );

    let jump = 0.25 * ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();
    for s in &panel.series {
        match s.mark {
            Mark::Dots => {
                for p in s.points.iter().filter(|p| inside(p)) {
                    let _ = writeln!(
                        svg,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="1.6" fill="{}"/>"#,
                        sx(p.0),
                        sy(p.1),
                        s.color
                    );
                }
            }
            Mark::Closed => {
                let pts: Vec<String> = s
                    .points
                    .iter()
                    .map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1)))
                    .collect();
                let _ = writeln!(
                    svg,
                    r#"<polygon points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
                    pts.join(" "),
                    s.color
                );
            }
            Mark::Line => {
                let mut runs: Vec<Vec<(f64, f64)>> = vec![vec![]];
                for (k, p) in s.points.iter().enumerate() {
                    let broken = k > 0 && {
                        let q = s.points[k - 1];
                        ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt() > jump
                    };
                    if !inside(p) || broken {
                        runs.push(vec![]);
                    }
                    if inside(p) {
                        runs.last_mut().expect("nonempty").push(*p);
                    }
                }
                for run in runs.iter().filter(|r| r.len() > 1) {
                    let pts: Vec<String> = run
                        .iter()
                        .map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1)))
                        .collect();
                    let _ = writeln!(
                        svg,
                        r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
                        pts.join(" "),
                        s.color
                    );
                }
            }
        }
    }
}

/// A grid of panels as a standalone SVG document.
pub fn render_svg(panels: &[Panel], columns: usize) -> String {
    let columns = columns.max(1).min(panels.len().max(1));
    let rows = panels.len().div_ceil(columns).max(1);
    let (w, h) = (PANEL * columns as f64, PANEL * rows as f64);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    for (k, p) in panels.iter().enumerate() {
        render_panel(
            &mut svg,
            p,
            PANEL * (k % columns) as f64,
            PANEL * (k / columns) as f64,
        );
    }
    svg.push_str("</svg>\n");
    svg
}

const COLORS: [&str; 4] = ["#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad"];

/// One panel per level, each component in its own colour, in the window
/// `[-6, 6]^2`.
pub fn level_curves_svg(curves: &[LevelCurve]) -> String {
    let panels: Vec<Panel> = curves
        .iter()
        .map(|c| {
            let series = c
                .components
                .iter()
                .enumerate()
                .map(|(k, comp)| {
                    let mark = match comp.kind {
                        crate::levelset::ComponentKind::Bounded => Mark::Closed,
                        crate::levelset::ComponentKind::Unbounded => Mark::Line,
                    };
                    Series::new(
                        comp.samples.iter().map(|s| (s.x, s.y)).collect(),
                        mark,
                        COLORS[k % COLORS.len()],
                    )
                })
                .collect();
            Panel::new(&format!("I = {}", c.r), series).window([-6.0, 6.0, -6.0, 6.0])
        })
        .collect();
    render_svg(&panels, 2)
}

/// A polygon in black and its image in blue; vertices at infinity are
/// dropped.
pub fn polygon_overlay_svg(p: &[Option<(f64, f64)>], image: &[Option<(f64, f64)>]) -> String {
    let series = vec![
        Series::new(
            p.iter().flatten().copied().collect(),
            Mark::Closed,
            "#000000",
        ),
        Series::new(
            image.iter().flatten().copied().collect(),
            Mark::Closed,
            "#1f4e9c",
        ),
    ];
    render_svg(&[Panel::new("P and T(P)", series)], 1)
}

/// The `(A, C)` and `(B, C)` projections of one or more hexagon orbits.
pub fn hexagon_orbits_svg(orbits: &[&[OrbitRecord]]) -> String {
    let project = |f: fn(&OrbitRecord) -> (f64, f64)| -> Vec<Series> {
        orbits
            .iter()
            .enumerate()
            .map(|(k, o)| {
                Series::new(
                    o.iter().map(f).collect(),
                    Mark::Dots,
                    COLORS[k % COLORS.len()],
                )
            })
            .collect()
    };
    let ac = Panel::new("(A, C) projection", project(|r| (r.a, r.c))).labels("A", "C");
    let bc = Panel::new("(B, C) projection", project(|r| (r.b, r.c))).labels("B", "C");
    render_svg(&[ac, bc], 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levelset::{sample_level_curve, DEFAULT_ODE_TOL};

    #[test]
    fn level_curve_csv_has_schema_column() {
        let c = sample_level_curve(12.0, 8, DEFAULT_ODE_TOL).unwrap();
        let mut buf = Vec::new();
        write_level_curve_csv(&mut buf, &[c]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "schema,r,component_id,kind,x,y,theta"
        );
        assert!(lines.clone().all(|l| l.starts_with("1,")));
        assert!(lines.any(|l| l.contains(",bounded,")));
    }

    #[test]
    fn svg_is_well_formed_and_deterministic() {
        let panel = Panel::new(
            "demo <1>",
            vec![Series::new(
                vec![(0.0, 0.0), (1.0, 2.0), (50.0, 0.0)],
                Mark::Line,
                "red",
            )],
        );
        let a = render_svg(&[panel.clone(), panel], 2);
        assert!(a.starts_with("<svg"));
        assert!(a.trim_end().ends_with("</svg>"));
        assert!(a.contains("demo &lt;1&gt;"));
        assert_eq!(a.matches("<polyline").count(), 2);
        let b = level_curves_svg(&[sample_level_curve(1.0, 50, DEFAULT_ODE_TOL).unwrap()]);
        let c = level_curves_svg(&[sample_level_curve(1.0, 50, DEFAULT_ODE_TOL).unwrap()]);
        assert_eq!(b, c);
    }
}
