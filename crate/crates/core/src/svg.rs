//! SVG rendering of dissections, paths and tethered configurations.

use std::fmt::Write;

use crate::dissection::DissectionGraph;
use crate::geom::{Point, Polyline};

const PALETTE: [&str; 8] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];
const WIDTH: f64 = 640.0;
const MARGIN: f64 = 16.0;

#[derive(Clone, Debug, Default)]
pub struct Layers {
    /// Boundary and obstacle outlines.
    pub environment: bool,
    pub cells: bool,
    pub cutlines: bool,
    pub paths: Vec<Polyline>,
    pub configs: Vec<Polyline>,
    pub anchor: Option<Point>,
}

struct View {
    lo: Point,
    hi: Point,
    scale: f64,
}

impl View {
    fn map(&self, p: Point) -> (f64, f64) {
        (MARGIN + (p.x - self.lo.x) * self.scale, MARGIN + (self.hi.y - p.y) * self.scale)
    }

    fn points(&self, pts: &[Point]) -> String {
        pts.iter()
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn render_svg(g: &DissectionGraph, layers: &Layers) -> String {
    let (lo, hi) = g.env().boundary().bbox();
    let span = (hi.x - lo.x).max(1e-9);
    let view = View { lo, hi, scale: (WIDTH - 2.0 * MARGIN) / span };
    let height = 2.0 * MARGIN + (hi.y - lo.y) * view.scale;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}">"#
    );
    if layers.cells {
        for c in g.cells() {
            let _ = writeln!(
                s,
                r##"<polygon class="cell" points="{}" fill="#eef3fb" stroke="#c5d1e6" stroke-width="0.5"/>"##,
                view.points(c.polygon.vertices())
            );
        }
    }
    if layers.environment {
        let env = g.env();
        let _ = writeln!(
            s,
            r##"<polygon class="boundary" points="{}" fill="none" stroke="#222" stroke-width="1.5"/>"##,
            view.points(env.boundary().vertices())
        );
        for o in env.obstacles() {
            let _ = writeln!(
                s,
                r##"<polygon class="obstacle" points="{}" fill="#777" stroke="#222" stroke-width="1"/>"##,
                view.points(o.vertices())
            );
        }
    }
    if layers.cutlines {
        for l in g.cutlines() {
            let (x1, y1) = view.map(l.segment.a);
            let (x2, y2) = view.map(l.segment.b);
            let _ = writeln!(
                s,
                r##"<line class="cutline" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="#6a7fa8" stroke-width="0.8" stroke-dasharray="4 3"/>"##
            );
        }
    }
    for (i, p) in layers.configs.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<polyline class="config" points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            view.points(p.waypoints()),
            PALETTE[i % PALETTE.len()]
        );
    }
    for p in &layers.paths {
        let _ = writeln!(
            s,
            r##"<polyline class="path" points="{}" fill="none" stroke="#000" stroke-width="2.5" stroke-linejoin="round"/>"##,
            view.points(p.waypoints())
        );
    }
    if let Some(a) = layers.anchor {
        let (cx, cy) = view.map(a);
        let star: Vec<String> = (0..10)
            .map(|k| {
                let r = if k % 2 == 0 { 9.0 } else { 4.0 };
                let t = std::f64::consts::PI * (k as f64 / 5.0 - 0.5);
                format!("{:.3},{:.3}", cx + r * t.cos(), cy + r * t.sin())
            })
            .collect();
        let _ = writeln!(
            s,
            r##"<polygon class="anchor" points="{}" fill="#f5c518" stroke="#222" stroke-width="0.8"/>"##,
            star.join(" ")
        );
    }
    s.push_str("</svg>\n");
    s
}
