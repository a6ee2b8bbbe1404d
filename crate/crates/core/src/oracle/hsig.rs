//! Homotopy invariant from signed crossings of one downward ray per
//! obstacle, reduced in the free group.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dissection::Environment;
use crate::geom::{point_in_polygon, Containment, Point, Polyline, SimplePolygon};

/// Letters are `±(i + 1)` for obstacle `i`; positive when crossing its ray
/// left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HSignature {
    pub word: Vec<i32>,
}

impl HSignature {
    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn push(&mut self, letter: i32) {
        if self.word.last() == Some(&-letter) {
            self.word.pop();
        } else {
            self.word.push(letter);
        }
    }

    pub fn extend(&mut self, letters: impl IntoIterator<Item = i32>) {
        for l in letters {
            self.push(l);
        }
    }
}

impl fmt::Display for HSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self
            .word
            .iter()
            .map(|&l| format!("h{}{}", l.abs() - 1, if l > 0 { "+" } else { "-" }))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A vertical ray going down from `(x, y)`.
#[derive(Clone, Copy, Debug)]
pub struct Ray {
    pub x: f64,
    pub y: f64,
}

fn interior_point(poly: &SimplePolygon) -> Point {
    let c = poly.centroid();
    if point_in_polygon(c, poly) == Containment::Inside {
        return c;
    }
    let v = poly.vertices();
    let n = v.len();
    (0..n)
        .map(|i| (v[(i + n - 1) % n] + v[i] + v[(i + 1) % n]) * (1.0 / 3.0))
        .find(|&p| point_in_polygon(p, poly) == Containment::Inside)
        .unwrap_or(c)
}

pub fn obstacle_rays(env: &Environment) -> Vec<Ray> {
    let xs: Vec<f64> = env.vertices().map(|v| v.x).collect();
    env.obstacles()
        .iter()
        .map(|o| {
            let p = interior_point(o);
            let mut x = p.x;
            while xs.iter().any(|&vx| (vx - x).abs() < 1e-9) {
                x += 1e-7;
            }
            Ray { x, y: p.y }
        })
        .collect()
}

/// Signed ray crossings of segment `p -> q`, in order along the segment.
pub fn crossings(rays: &[Ray], p: Point, q: Point) -> Vec<i32> {
    let mut hits: Vec<(f64, i32)> = Vec::new();
    for (i, r) in rays.iter().enumerate() {
        if (p.x < r.x) == (q.x < r.x) {
            continue;
        }
        let t = (r.x - p.x) / (q.x - p.x);
        let y = p.y + t * (q.y - p.y);
        if y < r.y {
            let letter = (i + 1) as i32;
            hits.push((t, if q.x > p.x { letter } else { -letter }));
        }
    }
    hits.sort_by(|a, b| a.0.total_cmp(&b.0));
    hits.into_iter().map(|h| h.1).collect()
}

pub fn h_signature(env: &Environment, p: &Polyline) -> HSignature {
    let rays = obstacle_rays(env);
    let mut h = HSignature::default();
    for s in p.segments() {
        h.extend(crossings(&rays, s.a, s.b));
    }
    h
}
