//! Planar primitives: points, segments, simple polygons and polylines.
//!
//! Everything here is an immutable value over `f64`. Coincidence is decided
//! with [`EPS_PT`] in map units.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Point coincidence tolerance in map units.
pub const EPS_PT: f64 = 1e-9;

/// Tolerance on normalized cross products for collinearity tests.
pub const EPS_COL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Point { x: v[0], y: v[1] }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn approx_eq(self, o: Point, eps: f64) -> bool {
        self.dist(o) <= eps
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        Point::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Signed doubled area of triangle `(a, b, c)`; positive when counter-clockwise.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

/// Straight segment `a(1-t) + bt`, `t` in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub const fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    pub fn at(&self, t: f64) -> Point {
        self.a.lerp(self.b, t)
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn direction(&self) -> Point {
        self.b - self.a
    }

    pub fn midpoint(&self) -> Point {
        self.at(0.5)
    }

    pub fn reversed(&self) -> Segment {
        Segment::new(self.b, self.a)
    }

    /// Parameter of the orthogonal projection of `q` onto the supporting line.
    pub fn project(&self, q: Point) -> f64 {
        let d = self.direction();
        let len2 = d.dot(d);
        if len2 == 0.0 {
            0.0
        } else {
            (q - self.a).dot(d) / len2
        }
    }

    pub fn distance_to(&self, q: Point) -> f64 {
        let t = self.project(q).clamp(0.0, 1.0);
        self.at(t).dist(q)
    }

    pub fn contains_point(&self, q: Point, eps: f64) -> bool {
        self.distance_to(q) <= eps
    }

    /// Parameters `(s, t)` where `self.at(s) == other.at(t)` for properly
    /// non-parallel supporting lines.
    pub fn line_intersection(&self, other: &Segment) -> Option<(f64, f64)> {
        let d1 = self.direction();
        let d2 = other.direction();
        let den = d1.cross(d2);
        let scale = d1.norm() * d2.norm();
        if scale == 0.0 || den.abs() <= 1e-14 * scale {
            return None;
        }
        let w = other.a - self.a;
        Some((w.cross(d2) / den, w.cross(d1) / den))
    }
}

/// Point classification against a polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Boundary,
    Outside,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplePolygon {
    vertices: Vec<Point>,
}

impl SimplePolygon {
    /// Validates and wraps a vertex ring. Orientation is left as given.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidPolygon(format!("non-finite vertex {p}")));
        }
        let n = vertices.len();
        for i in 0..n {
            if vertices[i].approx_eq(vertices[(i + 1) % n], EPS_PT) {
                return Err(Error::InvalidPolygon(format!(
                    "duplicate consecutive vertex {}",
                    vertices[i]
                )));
            }
        }
        let poly = SimplePolygon { vertices };
        if poly.area() <= EPS_PT * EPS_PT {
            return Err(Error::InvalidPolygon("polygon has zero area".into()));
        }
        if let Some((i, j)) = poly.first_self_intersection() {
            return Err(Error::InvalidPolygon(format!(
                "edges {i} and {j} intersect"
            )));
        }
        Ok(poly)
    }

    pub(crate) fn from_vertices_unchecked(vertices: Vec<Point>) -> Self {
        SimplePolygon { vertices }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge(&self, i: usize) -> Segment {
        let n = self.vertices.len();
        Segment::new(self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        (0..self.vertices.len()).map(move |i| self.edge(i))
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        let mut s = 0.0;
        for i in 0..n {
            s += self.vertices[i].cross(self.vertices[(i + 1) % n]);
        }
        0.5 * s
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn is_ccw(&self) -> bool {
        self.signed_area() > 0.0
    }

    pub fn with_orientation(mut self, ccw: bool) -> Self {
        if self.is_ccw() != ccw {
            self.vertices.reverse();
        }
        self
    }

    pub fn centroid(&self) -> Point {
        let n = self.vertices.len();
        let (mut cx, mut cy, mut a) = (0.0, 0.0, 0.0);
        let o = self.vertices[0];
        for i in 0..n {
            let p = self.vertices[i] - o;
            let q = self.vertices[(i + 1) % n] - o;
            let w = p.cross(q);
            a += w;
            cx += (p.x + q.x) * w;
            cy += (p.y + q.y) * w;
        }
        if a.abs() < 1e-300 {
            let s = self.vertices.iter().fold(Point::default(), |acc, &p| acc + p);
            return s * (1.0 / n as f64);
        }
        Point::new(o.x + cx / (3.0 * a), o.y + cy / (3.0 * a))
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    /// Convexity up to [`EPS_COL`] on normalized cross products; orientation
    /// independent.
    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        let sign = self.signed_area().signum();
        (0..n).all(|i| {
            let a = self.vertices[(i + n - 1) % n];
            let b = self.vertices[i];
            let c = self.vertices[(i + 1) % n];
            let e1 = b - a;
            let e2 = c - b;
            sign * e1.cross(e2) >= -EPS_COL * e1.norm() * e2.norm()
        })
    }

    fn first_self_intersection(&self) -> Option<(usize, usize)> {
        let n = self.vertices.len();
        for i in 0..n {
            let e1 = self.edge(i);
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let e2 = self.edge(j);
                if adjacent {
                    // Adjacent edges may only share their common vertex.
                    let shared = if j == i + 1 { e1.b } else { e1.a };
                    let other1 = if j == i + 1 { e1.a } else { e1.b };
                    let other2 = if j == i + 1 { e2.b } else { e2.a };
                    if orient(other1, shared, other2).abs()
                        <= EPS_COL * (shared - other1).norm() * (other2 - shared).norm()
                        && (other1 - shared).dot(other2 - shared) > 0.0
                    {
                        return Some((i, j));
                    }
                    continue;
                }
                if segments_touch(&e1, &e2, EPS_PT) {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

/// Whether two closed segments share at least one point (within `eps`).
pub fn segments_touch(s1: &Segment, s2: &Segment, eps: f64) -> bool {
    let d1 = orient(s2.a, s2.b, s1.a);
    let d2 = orient(s2.a, s2.b, s1.b);
    let d3 = orient(s1.a, s1.b, s2.a);
    let d4 = orient(s1.a, s1.b, s2.b);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    s2.distance_to(s1.a) <= eps
        || s2.distance_to(s1.b) <= eps
        || s1.distance_to(s2.a) <= eps
        || s1.distance_to(s2.b) <= eps
}

/// Classifies `q` against `poly`, reporting `Boundary` within [`EPS_PT`].
pub fn point_in_polygon(q: Point, poly: &SimplePolygon) -> Containment {
    if poly.edges().any(|e| e.distance_to(q) <= EPS_PT) {
        return Containment::Boundary;
    }
    let vs = poly.vertices();
    let n = vs.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (pi, pj) = (vs[i], vs[j]);
        if (pi.y > q.y) != (pj.y > q.y) {
            let x = pj.x + (q.y - pj.y) * (pi.x - pj.x) / (pi.y - pj.y);
            if q.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    if inside {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

/// Piecewise-linear path. Consecutive duplicate waypoints are merged on
/// construction; collinear interior waypoints are kept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct Polyline {
    waypoints: Vec<Point>,
}

impl TryFrom<Vec<Point>> for Polyline {
    type Error = Error;
    fn try_from(v: Vec<Point>) -> Result<Self> {
        Polyline::new(v)
    }
}

impl From<Polyline> for Vec<Point> {
    fn from(p: Polyline) -> Self {
        p.waypoints
    }
}

impl Polyline {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidPolyline("polyline needs at least one waypoint".into()));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidPolyline(format!("non-finite waypoint {p}")));
        }
        let mut waypoints: Vec<Point> = Vec::with_capacity(points.len());
        for p in points {
            if waypoints.last().is_some_and(|l| l.approx_eq(p, EPS_PT)) {
                continue;
            }
            waypoints.push(p);
        }
        Ok(Polyline { waypoints })
    }

    /// The constant path at `p`.
    pub fn constant(p: Point) -> Self {
        Polyline { waypoints: vec![p] }
    }

    pub fn waypoints(&self) -> &[Point] {
        &self.waypoints
    }

    pub fn first(&self) -> Point {
        self.waypoints[0]
    }

    pub fn last(&self) -> Point {
        *self.waypoints.last().expect("non-empty polyline")
    }

    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.waypoints.len() == 1
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.waypoints.windows(2).map(|w| Segment::new(w[0], w[1]))
    }

    /// Point at arc-length fraction `frac` in `[0, 1]`.
    pub fn point_at_fraction(&self, frac: f64) -> Point {
        self.prefix(frac).last()
    }

    /// Sub-path from the start to arc-length fraction `frac`.
    pub fn prefix(&self, frac: f64) -> Polyline {
        let total = cost(self);
        if self.waypoints.len() == 1 || total == 0.0 {
            return Polyline::constant(self.first());
        }
        let target = frac.clamp(0.0, 1.0) * total;
        let mut out = vec![self.first()];
        let mut acc = 0.0;
        for s in self.segments() {
            let len = s.length();
            if acc + len >= target {
                let t = if len > 0.0 { (target - acc) / len } else { 0.0 };
                out.push(s.at(t.clamp(0.0, 1.0)));
                return Polyline::new(out).expect("finite prefix");
            }
            acc += len;
            out.push(s.b);
        }
        Polyline::new(out).expect("finite prefix")
    }
}

/// Sum of Euclidean segment lengths.
pub fn cost(p: &Polyline) -> f64 {
    p.segments().map(|s| s.length()).sum()
}

/// Product of paths; the junction waypoint is merged.
pub fn concat(p1: &Polyline, p2: &Polyline) -> Result<Polyline> {
    let (end, start) = (p1.last(), p2.first());
    if !end.approx_eq(start, EPS_PT) {
        return Err(Error::EndpointMismatch { end, start });
    }
    let mut w = p1.waypoints.clone();
    w.extend_from_slice(&p2.waypoints[1..]);
    Polyline::new(w)
}

pub fn reverse(p: &Polyline) -> Polyline {
    let mut w = p.waypoints.clone();
    w.reverse();
    Polyline { waypoints: w }
}

/// Minimizer of `|a - x| + |x - b|` over `x` on `s`.
///
/// On the supporting line the minimizer divides the projections of `a` and
/// `b` in proportion to their distances from the line (the crossing of
/// `a'b` with `a'` mirrored, or of `ab` itself when they straddle it). The
/// objective is convex in `t`, so clamping to `[0, 1]` stays optimal.
pub fn min_via_point(a: Point, b: Point, s: &Segment) -> (f64, Point) {
    let d = s.direction();
    let len = d.norm();
    if len == 0.0 {
        return (0.0, s.a);
    }
    let ta = s.project(a);
    let tb = s.project(b);
    let ha = (d.cross(a - s.a) / len).abs();
    let hb = (d.cross(b - s.a) / len).abs();
    let h = ha + hb;
    let t = if h <= 1e-15 * (1.0 + len) {
        // Both on the line: any t between the projections is optimal.
        0.5 * (ta + tb)
    } else {
        (ta * hb + tb * ha) / h
    };
    let t = t.clamp(0.0, 1.0);
    (t, s.at(t))
}
