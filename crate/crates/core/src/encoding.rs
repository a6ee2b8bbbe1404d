//! Cell sequences, rollback-free reduction, the path encoder and its
//! inverse (the optimal path of an encoded homotopy class).

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dissection::DissectionGraph;
use crate::error::{Error, Result};
use crate::geom::{Point, Polyline, Segment, EPS_PT};
use crate::taut;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CellId(pub usize);

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Ordered list of cell ids, compared lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<CellId>", into = "Vec<CellId>")]
pub struct NodeSeq(Vec<CellId>);

impl TryFrom<Vec<CellId>> for NodeSeq {
    type Error = Error;
    fn try_from(v: Vec<CellId>) -> Result<Self> {
        NodeSeq::new(v)
    }
}

impl From<NodeSeq> for Vec<CellId> {
    fn from(s: NodeSeq) -> Self {
        s.0
    }
}

impl fmt::Display for NodeSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl NodeSeq {
    pub fn new(cells: Vec<CellId>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidEncoding("empty cell sequence".into()));
        }
        Ok(NodeSeq(cells))
    }

    pub fn single(c: CellId) -> Self {
        NodeSeq(vec![c])
    }

    pub fn from_ids(ids: &[usize]) -> Self {
        NodeSeq::new(ids.iter().map(|&i| CellId(i)).collect()).expect("non-empty id list")
    }

    pub fn cells(&self) -> &[CellId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> CellId {
        self.0[0]
    }

    pub fn last(&self) -> CellId {
        *self.0.last().unwrap()
    }

    /// Second-to-last cell, if any.
    pub fn penultimate(&self) -> Option<CellId> {
        self.0.len().checked_sub(2).map(|i| self.0[i])
    }

    pub fn extended(&self, c: CellId) -> NodeSeq {
        let mut v = self.0.clone();
        v.push(c);
        NodeSeq(v)
    }

    pub fn reversed(&self) -> NodeSeq {
        let mut v = self.0.clone();
        v.reverse();
        NodeSeq(v)
    }

    pub fn contains(&self, c: CellId) -> bool {
        self.0.contains(&c)
    }

    pub fn is_rollback_free(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1]) && self.0.windows(3).all(|w| w[0] != w[2])
    }

    pub fn has_repeats(&self) -> bool {
        let mut v = self.0.clone();
        v.sort();
        v.windows(2).any(|w| w[0] == w[1])
    }

    /// Consecutive entries adjacent in `g`.
    pub fn check(&self, g: &DissectionGraph) -> Result<()> {
        for &c in &self.0 {
            g.check_cell(c)?;
        }
        for w in self.0.windows(2) {
            if !g.are_adjacent(w[0], w[1]) {
                return Err(Error::NotAdjacent(w[0], w[1]));
            }
        }
        Ok(())
    }
}

/// Removes every rollback `x, y, x -> x` (and consecutive repeats) until
/// none remain. Stack reduction gives the unique normal form.
pub fn rbf(s: &NodeSeq) -> NodeSeq {
    let mut out: Vec<CellId> = Vec::with_capacity(s.len());
    for &c in s.cells() {
        if out.last() == Some(&c) {
            continue;
        }
        if out.len() >= 2 && out[out.len() - 2] == c {
            out.pop();
            continue;
        }
        out.push(c);
    }
    NodeSeq(out)
}

pub fn seq_product(s1: &NodeSeq, s2: &NodeSeq) -> Result<NodeSeq> {
    if s1.last() != s2.first() {
        return Err(Error::JunctionMismatch { last: s1.last(), first: s2.first() });
    }
    let mut v = s1.0.clone();
    v.extend_from_slice(&s2.0[1..]);
    Ok(NodeSeq(v))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Encoding {
    pub start: Point,
    pub seq: NodeSeq,
    pub end: Point,
}

impl Encoding {
    pub fn new(start: Point, seq: NodeSeq, end: Point) -> Self {
        Encoding { start, seq, end }
    }

    pub fn reversed(&self) -> Encoding {
        Encoding { start: self.end, seq: self.seq.reversed(), end: self.start }
    }

    pub fn check(&self, g: &DissectionGraph) -> Result<()> {
        self.seq.check(g).map_err(|e| Error::InvalidEncoding(e.to_string()))?;
        if !g.cell_contains(self.seq.first(), self.start) {
            return Err(Error::InvalidEncoding(format!(
                "start {} is not in cell {}",
                self.start,
                self.seq.first()
            )));
        }
        if !g.cell_contains(self.seq.last(), self.end) {
            return Err(Error::InvalidEncoding(format!(
                "end {} is not in cell {}",
                self.end,
                self.seq.last()
            )));
        }
        Ok(())
    }
}

/// `⟨e1.start, rbf(e1.seq * e2.seq), e2.end⟩`. When the junction cells
/// differ, the cells around the junction point are inserted as a bridge.
pub fn encoding_product(g: &DissectionGraph, e1: &Encoding, e2: &Encoding) -> Result<Encoding> {
    if !e1.end.approx_eq(e2.start, EPS_PT) {
        return Err(Error::EndpointMismatch { end: e1.end, start: e2.start });
    }
    let (l, f) = (e1.seq.last(), e2.seq.first());
    let joined = if l == f {
        seq_product(&e1.seq, &e2.seq)?
    } else {
        let bridge = fan_bridge(g, l, f, &[e1.end], bridge_tol(g))
            .ok_or(Error::JunctionMismatch { last: l, first: f })?;
        let mut v = e1.seq.0.clone();
        v.extend_from_slice(&bridge[1..]);
        v.extend_from_slice(&e2.seq.0[1..]);
        NodeSeq(v)
    };
    Ok(Encoding { start: e1.start, seq: rbf(&joined), end: e2.end })
}

// Shortest cell walk from `from` to `to` through cells within `tol` of one
// of the `pivots`, inclusive of both ends.
fn fan_bridge(
    g: &DissectionGraph,
    from: CellId,
    to: CellId,
    pivots: &[Point],
    tol: f64,
) -> Option<Vec<CellId>> {
    let near = |c: CellId, p: Point| {
        g.cell_contains(c, p)
            || g.cells()[c.0].polygon.edges().any(|e| e.distance_to(p) <= tol)
    };
    let allowed = |c: CellId| c == to || pivots.iter().any(|&p| near(c, p));
    let mut prev = vec![usize::MAX; g.cell_count()];
    let mut queue = VecDeque::from([from]);
    prev[from.0] = from.0;
    while let Some(c) = queue.pop_front() {
        if c == to {
            let mut path = vec![to];
            let mut k = to;
            while k != from {
                k = CellId(prev[k.0]);
                path.push(k);
            }
            path.reverse();
            return Some(path);
        }
        for &(n, _) in g.neighbor_links(c) {
            if prev[n.0] == usize::MAX && allowed(n) {
                prev[n.0] = c.0;
                queue.push_back(n);
            }
        }
    }
    None
}

fn bridge_tol(g: &DissectionGraph) -> f64 {
    1e-8 * g.diameter().max(1.0)
}

/// Convex-cell parameter interval `[t_in, t_out]` of `s` inside `poly`
/// (CCW), or `None` when disjoint.
fn clip_to_cell(s: &Segment, poly: &[Point]) -> Option<(f64, f64)> {
    let d = s.direction();
    let len = d.norm();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let n = poly.len();
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        let e = q - p;
        let el = e.norm();
        let nrm = Point::new(-e.y / el, e.x / el);
        let base = nrm.dot(s.a - p) + EPS_PT;
        let rate = nrm.dot(d);
        if rate.abs() <= 1e-15 * len.max(1.0) {
            if base < 0.0 {
                return None;
            }
            continue;
        }
        let t = -base / rate;
        if rate > 0.0 {
            lo = lo.max(t);
        } else {
            hi = hi.min(t);
        }
        if lo > hi {
            return None;
        }
    }
    Some((lo, hi))
}

/// Raw cell sequence traversed by `p`, consecutive repeats merged.
pub fn gamma(g: &DissectionGraph, p: &Polyline) -> Result<(Point, NodeSeq, Point)> {
    for &w in p.waypoints() {
        g.env().check_free(w).map_err(|_| Error::PathLeavesFreeSpace(w))?;
    }
    if p.is_constant() {
        let c = g.locate(p.first())?;
        return Ok((p.first(), NodeSeq::single(c), p.last()));
    }
    // Definitely-classified pieces as (cell, entry, exit); each also carries
    // the points of the ambiguous stretch skipped just before it.
    let mut pieces: Vec<(CellId, Point, Point, Vec<Point>)> = Vec::new();
    let mut skipped: Vec<Point> = Vec::new();
    for s in p.segments() {
        let len = s.length();
        let mut ts = vec![0.0, 1.0];
        let mut clipped = Vec::new();
        for c in g.cells() {
            if let Some((lo, hi)) = clip_to_cell(&s, c.polygon.vertices()) {
                ts.push(lo);
                ts.push(hi);
                clipped.push((c.id, lo, hi));
            }
        }
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|b, a| (*b - *a) * len <= 1e-12);
        for w in ts.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            if (t1 - t0) * len <= 1e-12 {
                continue;
            }
            let tm = 0.5 * (t0 + t1);
            let m = s.at(tm);
            let mut holders = clipped
                .iter()
                .filter(|&&(_, lo, hi)| lo <= tm && tm <= hi)
                .map(|&(c, _, _)| c)
                .filter(|&c| g.cell_contains(c, m));
            match (holders.next(), holders.next()) {
                (None, _) => return Err(Error::PathLeavesFreeSpace(m)),
                (Some(c), None) => {
                    pieces.push((c, s.at(t0), s.at(t1), std::mem::take(&mut skipped)))
                }
                // Runs along a shared edge: no crossing.
                (Some(_), Some(_)) => skipped.extend([s.at(t0), m, s.at(t1)]),
            }
        }
    }
    let mut seq: Vec<CellId> = Vec::new();
    let mut last_exit = p.first();
    if pieces.is_empty() {
        seq.push(g.locate(p.first())?);
    }
    // Paths that start or end along a shared edge have no definite piece
    // there; bridge through the cells around the endpoint instead.
    let shortest_bridge = |ends: &mut dyn Iterator<Item = (CellId, CellId)>, pivots: &[Point]| {
        ends.filter_map(|(a, b)| fan_bridge(g, a, b, pivots, bridge_tol(g))).min_by_key(|b| b.len())
    };
    for (c, entry, exit, gap) in pieces {
        match seq.last() {
            None if g.cell_contains(c, p.first()) => seq.push(c),
            None => {
                let mut pivots = vec![p.first(), entry];
                pivots.extend(gap);
                let bridge = shortest_bridge(&mut g.cells_containing(p.first()).map(|s| (s, c)), &pivots)
                    .ok_or(Error::PathLeavesFreeSpace(p.first()))?;
                seq.extend(bridge);
            }
            Some(&l) if l == c => {}
            Some(&l) if g.are_adjacent(l, c) => seq.push(c),
            Some(&l) => {
                let mut pivots = vec![last_exit, entry];
                pivots.extend(gap);
                let bridge = fan_bridge(g, l, c, &pivots, bridge_tol(g))
                    .ok_or(Error::PathLeavesFreeSpace(entry))?;
                seq.extend_from_slice(&bridge[1..]);
            }
        }
        last_exit = exit;
    }
    let l = *seq.last().expect("nonempty");
    if !g.cell_contains(l, p.last()) {
        let mut pivots = vec![last_exit, p.last()];
        pivots.extend(skipped);
        let bridge = shortest_bridge(&mut g.cells_containing(p.last()).map(|e| (l, e)), &pivots)
            .ok_or(Error::PathLeavesFreeSpace(p.last()))?;
        seq.extend_from_slice(&bridge[1..]);
    }
    Ok((p.first(), NodeSeq(seq), p.last()))
}

pub fn gamma_star(g: &DissectionGraph, p: &Polyline) -> Result<Encoding> {
    let (s, seq, e) = gamma(g, p)?;
    Ok(Encoding { start: s, seq: rbf(&seq), end: e })
}

/// Cutline segments crossed by `seq`, oriented as portals.
pub(crate) fn portals(g: &DissectionGraph, seq: &NodeSeq) -> Vec<Segment> {
    seq.cells()
        .windows(2)
        .map(|w| {
            let l = g.cutline_between(w[0], w[1]).expect("adjacent cells");
            let (r, lft) = l.portal_from(w[0]);
            Segment::new(r, lft)
        })
        .collect()
}

pub(crate) fn convergence_delta(g: &DissectionGraph) -> f64 {
    1e-9 * g.diameter()
}

/// Shortest path in the homotopy class of `e`.
pub fn optimal_homotopic_path(g: &DissectionGraph, e: &Encoding) -> Result<Polyline> {
    e.check(g)?;
    if !e.seq.is_rollback_free() {
        return Err(Error::InvalidEncoding(format!("sequence {} has a rollback", e.seq)));
    }
    let ps = portals(g, &e.seq);
    let (lo, hi) = trim_touching(&ps, e.start, e.end);
    let ps = &ps[lo..hi];
    let r = taut::solve(e.start, ps, e.end, None, convergence_delta(g));
    Polyline::new(r.waypoints(e.start, ps, e.end))
}

// Portals at the ends that already contain the endpoint add nothing.
pub(crate) fn trim_touching(ps: &[Segment], a: Point, b: Point) -> (usize, usize) {
    let mut lo = 0;
    while lo < ps.len() && ps[lo].contains_point(a, EPS_PT) {
        lo += 1;
    }
    let mut hi = ps.len();
    while hi > lo && ps[hi - 1].contains_point(b, EPS_PT) {
        hi -= 1;
    }
    (lo, hi)
}

/// Taut version of `p` in its own homotopy class.
pub fn theta(g: &DissectionGraph, p: &Polyline) -> Result<Polyline> {
    optimal_homotopic_path(g, &gamma_star(g, p)?)
}
