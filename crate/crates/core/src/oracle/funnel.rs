//! Exact shortest path through a chain of cells by the funnel algorithm.

use crate::dissection::DissectionGraph;
use crate::encoding::Encoding;
use crate::error::{Error, Result};
use crate::geom::{orient, Point, Polyline};

fn same(a: Point, b: Point) -> bool {
    a.approx_eq(b, 1e-12)
}

/// Shortest path from `e.start` to `e.end` crossing, in order, the cutlines
/// between consecutive cells of `e.seq`.
pub fn funnel_shortest(g: &DissectionGraph, e: &Encoding) -> Result<Polyline> {
    e.check(g)?;
    if !e.seq.is_rollback_free() {
        return Err(Error::InvalidEncoding(format!("sequence {} has a rollback", e.seq)));
    }
    // (right, left) for a traveller heading towards the goal.
    let mut portals = vec![(e.start, e.start)];
    for w in e.seq.cells().windows(2) {
        let l = g.cutline_between(w[0], w[1]).map_err(|x| Error::InvalidEncoding(x.to_string()))?;
        portals.push(l.portal_from(w[0]));
    }
    portals.push((e.end, e.end));
    Polyline::new(string_pull(&portals))
}

/// Simple stupid funnel over `(right, left)` portals.
pub fn string_pull(portals: &[(Point, Point)]) -> Vec<Point> {
    let n = portals.len();
    let mut path = vec![portals[0].0];
    let mut apex = portals[0].0;
    let (mut right, mut left) = portals[0];
    let (mut right_i, mut left_i) = (0usize, 0usize);
    let mut i = 1;
    while i < n {
        let (r, l) = portals[i];

        if orient(apex, right, r) >= 0.0 {
            if same(apex, right) || orient(apex, left, r) < 0.0 {
                right = r;
                right_i = i;
            } else {
                let apex_i = left_i;
                apex = left;
                path.push(apex);
                right = apex;
                left = apex;
                right_i = apex_i;
                left_i = apex_i;
                i = apex_i + 1;
                continue;
            }
        }

        if orient(apex, left, l) <= 0.0 {
            if same(apex, left) || orient(apex, right, l) > 0.0 {
                left = l;
                left_i = i;
            } else {
                let apex_i = right_i;
                apex = right;
                path.push(apex);
                right = apex;
                left = apex;
                right_i = apex_i;
                left_i = apex_i;
                i = apex_i + 1;
                continue;
            }
        }
        i += 1;
    }
    let end = portals[n - 1].0;
    if path.last().is_none_or(|&p| !same(p, end)) {
        path.push(end);
    }
    path
}
