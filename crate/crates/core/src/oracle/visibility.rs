//! Global Euclidean shortest paths by Dijkstra over the visibility graph.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use ordered_float::OrderedFloat;

use crate::dissection::Environment;
use crate::error::{Error, Result};
use crate::geom::{Point, Polyline, Segment, EPS_PT};

/// Whether the closed segment `p -> q` stays in closed free space.
pub fn visible(env: &Environment, p: Point, q: Point) -> bool {
    let s = Segment::new(p, q);
    let len = s.length();
    if len <= EPS_PT {
        return env.is_free(p);
    }
    let mut ts = vec![0.0, 1.0];
    for e in env.edges() {
        if let Some((t, u)) = s.line_intersection(&e) {
            if (-1e-12..=1.0 + 1e-12).contains(&u) && t > 0.0 && t < 1.0 {
                ts.push(t);
            }
        }
        for v in [e.a, e.b] {
            let t = s.project(v);
            if t > 0.0 && t < 1.0 && s.at(t).dist(v) <= EPS_PT {
                ts.push(t);
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.windows(2)
        .filter(|w| (w[1] - w[0]) * len > 1e-12)
        .all(|w| env.is_free(s.at(0.5 * (w[0] + w[1]))))
}

/// Visibility among the environment's vertices, reusable across queries.
pub struct VisibilityGraph<'e> {
    env: &'e Environment,
    nodes: Vec<Point>,
    adj: Vec<Vec<(usize, f64)>>,
}

impl<'e> VisibilityGraph<'e> {
    pub fn new(env: &'e Environment) -> Self {
        let nodes: Vec<Point> = env.vertices().collect();
        let n = nodes.len();
        let mut adj = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                if visible(env, nodes[i], nodes[j]) {
                    let d = nodes[i].dist(nodes[j]);
                    adj[i].push((j, d));
                    adj[j].push((i, d));
                }
            }
        }
        VisibilityGraph { env, nodes, adj }
    }

    pub fn shortest(&self, a: Point, b: Point) -> Result<Polyline> {
        for p in [a, b] {
            if !self.env.is_free(p) {
                return Err(Error::NoPath);
            }
        }
        if a.approx_eq(b, EPS_PT) {
            return Ok(Polyline::constant(a));
        }
        if visible(self.env, a, b) {
            return Polyline::new(vec![a, b]);
        }
        let n = self.nodes.len();
        // Node n is `a`, node n + 1 is `b`.
        let from_a: Vec<(usize, f64)> = (0..n)
            .filter(|&i| visible(self.env, a, self.nodes[i]))
            .map(|i| (i, a.dist(self.nodes[i])))
            .collect();
        let to_b: Vec<Option<f64>> = (0..n)
            .map(|i| visible(self.env, self.nodes[i], b).then(|| self.nodes[i].dist(b)))
            .collect();
        let mut dist = vec![f64::INFINITY; n + 2];
        let mut prev = vec![usize::MAX; n + 2];
        let mut heap = BinaryHeap::new();
        dist[n] = 0.0;
        heap.push(Reverse((OrderedFloat(0.0), n)));
        while let Some(Reverse((OrderedFloat(d), u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            if u == n + 1 {
                break;
            }
            let mut relax = |v: usize, w: f64, heap: &mut BinaryHeap<_>| {
                if d + w < dist[v] {
                    dist[v] = d + w;
                    prev[v] = u;
                    heap.push(Reverse((OrderedFloat(d + w), v)));
                }
            };
            if u == n {
                for &(v, w) in &from_a {
                    relax(v, w, &mut heap);
                }
            } else {
                for &(v, w) in &self.adj[u] {
                    relax(v, w, &mut heap);
                }
                if let Some(w) = to_b[u] {
                    relax(n + 1, w, &mut heap);
                }
            }
        }
        if !dist[n + 1].is_finite() {
            return Err(Error::NoPath);
        }
        let mut pts = vec![b];
        let mut k = prev[n + 1];
        while k != n {
            pts.push(self.nodes[k]);
            k = prev[k];
        }
        pts.push(a);
        pts.reverse();
        Polyline::new(pts)
    }
}

pub fn visibility_shortest(env: &Environment, a: Point, b: Point) -> Result<Polyline> {
    VisibilityGraph::new(env).shortest(a, b)
}
