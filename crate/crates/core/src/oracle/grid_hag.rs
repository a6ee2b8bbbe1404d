//! Homotopy-augmented grid graph: Dijkstra over (grid node, h-signature)
//! states enumerates the homotopy classes that reach a goal within a
//! length bound, each with a representative path.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use ordered_float::OrderedFloat;

use crate::dissection::{Environment, Region};
use crate::error::{Error, Result};
use crate::geom::{Point, Polyline};

use super::hsig::{crossings, obstacle_rays, HSignature, Ray};
use super::visibility::visible;

/// Relative length slack over the tether, covering the 8-connected metric.
pub const GRID_SLACK: f64 = 0.10;

#[derive(Clone, Debug)]
pub struct HagClass {
    pub signature: HSignature,
    /// Length of the grid representative.
    pub cost: f64,
    pub path: Polyline,
}

pub struct GridHag<'e> {
    env: &'e Environment,
    resolution: f64,
    origin: Point,
    nx: usize,
    ny: usize,
    free: Vec<bool>,
    adj: Vec<Vec<(usize, f64, Vec<i32>)>>,
    rays: Vec<Ray>,
}

pub fn default_resolution(env: &Environment) -> f64 {
    env.diameter() / 200.0
}

impl<'e> GridHag<'e> {
    pub fn new(env: &'e Environment, resolution: f64) -> Result<Self> {
        if !(resolution > 0.0) {
            return Err(Error::ResolutionTooCoarse(resolution));
        }
        let (lo, hi) = env.boundary().bbox();
        let nx = ((hi.x - lo.x) / resolution).floor() as usize;
        let ny = ((hi.y - lo.y) / resolution).floor() as usize;
        if nx < 2 || ny < 2 {
            return Err(Error::ResolutionTooCoarse(resolution));
        }
        let ox = lo.x + 0.5 * (hi.x - lo.x - (nx - 1) as f64 * resolution);
        let oy = lo.y + 0.5 * (hi.y - lo.y - (ny - 1) as f64 * resolution);
        let rays = obstacle_rays(env);
        let mut h = GridHag {
            env,
            resolution,
            origin: Point::new(ox, oy),
            nx,
            ny,
            free: Vec::new(),
            adj: vec![Vec::new(); nx * ny],
            rays,
        };
        h.free = (0..nx * ny).map(|i| env.region(h.center(i)) == Region::Free).collect();
        for i in 0..nx * ny {
            if !h.free[i] {
                continue;
            }
            let (x, y) = (i % nx, i / nx);
            for (dx, dy) in [(1i64, 0i64), (0, 1), (1, 1), (-1, 1)] {
                let (u, v) = (x as i64 + dx, y as i64 + dy);
                if u < 0 || v < 0 || u >= nx as i64 || v >= ny as i64 {
                    continue;
                }
                let j = v as usize * nx + u as usize;
                let (p, q) = (h.center(i), h.center(j));
                if h.free[j] && visible(env, p, q) {
                    let d = p.dist(q);
                    h.adj[i].push((j, d, crossings(&h.rays, p, q)));
                    h.adj[j].push((i, d, crossings(&h.rays, q, p)));
                }
            }
        }
        Ok(h)
    }

    fn center(&self, i: usize) -> Point {
        let (x, y) = (i % self.nx, i / self.nx);
        Point::new(
            self.origin.x + x as f64 * self.resolution,
            self.origin.y + y as f64 * self.resolution,
        )
    }

    // Nearest free node that sees `p`.
    fn snap(&self, p: Point) -> Result<usize> {
        let fx = ((p.x - self.origin.x) / self.resolution).round() as i64;
        let fy = ((p.y - self.origin.y) / self.resolution).round() as i64;
        let mut best: Option<(f64, usize)> = None;
        for y in fy - 3..=fy + 3 {
            for x in fx - 3..=fx + 3 {
                if x < 0 || y < 0 || x >= self.nx as i64 || y >= self.ny as i64 {
                    continue;
                }
                let i = y as usize * self.nx + x as usize;
                let d = p.dist(self.center(i));
                if self.free[i] && best.is_none_or(|b| d < b.0) && visible(self.env, p, self.center(i)) {
                    best = Some((d, i));
                }
            }
        }
        best.map(|b| b.1).ok_or(Error::ResolutionTooCoarse(self.resolution))
    }

    /// Every class of paths from `anchor` to `goal` whose best grid
    /// representative is at most `bound` long, ordered by signature.
    pub fn classes(&self, anchor: Point, goal: Point, bound: f64) -> Result<Vec<HagClass>> {
        for p in [anchor, goal] {
            if !self.env.is_free(p) {
                return Err(Error::PointInObstacle(p));
            }
        }
        let (s, t) = (self.snap(anchor)?, self.snap(goal)?);
        let mut ids: HashMap<(usize, HSignature), usize> = HashMap::new();
        let mut states: Vec<(usize, HSignature, f64, Option<usize>)> = Vec::new();
        let mut settled: Vec<bool> = Vec::new();
        let mut heap = BinaryHeap::new();

        let mut w0 = HSignature::default();
        w0.extend(crossings(&self.rays, anchor, self.center(s)));
        let d0 = anchor.dist(self.center(s));
        ids.insert((s, w0.clone()), 0);
        states.push((s, w0, d0, None));
        settled.push(false);
        heap.push(Reverse((OrderedFloat(d0), 0usize)));

        while let Some(Reverse((OrderedFloat(d), id))) = heap.pop() {
            if settled[id] || d > states[id].2 {
                continue;
            }
            settled[id] = true;
            let (u, w) = (states[id].0, states[id].1.clone());
            for (v, len, letters) in &self.adj[u] {
                let nd = d + len;
                if nd > bound {
                    continue;
                }
                let mut nw = w.clone();
                nw.extend(letters.iter().copied());
                let key = (*v, nw);
                match ids.get(&key) {
                    Some(&k) if settled[k] || states[k].2 <= nd => {}
                    Some(&k) => {
                        states[k].2 = nd;
                        states[k].3 = Some(id);
                        heap.push(Reverse((OrderedFloat(nd), k)));
                    }
                    None => {
                        let k = states.len();
                        states.push((key.0, key.1.clone(), nd, Some(id)));
                        settled.push(false);
                        ids.insert(key, k);
                        heap.push(Reverse((OrderedFloat(nd), k)));
                    }
                }
            }
        }

        let tail = crossings(&self.rays, self.center(t), goal);
        let last = self.center(t).dist(goal);
        let mut best: BTreeMap<HSignature, (f64, usize)> = BTreeMap::new();
        for (id, st) in states.iter().enumerate() {
            if st.0 != t || !settled[id] {
                continue;
            }
            let mut w = st.1.clone();
            w.extend(tail.iter().copied());
            let c = st.2 + last;
            if c <= bound && best.get(&w).is_none_or(|b| c < b.0) {
                best.insert(w, (c, id));
            }
        }
        best.into_iter()
            .map(|(signature, (cost, id))| {
                let mut pts = vec![goal];
                let mut k = Some(id);
                while let Some(i) = k {
                    pts.push(self.center(states[i].0));
                    k = states[i].3;
                }
                pts.push(anchor);
                pts.reverse();
                Ok(HagClass { signature, cost, path: Polyline::new(pts)? })
            })
            .collect()
    }
}

/// Classes reaching `goal` from `anchor` with a grid path no longer than
/// `zeta` plus the grid slack. Callers re-tighten representatives before
/// comparing with `zeta`.
pub fn grid_hag_configs(
    env: &Environment,
    anchor: Point,
    zeta: f64,
    goal: Point,
    resolution: f64,
) -> Result<Vec<HagClass>> {
    let h = GridHag::new(env, resolution)?;
    h.classes(anchor, goal, zeta * (1.0 + GRID_SLACK) + 4.0 * resolution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps;

    #[test]
    fn obstacle_free_has_one_class() {
        let env = maps::square(2.0, 1.0);
        let r = default_resolution(&env);
        let cs = grid_hag_configs(&env, Point::new(0.2, 0.2), 3.0, Point::new(1.8, 0.8), r).unwrap();
        assert_eq!(cs.len(), 1);
        assert!(cs[0].signature.is_empty());
    }

    #[test]
    fn ring_far_goal() {
        let env = maps::ring();
        let r = default_resolution(&env);
        let (a, b) = (Point::new(0.5, 1.5), Point::new(2.5, 1.5));
        let cs = grid_hag_configs(&env, a, 4.0, b, r).unwrap();
        assert_eq!(cs.len(), 2, "{:?}", cs.iter().map(|c| c.signature.to_string()).collect::<Vec<_>>());
        assert!(matches!(GridHag::new(&env, 5.0), Err(Error::ResolutionTooCoarse(_))));
    }
}
