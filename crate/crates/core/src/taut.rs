//! Shortest path from `a` to `b` that visits one point on each of a chain
//! of segments, by coordinate descent over the segment parameters.

use crate::geom::{min_via_point, Point, Segment, EPS_PT};

const MAX_SWEEPS: usize = 10_000;

#[derive(Clone, Debug)]
pub(crate) struct Taut {
    pub ts: Vec<f64>,
    pub cost: f64,
}

impl Taut {
    pub fn waypoints(&self, a: Point, portals: &[Segment], b: Point) -> Vec<Point> {
        let mut w = Vec::with_capacity(portals.len() + 2);
        w.push(a);
        w.extend(portals.iter().zip(&self.ts).map(|(s, &t)| s.at(t)));
        w.push(b);
        w
    }
}

fn path_cost(a: Point, portals: &[Segment], ts: &[f64], b: Point) -> f64 {
    let mut prev = a;
    let mut c = 0.0;
    for (s, &t) in portals.iter().zip(ts) {
        let x = s.at(t);
        c += prev.dist(x);
        prev = x;
    }
    c + prev.dist(b)
}

/// Segments are portals oriented `(right, left)` for a traveller going from
/// `a` to `b`. `delta` is the absolute improvement below which a sweep
/// counts as converged.
pub(crate) fn solve(a: Point, portals: &[Segment], b: Point, warm: Option<&[f64]>, delta: f64) -> Taut {
    let n = portals.len();
    let mut ts: Vec<f64> = match warm {
        Some(w) if w.len() == n => w.iter().map(|t| t.clamp(0.0, 1.0)).collect(),
        _ => vec![0.5; n],
    };
    if n == 0 {
        return Taut { ts, cost: a.dist(b) };
    }
    let mut cost = path_cost(a, portals, &ts, b);
    let mut forward = true;
    let mut sweeps = 0;
    loop {
        while sweeps < MAX_SWEEPS {
            sweeps += 1;
            sweep(a, portals, b, &mut ts, forward);
            forward = !forward;
            let c = path_cost(a, portals, &ts, b);
            let improvement = cost - c;
            cost = c;
            if improvement < delta {
                break;
            }
        }
        if sweeps >= MAX_SWEEPS || !escape_clusters(a, portals, b, &mut ts, &mut cost) {
            break;
        }
    }
    polish(a, portals, b, &mut ts, &mut cost, 1e5 * delta.max(1e-12));
    Taut { ts, cost }
}

fn sweep(a: Point, portals: &[Segment], b: Point, ts: &mut [f64], forward: bool) {
    let n = portals.len();
    let point = |ts: &[f64], k: usize| portals[k].at(ts[k]);
    for step in 0..n {
        let k = if forward { step } else { n - 1 - step };
        let prev = if k == 0 { a } else { point(ts, k - 1) };
        let next = if k + 1 == n { b } else { point(ts, k + 1) };
        ts[k] = min_via_point(prev, next, &portals[k]).0;
    }
}

// Runs of coincident consecutive points stall single-coordinate moves,
// since no one point can leave the shared vertex alone. Move each run onto
// the chord between its neighbours and keep it if that helps.
fn escape_clusters(a: Point, portals: &[Segment], b: Point, ts: &mut [f64], cost: &mut f64) -> bool {
    let n = portals.len();
    let z = |ts: &[f64], i: usize| -> Point {
        if i == 0 {
            a
        } else if i == n + 1 {
            b
        } else {
            portals[i - 1].at(ts[i - 1])
        }
    };
    let mut improved = false;
    let mut i = 0;
    while i <= n {
        let mut j = i;
        while j < n + 1 && z(ts, j).approx_eq(z(ts, j + 1), EPS_PT) {
            j += 1;
        }
        if j == i {
            i += 1;
            continue;
        }
        let p = if i == 0 { a } else { z(ts, i - 1) };
        let q = if j == n + 1 { b } else { z(ts, j + 1) };
        let lo = i.max(1);
        let hi = j.min(n);
        let mut trial = ts.to_vec();
        let chord = Segment::new(p, q);
        for k in lo..=hi {
            let s = &portals[k - 1];
            trial[k - 1] = match s.line_intersection(&chord) {
                Some((t, _)) => t.clamp(0.0, 1.0),
                None => min_via_point(p, q, s).0,
            };
        }
        let c = path_cost(a, portals, &trial, b);
        if c < *cost - 1e-15 * (1.0 + *cost) {
            ts.copy_from_slice(&trial);
            *cost = c;
            improved = true;
        }
        i = j + 1;
    }
    improved
}

// Between bends the optimum is straight, and bends only happen at segment
// endpoints, turning towards the obstacle side: right at `s.a`, left at
// `s.b`. Starting from the endpoints that descent ended close to, pin
// segments that a chord misses and release pins that turn the wrong way.
fn polish(a: Point, portals: &[Segment], b: Point, ts: &mut [f64], cost: &mut f64, eta: f64) {
    let n = portals.len();
    let mut pins: Vec<Option<f64>> = (0..n)
        .map(|k| {
            let s = &portals[k];
            let (t, x) = (ts[k], s.at(ts[k]));
            if t == 0.0 || t == 1.0 {
                Some(t)
            } else if x.dist(s.a) <= eta && x.dist(s.a) <= x.dist(s.b) {
                Some(0.0)
            } else if x.dist(s.b) <= eta {
                Some(1.0)
            } else {
                None
            }
        })
        .collect();
    for _ in 0..4 * n + 8 {
        match straighten(a, portals, b, &pins) {
            Err((k, t)) => {
                if pins[k].is_some() {
                    return;
                }
                pins[k] = Some(if t < 0.0 { 0.0 } else { 1.0 });
            }
            Ok(trial) => match worst_turn(a, portals, b, &trial, &pins) {
                Some(k) => pins[k] = None,
                None => {
                    let c = path_cost(a, portals, &trial, b);
                    if c <= *cost * (1.0 + 1e-14) {
                        ts.copy_from_slice(&trial);
                        *cost = c;
                    }
                    return;
                }
            },
        }
    }
}

// Pinned waypoint whose bend turns against its endpoint's side the most.
fn worst_turn(a: Point, portals: &[Segment], b: Point, ts: &[f64], pins: &[Option<f64>]) -> Option<usize> {
    let n = portals.len();
    let z = |i: usize| -> Point {
        if i == 0 {
            a
        } else if i == n + 1 {
            b
        } else {
            portals[i - 1].at(ts[i - 1])
        }
    };
    let mut worst = None;
    let mut worst_v = 1e-12;
    for k in 0..n {
        let Some(t) = pins[k] else { continue };
        let v = z(k + 1);
        let prev = (0..=k).rev().map(z).find(|p| !p.approx_eq(v, EPS_PT));
        let next = (k + 2..=n + 1).map(z).find(|p| !p.approx_eq(v, EPS_PT));
        let (Some(p), Some(q)) = (prev, next) else { continue };
        let (u, w) = (v - p, q - v);
        let turn = u.cross(w) / (u.norm() * w.norm());
        // Right endpoint wants a clockwise turn, left endpoint counter-clockwise.
        let wrong = if t == 0.0 { turn } else { -turn };
        if wrong > worst_v {
            worst_v = wrong;
            worst = Some(k);
        }
    }
    worst
}

// Straight chords between consecutive pinned points, or the first segment
// a chord misses with its out-of-range parameter.
fn straighten(
    a: Point,
    portals: &[Segment],
    b: Point,
    pins: &[Option<f64>],
) -> Result<Vec<f64>, (usize, f64)> {
    let n = portals.len();
    let mut ts: Vec<f64> = pins.iter().map(|p| p.unwrap_or(0.5)).collect();
    let z = |i: usize| -> Point {
        if i == 0 {
            a
        } else if i == n + 1 {
            b
        } else {
            portals[i - 1].at(pins[i - 1].unwrap())
        }
    };
    let mut bends = vec![0usize];
    bends.extend((1..=n).filter(|&i| pins[i - 1].is_some()));
    bends.push(n + 1);
    for w in bends.windows(2) {
        let (i, j) = (w[0], w[1]);
        if j == i + 1 {
            continue;
        }
        let (p, q) = (z(i), z(j));
        let chord = Segment::new(p, q);
        for k in (i + 1)..j {
            let s = &portals[k - 1];
            let t = if p.approx_eq(q, EPS_PT) {
                s.project(p)
            } else {
                match s.line_intersection(&chord) {
                    Some((t, _)) => t,
                    None => s.project(p),
                }
            };
            if !(-1e-12..=1.0 + 1e-12).contains(&t) {
                return Err((k - 1, t));
            }
            ts[k - 1] = t.clamp(0.0, 1.0);
        }
    }
    Ok(ts)
}
