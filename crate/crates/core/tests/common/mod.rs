#![allow(dead_code)]

use cdt::{CellId, DissectionGraph, Encoding, Environment, NodeSeq, Point};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn polygon_distance(a: &[Point], b: &[Point]) -> f64 {
    let seg_d = |p: Point, q0: Point, q1: Point| cdt::Segment::new(q0, q1).distance_to(p);
    let mut d = f64::INFINITY;
    for (x, y) in [(a, b), (b, a)] {
        for &p in x {
            for i in 0..y.len() {
                d = d.min(seg_d(p, y[i], y[(i + 1) % y.len()]));
            }
        }
    }
    d
}

/// Rectangle room with `k` random convex obstacles kept `clearance` apart
/// from each other and from the walls.
pub fn random_map(seed: u64, k: usize) -> Environment {
    let mut r = rng(seed);
    let (w, h) = (10.0, 7.0);
    let clearance = 0.3;
    let mut obstacles: Vec<Vec<Point>> = Vec::new();
    let mut tries = 0;
    while obstacles.len() < k && tries < 10_000 {
        tries += 1;
        let rad = r.gen_range(0.3..1.0);
        let c = Point::new(r.gen_range(rad + clearance..w - rad - clearance), r.gen_range(rad + clearance..h - rad - clearance));
        let sides = r.gen_range(3..7);
        let phase = r.gen_range(0.0..std::f64::consts::TAU);
        let poly: Vec<Point> = (0..sides)
            .map(|i| {
                let a = phase + std::f64::consts::TAU * i as f64 / sides as f64 + r.gen_range(-0.3..0.3);
                let rr = rad * r.gen_range(0.6..1.0);
                Point::new(c.x + rr * a.cos(), c.y + rr * a.sin())
            })
            .collect();
        if obstacles.iter().all(|o| polygon_distance(o, &poly) > clearance) {
            obstacles.push(poly);
        }
    }
    let boundary = vec![Point::new(0.0, 0.0), Point::new(w, 0.0), Point::new(w, h), Point::new(0.0, h)];
    Environment::new(format!("random-{seed}"), boundary, obstacles).unwrap()
}

/// Uniform-ish random point inside a convex cell.
pub fn point_in_cell(g: &DissectionGraph, c: CellId, r: &mut impl Rng) -> Point {
    let vs = g.cells()[c.0].polygon.vertices();
    let ws: Vec<f64> = vs.iter().map(|_| r.gen_range(0.0..1.0f64).powi(2)).collect();
    let s: f64 = ws.iter().sum();
    vs.iter().zip(&ws).fold(Point::new(0.0, 0.0), |acc, (&p, &w)| acc + p * (w / s))
}

/// Random free point in the environment.
pub fn free_point(env: &Environment, r: &mut impl Rng) -> Point {
    let (lo, hi) = env.boundary().bbox();
    loop {
        let p = Point::new(r.gen_range(lo.x..hi.x), r.gen_range(lo.y..hi.y));
        if env.is_free(p) {
            return p;
        }
    }
}

/// Random-walk cell sequence reduced to rollback-free form.
pub fn random_seq(g: &DissectionGraph, len: usize, r: &mut impl Rng) -> NodeSeq {
    let mut cur = CellId(r.gen_range(0..g.cell_count()));
    let mut cells = vec![cur];
    for _ in 0..len {
        let ns = g.neighbors(cur).unwrap();
        if ns.is_empty() {
            break;
        }
        let prev = cells.len().checked_sub(2).map(|i| cells[i]);
        let choices: Vec<CellId> = ns.iter().copied().filter(|&n| Some(n) != prev).collect();
        let pool = if choices.is_empty() { &ns } else { &choices };
        cur = pool[r.gen_range(0..pool.len())];
        cells.push(cur);
    }
    cdt::rbf(&NodeSeq::new(cells).unwrap())
}

pub fn random_encoding(g: &DissectionGraph, len: usize, r: &mut impl Rng) -> Encoding {
    let seq = random_seq(g, len, r);
    let a = point_in_cell(g, seq.first(), r);
    let b = point_in_cell(g, seq.last(), r);
    Encoding::new(a, seq, b)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
