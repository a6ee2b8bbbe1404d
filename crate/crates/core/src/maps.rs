//! Built-in environments used by tests, examples and the CLI.

use crate::dissection::Environment;
use crate::geom::Point;

fn pts(v: &[(f64, f64)]) -> Vec<Point> {
    v.iter().map(|&(x, y)| Point::new(x, y)).collect()
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Point> {
    pts(&[(x0, y0), (x1, y0), (x1, y1), (x0, y1)])
}

/// Obstacle-free `w × h` rectangle at the origin.
pub fn square(w: f64, h: f64) -> Environment {
    Environment::new("square", rect(0.0, 0.0, w, h), vec![]).unwrap()
}

pub fn l_shape() -> Environment {
    let b = pts(&[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)]);
    Environment::new("l-shape", b, vec![]).unwrap()
}

/// `[0,3]²` with the square hole `[1,2]²`.
pub fn ring() -> Environment {
    Environment::new("ring", rect(0.0, 0.0, 3.0, 3.0), vec![rect(1.0, 1.0, 2.0, 2.0)]).unwrap()
}

/// `[0,5]×[0,3]` with two unit-square holes side by side.
pub fn two_obstacles() -> Environment {
    Environment::new(
        "two-obstacles",
        rect(0.0, 0.0, 5.0, 3.0),
        vec![rect(1.0, 1.0, 2.0, 2.0), rect(3.0, 1.0, 4.0, 2.0)],
    )
    .unwrap()
}

/// L-shaped corridor of width 1.5 with a pillar in the corner square.
pub fn l_corridor() -> Environment {
    let b = pts(&[(0.0, 0.0), (4.0, 0.0), (4.0, 1.5), (1.5, 1.5), (1.5, 4.0), (0.0, 4.0)]);
    Environment::new("l-corridor", b, vec![rect(0.5, 0.5, 1.0, 1.0)]).unwrap()
}

/// `14 × 12` room with a staggered field of small pillars.
pub fn cluttered() -> Environment {
    let mut obstacles = Vec::new();
    for row in 0..5 {
        for col in 0..6 {
            let cx = 1.4 + 2.2 * col as f64 + if row % 2 == 1 { 0.6 } else { 0.0 };
            let cy = 1.4 + 2.4 * row as f64;
            let r = 0.35 + 0.05 * ((row * 6 + col) % 3) as f64;
            obstacles.push(match (row + col) % 3 {
                0 => rect(cx - r, cy - r, cx + r, cy + r),
                1 => pts(&[(cx, cy - r), (cx + r, cy), (cx, cy + r), (cx - r, cy)]),
                _ => pts(&[(cx - r, cy - r), (cx + r, cy - r), (cx, cy + r)]),
            });
        }
    }
    Environment::new("cluttered", rect(0.0, 0.0, 14.0, 12.0), obstacles).unwrap()
}

/// Every built-in map by name.
pub fn by_name(name: &str) -> Option<Environment> {
    Some(match name {
        "square" => square(1.0, 1.0),
        "l-shape" => l_shape(),
        "ring" => ring(),
        "two-obstacles" => two_obstacles(),
        "l-corridor" => l_corridor(),
        "cluttered" => cluttered(),
        _ => return None,
    })
}
