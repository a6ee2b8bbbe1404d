//! Parsing of map arguments and coordinate lists.

use std::path::Path;

use cdt::{maps, Environment, Point, Polyline};

use crate::{input_err, CliResult};

/// Reads a map from a JSON file, falling back to a built-in map name.
pub fn load_env(arg: &str) -> CliResult<Environment> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| input_err(format!("{arg}: {e}")))?;
        return Environment::from_json(&text).map_err(|e| input_err(format!("{arg}: {e}")));
    }
    maps::by_name(arg).ok_or_else(|| input_err(format!("{arg}: no such file or built-in map")))
}

/// `"x,y"`.
pub fn parse_point(s: &str) -> CliResult<Point> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(input_err(format!("expected \"x,y\", got {s:?}")));
    }
    let mut v = [0.0; 2];
    for (slot, part) in v.iter_mut().zip(&parts) {
        *slot = part.parse::<f64>().map_err(|_| input_err(format!("bad coordinate {part:?} in {s:?}")))?;
        if !slot.is_finite() {
            return Err(input_err(format!("non-finite coordinate in {s:?}")));
        }
    }
    Ok(Point::new(v[0], v[1]))
}

/// `"x0,y0;x1,y1;..."`.
pub fn parse_points(s: &str) -> CliResult<Vec<Point>> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(parse_point).collect::<CliResult<Vec<_>>>().and_then(|v| {
        if v.is_empty() {
            Err(input_err(format!("no points in {s:?}")))
        } else {
            Ok(v)
        }
    })
}

pub fn parse_polyline(s: &str) -> CliResult<Polyline> {
    Polyline::new(parse_points(s)?).map_err(input_err)
}
