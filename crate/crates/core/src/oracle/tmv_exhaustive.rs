//! Ordered multi-goal tours by enumerating every combination of goal
//! configurations, with legs from the funnel oracle.

use crate::encoding::Encoding;
use crate::error::{Error, Result};
use crate::geom::{cost, Point, Polyline};
use crate::planners::{start_sequence, transition};
use crate::tcs::TcsIndex;

use super::funnel::funnel_shortest;

#[derive(Clone, Debug)]
pub struct ExhaustiveTour {
    pub cost: f64,
    /// Configuration index chosen at each target.
    pub choice: Vec<usize>,
    pub combinations: usize,
    pub solver_calls: usize,
}

pub fn tmv_exhaustive(idx: &TcsIndex, start_config: &Polyline, targets: &[Point]) -> Result<ExhaustiveTour> {
    let g = idx.graph();
    let rho_s = start_sequence(idx, start_config)?;
    let start = start_config.last();
    let mut sets = Vec::new();
    for (k, &x) in targets.iter().enumerate() {
        let cs = idx.configs_at(x)?;
        if cs.is_empty() {
            return Err(Error::NoFeasibleTour(k));
        }
        sets.push(cs.configs);
    }
    let mut calls = 0;
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut choice = vec![0usize; targets.len()];
    let mut combinations = 0;
    loop {
        combinations += 1;
        let mut total = 0.0;
        let (mut x, mut rho) = (start, rho_s.clone());
        for (k, &j) in choice.iter().enumerate() {
            let next = &sets[k][j].seq;
            calls += 1;
            total += cost(&funnel_shortest(g, &Encoding::new(x, transition(&rho, next)?, targets[k]))?);
            x = targets[k];
            rho = next.clone();
        }
        calls += 1;
        total += cost(&funnel_shortest(g, &Encoding::new(x, transition(&rho, &rho_s)?, start))?);
        if best.as_ref().is_none_or(|b| total < b.0) {
            best = Some((total, choice.clone()));
        }
        // Odometer increment over the configuration indices.
        let mut k = choice.len();
        loop {
            if k == 0 {
                let (cost, choice) = best.expect("at least one combination");
                return Ok(ExhaustiveTour { cost, choice, combinations, solver_calls: calls });
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < sets[k].len() {
                break;
            }
            choice[k] = 0;
        }
    }
}
