//! Tethered point-to-point planning.

use crate::encoding::{optimal_homotopic_path, Encoding, NodeSeq};
use crate::error::{Error, Result};
use crate::geom::{concat, cost, Point, Polyline};
use crate::tcs::TcsIndex;
use crate::theta;

use super::{start_sequence, transition, TIE_EPS};

#[derive(Clone, Debug)]
pub struct TppQuery {
    /// Tether from the anchor to the robot.
    pub start_config: Polyline,
    pub goal: Point,
}

/// Shortest robot path to `q.goal` whose tether stays within the index's
/// length. Candidates come from every feasible goal configuration; equal
/// costs go to the lexicographically smaller goal sequence.
pub fn tpp_plan(idx: &TcsIndex, q: &TppQuery) -> Result<Polyline> {
    let g = idx.graph();
    let rho_s = start_sequence(idx, &q.start_config)?;
    let start = q.start_config.last();
    let goal_configs = idx.configs_at(q.goal)?;
    let mut best: Option<(f64, NodeSeq, Polyline)> = None;
    for cfg in goal_configs.configs {
        let seq = transition(&rho_s, &cfg.seq)?;
        let path = optimal_homotopic_path(g, &Encoding::new(start, seq, q.goal))?;
        let c = cost(&path);
        let better = match &best {
            None => true,
            Some((bc, bs, _)) => c < bc - TIE_EPS || (c <= bc + TIE_EPS && cfg.seq < *bs),
        };
        if better {
            best = Some((c, cfg.seq, path));
        }
    }
    let path = best.map(|b| b.2).ok_or(Error::NoFeasiblePath)?;
    #[cfg(debug_assertions)]
    {
        let cap = idx.tether() * (1.0 + 2.0 * crate::tcs::TETHER_RTOL);
        for (i, c) in tether_profile(idx, &q.start_config, &path, 10)?.into_iter().enumerate() {
            debug_assert!(c <= cap, "tether {c} exceeds {cap} at sample {i}");
        }
    }
    Ok(path)
}

/// Taut tether length after the robot has covered fraction `i / samples`
/// of `path`, for `i = 0..=samples`.
pub fn tether_profile(idx: &TcsIndex, start_config: &Polyline, path: &Polyline, samples: usize) -> Result<Vec<f64>> {
    let g = idx.graph();
    (0..=samples)
        .map(|i| {
            let p = path.prefix(i as f64 / samples.max(1) as f64);
            Ok(cost(&theta(g, &concat(start_config, &p)?)?))
        })
        .collect()
}
