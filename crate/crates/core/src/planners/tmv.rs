//! Tethered ordered multi-goal tours.
//!
//! A partial tour that has visited `k` targets is closed by the taut return
//! leg to the start, which keeps the tether homotopic to the start
//! configuration. Extending a partial tour replaces that return leg by a leg
//! to the next target plus a new return leg, so closed costs never decrease
//! and best-first search pops the optimal full tour first.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use ordered_float::OrderedFloat;

use crate::encoding::{optimal_homotopic_path, Encoding, NodeSeq};
use crate::error::{Error, Result};
use crate::geom::{concat, cost, Point, Polyline};
use crate::tcs::{Config, TcsIndex};

use super::{start_sequence, transition};

#[derive(Clone, Debug)]
pub struct TmvResult {
    /// Closed tour from the robot through every target and back.
    pub path: Polyline,
    pub cost: f64,
    /// Goal configuration sequence chosen at each target.
    pub configs: Vec<NodeSeq>,
    /// Shortest-path solver invocations spent on tour legs.
    pub solver_calls: usize,
    pub expanded: usize,
    /// Smallest closed-cost increase over any generated edge.
    pub min_edge_weight: f64,
}

struct Node {
    visited: usize,
    fixed: Polyline,
    fixed_cost: f64,
    // Index into the previous target's configurations, `None` at the start.
    last: Option<usize>,
    total: f64,
    choices: Vec<usize>,
}

struct Legs<'a, 'g> {
    idx: &'a TcsIndex<'g>,
    start: Point,
    rho_s: NodeSeq,
    targets: &'a [Point],
    configs: &'a [Vec<Config>],
    legs: HashMap<(usize, Option<usize>, usize), (Polyline, f64)>,
    returns: HashMap<(usize, usize), (Polyline, f64)>,
    calls: usize,
}

impl Legs<'_, '_> {
    fn solve(&mut self, a: Point, from: &NodeSeq, to: &NodeSeq, b: Point) -> Result<(Polyline, f64)> {
        self.calls += 1;
        let seq = transition(from, to)?;
        let p = optimal_homotopic_path(self.idx.graph(), &Encoding::new(a, seq, b))?;
        let c = cost(&p);
        Ok((p, c))
    }

    // Leg from the `k`th stop (0 is the start) to configuration `j` at target `k`.
    fn leg(&mut self, k: usize, i: Option<usize>, j: usize) -> Result<(Polyline, f64)> {
        if let Some(v) = self.legs.get(&(k, i, j)) {
            return Ok(v.clone());
        }
        let (a, from) = match i {
            None => (self.start, self.rho_s.clone()),
            Some(i) => (self.targets[k - 1], self.configs[k - 1][i].seq.clone()),
        };
        let to = self.configs[k][j].seq.clone();
        let v = self.solve(a, &from, &to, self.targets[k])?;
        self.legs.insert((k, i, j), v.clone());
        Ok(v)
    }

    fn back(&mut self, k: usize, j: usize) -> Result<(Polyline, f64)> {
        if let Some(v) = self.returns.get(&(k, j)) {
            return Ok(v.clone());
        }
        let from = self.configs[k][j].seq.clone();
        let rho_s = self.rho_s.clone();
        let v = self.solve(self.targets[k], &from, &rho_s, self.start)?;
        self.returns.insert((k, j), v.clone());
        Ok(v)
    }
}

/// Cheapest closed tour visiting `targets` in order.
pub fn tmv_plan(idx: &TcsIndex, start_config: &Polyline, targets: &[Point]) -> Result<Polyline> {
    tmv_search(idx, start_config, targets).map(|r| r.path)
}

pub fn tmv_search(idx: &TcsIndex, start_config: &Polyline, targets: &[Point]) -> Result<TmvResult> {
    let rho_s = start_sequence(idx, start_config)?;
    let start = start_config.last();
    let mut configs = Vec::with_capacity(targets.len());
    for (k, &x) in targets.iter().enumerate() {
        let cs = idx.configs_at(x)?;
        if cs.is_empty() {
            return Err(Error::NoFeasibleTour(k));
        }
        configs.push(cs.configs);
    }
    let n = targets.len();
    let mut legs = Legs {
        idx,
        start,
        rho_s,
        targets,
        configs: &configs,
        legs: HashMap::new(),
        returns: HashMap::new(),
        calls: 0,
    };

    let mut nodes = vec![Node {
        visited: 0,
        fixed: Polyline::constant(start),
        fixed_cost: 0.0,
        last: None,
        total: 0.0,
        choices: Vec::new(),
    }];
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((OrderedFloat(0.0), Reverse(0usize), 0usize)));
    let mut expanded = 0;
    let mut min_edge_weight = f64::INFINITY;
    while let Some(Reverse((_, _, id))) = heap.pop() {
        let k = nodes[id].visited;
        if k == n {
            let node = &nodes[id];
            let path = match node.last {
                Some(j) => concat(&node.fixed, &legs.back(k - 1, j)?.0)?,
                None => node.fixed.clone(),
            };
            let choices = node.choices.iter().enumerate().map(|(t, &j)| configs[t][j].seq.clone()).collect();
            return Ok(TmvResult {
                cost: node.total,
                path,
                configs: choices,
                solver_calls: legs.calls,
                expanded,
                min_edge_weight,
            });
        }
        expanded += 1;
        for j in 0..configs[k].len() {
            let (leg, leg_cost) = legs.leg(k, nodes[id].last, j)?;
            let (_, back_cost) = legs.back(k, j)?;
            let parent = &nodes[id];
            let fixed_cost = parent.fixed_cost + leg_cost;
            let total = fixed_cost + back_cost;
            min_edge_weight = min_edge_weight.min(total - parent.total);
            let mut choices = parent.choices.clone();
            choices.push(j);
            let child = Node {
                visited: k + 1,
                fixed: concat(&parent.fixed, &leg)?,
                fixed_cost,
                last: Some(j),
                total,
                choices,
            };
            let cid = nodes.len();
            nodes.push(child);
            heap.push(Reverse((OrderedFloat(total), Reverse(k + 1), cid)));
        }
    }
    Err(Error::NoFeasibleTour(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissection::dissect;
    use crate::encoding::gamma_star;
    use crate::maps;
    use crate::tcs::tcs_preprocess;

    fn pt(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn out_and_back() {
        let g = dissect(&maps::square(4.0, 3.0)).unwrap();
        let a = pt(0.5, 0.5);
        let idx = tcs_preprocess(&g, a, 10.0).unwrap();
        let start = Polyline::new(vec![a, pt(1.0, 1.0)]).unwrap();
        let r = tmv_search(&idx, &start, &[pt(3.0, 2.0)]).unwrap();
        assert!((r.cost - 2.0 * pt(1.0, 1.0).dist(pt(3.0, 2.0))).abs() < 1e-12);
        assert_eq!(r.path.first(), r.path.last());
    }

    #[test]
    fn ring_too_short_tether() {
        let g = dissect(&maps::ring()).unwrap();
        let a = pt(0.5, 1.5);
        let idx = tcs_preprocess(&g, a, 2.2).unwrap();
        let start = Polyline::new(vec![a, pt(0.5, 2.5)]).unwrap();
        let r = tmv_search(&idx, &start, &[pt(1.5, 2.5), pt(2.5, 1.5)]);
        assert!(matches!(r, Err(Error::NoFeasibleTour(1))));
    }

    #[test]
    fn ring_tour_closes_homotopically() {
        let g = dissect(&maps::ring()).unwrap();
        let a = pt(0.5, 1.5);
        let idx = tcs_preprocess(&g, a, 6.0).unwrap();
        let start = Polyline::new(vec![a, pt(0.7, 2.6)]).unwrap();
        let r = tmv_search(&idx, &start, &[pt(2.5, 1.5), pt(1.5, 0.5)]).unwrap();
        assert!(r.min_edge_weight >= -1e-9);
        let before = gamma_star(&g, &start).unwrap();
        let after = gamma_star(&g, &concat(&start, &r.path).unwrap()).unwrap();
        assert_eq!(before.seq, after.seq);
        assert!((cost(&r.path) - r.cost).abs() < 1e-9);
    }
}
