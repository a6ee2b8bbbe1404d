//! Optimal tethered configuration search: every rollback-free cell sequence
//! from the anchor whose taut tether can reach its last cutline within the
//! tether length, stored per cell.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::dissection::{DissectionGraph, Environment};
use crate::encoding::{convergence_delta, optimal_homotopic_path, portals, trim_touching, CellId, Encoding, NodeSeq};
use crate::error::{Error, Result};
use crate::geom::{cost, Point, Polyline, Segment};
use crate::taut;

/// Relative feasibility slack on the tether length.
pub const TETHER_RTOL: f64 = 1e-6;
pub const DEFAULT_MAX_ENCODINGS: usize = 1_000_000;
const TERNARY_MAX_ITERS: usize = 200;

/// Largest admissible tether cost for length `zeta`.
pub fn tether_limit(zeta: f64) -> f64 {
    zeta * (1.0 + TETHER_RTOL)
}

/// Taut tether length from the anchor to a point on the last cutline of a
/// sequence, as a function of the position `t` along that cutline.
pub struct CutlineProfile {
    anchor: Point,
    inner: Vec<Segment>,
    last: Segment,
    warm: Vec<f64>,
    delta: f64,
}

impl CutlineProfile {
    pub fn new(g: &DissectionGraph, anchor: Point, s: &NodeSeq) -> Result<Self> {
        if s.len() < 2 {
            return Err(Error::InvalidEncoding(format!("sequence {s} has no cutline")));
        }
        s.check(g)?;
        if !s.is_rollback_free() {
            return Err(Error::InvalidEncoding(format!("sequence {s} has a rollback")));
        }
        let mut inner = portals(g, s);
        let last = inner.pop().expect("at least one portal");
        let warm = vec![0.5; inner.len()];
        Ok(CutlineProfile { anchor, inner, last, warm, delta: convergence_delta(g) })
    }

    pub fn cutline(&self) -> Segment {
        self.last
    }

    pub fn length(&self) -> f64 {
        self.last.length()
    }

    pub fn eval(&mut self, t: f64) -> f64 {
        let b = self.last.at(t);
        let (lo, hi) = trim_touching(&self.inner, self.anchor, b);
        let ps = &self.inner[lo..hi];
        let r = taut::solve(self.anchor, ps, b, Some(&self.warm[lo..hi]), self.delta);
        self.warm[lo..hi].copy_from_slice(&r.ts);
        r.cost
    }
}

fn profile_admits(f: &mut CutlineProfile, zeta: f64) -> bool {
    let z = tether_limit(zeta);
    let len = f.length();
    let c_mid = f.eval(0.5);
    if c_mid - 0.5 * len > z {
        return false;
    }
    if c_mid <= z {
        return true;
    }
    let c0 = f.eval(0.0);
    let c1 = f.eval(1.0);
    if c0 <= z || c1 <= z {
        return true;
    }
    if (z < c0 && c0 <= c_mid && c_mid <= c1) || (z < c1 && c1 <= c_mid && c_mid <= c0) {
        return false;
    }
    // f is convex, so ternary search brackets its minimum. Stopping once the
    // bracket is short also bounds the gap |f(t1) - f(t2)|, since f is
    // len-Lipschitz.
    let tol = 1e-7 * zeta;
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..TERNARY_MAX_ITERS {
        let t1 = lo + (hi - lo) / 3.0;
        let t2 = hi - (hi - lo) / 3.0;
        let m1 = f.eval(t1);
        let m2 = f.eval(t2);
        if m1 <= z || m2 <= z {
            return true;
        }
        if m1 <= m2 {
            hi = t2;
        } else {
            lo = t1;
        }
        if (m1 - m2).abs() < tol && (hi - lo) * len < tol {
            break;
        }
    }
    false
}

/// Whether some point of the last cutline of `s` is reachable by a taut
/// tether of length at most `zeta`.
pub fn encoding_validity(g: &DissectionGraph, anchor: Point, zeta: f64, s: &NodeSeq) -> bool {
    if s.len() == 1 {
        return g.locate(anchor).is_ok_and(|c| c == s.first());
    }
    match CutlineProfile::new(g, anchor, s) {
        Ok(mut f) => profile_admits(&mut f, zeta),
        Err(_) => false,
    }
}

/// Lower bound on the tether length needed to reach the last cutline of `s`.
pub fn lower_cost(g: &DissectionGraph, anchor: Point, s: &NodeSeq) -> Result<f64> {
    let mut f = CutlineProfile::new(g, anchor, s)?;
    Ok(f.eval(0.5) - 0.5 * f.length())
}

pub(crate) fn check_anchor(g: &DissectionGraph, anchor: Point, zeta: f64) -> Result<CellId> {
    if !(zeta > 0.0 && zeta.is_finite()) {
        return Err(Error::InvalidInput(format!("tether length must be positive, got {zeta}")));
    }
    if !g.env().is_free(anchor) {
        return Err(Error::AnchorInObstacle(anchor));
    }
    g.locate(anchor).map_err(|_| Error::AnchorInObstacle(anchor))
}

/// Breadth-first closure from the anchor cell under `admit`, skipping
/// immediate rollbacks and, if `repeat_free`, revisits.
pub(crate) fn expand(
    g: &DissectionGraph,
    root: CellId,
    max_encodings: usize,
    repeat_free: bool,
    mut admit: impl FnMut(&NodeSeq) -> bool,
) -> Result<Vec<BTreeSet<NodeSeq>>> {
    let mut table = vec![BTreeSet::new(); g.cell_count()];
    let start = NodeSeq::single(root);
    table[root.0].insert(start.clone());
    let mut count = 1;
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for c in g.neighbors(s.last())? {
            if Some(c) == s.penultimate() || (repeat_free && s.contains(c)) {
                continue;
            }
            let next = s.extended(c);
            if !admit(&next) {
                continue;
            }
            let fresh = table[c.0].insert(next.clone());
            debug_assert!(fresh, "sequence {next} generated twice");
            count += 1;
            if count > max_encodings {
                return Err(Error::TooManyEncodings(max_encodings));
            }
            queue.push_back(next);
        }
    }
    Ok(table)
}

/// A taut configuration and its cell sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub path: Polyline,
    pub cost: f64,
    pub seq: NodeSeq,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigSet {
    pub goal: Point,
    pub configs: Vec<Config>,
}

impl ConfigSet {
    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }
}

pub struct TcsIndex<'g> {
    graph: &'g DissectionGraph,
    anchor: Point,
    tether: f64,
    anchor_cell: CellId,
    table: Vec<BTreeSet<NodeSeq>>,
}

/// Serialized form of a [`TcsIndex`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IndexFile {
    pub environment: Environment,
    pub anchor: Point,
    pub tether: f64,
    pub cell_count: usize,
    pub encoding_count: usize,
    pub table: Vec<Vec<NodeSeq>>,
}

pub fn tcs_preprocess<'g>(g: &'g DissectionGraph, anchor: Point, zeta: f64) -> Result<TcsIndex<'g>> {
    tcs_preprocess_with_limit(g, anchor, zeta, DEFAULT_MAX_ENCODINGS)
}

pub fn tcs_preprocess_with_limit<'g>(
    g: &'g DissectionGraph,
    anchor: Point,
    zeta: f64,
    max_encodings: usize,
) -> Result<TcsIndex<'g>> {
    let anchor_cell = check_anchor(g, anchor, zeta)?;
    let table = expand(g, anchor_cell, max_encodings, false, |s| encoding_validity(g, anchor, zeta, s))?;
    Ok(TcsIndex { graph: g, anchor, tether: zeta, anchor_cell, table })
}

pub fn get_all_foc(idx: &TcsIndex, goal: Point) -> Result<ConfigSet> {
    idx.configs_at(goal)
}

impl<'g> TcsIndex<'g> {
    pub fn graph(&self) -> &'g DissectionGraph {
        self.graph
    }

    pub fn anchor(&self) -> Point {
        self.anchor
    }

    pub fn tether(&self) -> f64 {
        self.tether
    }

    pub fn limit(&self) -> f64 {
        tether_limit(self.tether)
    }

    pub fn anchor_cell(&self) -> CellId {
        self.anchor_cell
    }

    pub fn table(&self, c: CellId) -> &BTreeSet<NodeSeq> {
        &self.table[c.0]
    }

    pub fn encoding_count(&self) -> usize {
        self.table.iter().map(BTreeSet::len).sum()
    }

    pub fn sequences(&self) -> impl Iterator<Item = &NodeSeq> {
        self.table.iter().flatten()
    }

    /// Feasible taut configurations ending at `goal`, cheapest first.
    pub fn configs_at(&self, goal: Point) -> Result<ConfigSet> {
        if !self.graph.env().is_free(goal) {
            return Err(Error::GoalInObstacle(goal));
        }
        let cell = self.graph.locate(goal).map_err(|_| Error::GoalInObstacle(goal))?;
        let mut configs = Vec::new();
        for s in &self.table[cell.0] {
            let path = optimal_homotopic_path(self.graph, &Encoding::new(self.anchor, s.clone(), goal))?;
            let c = cost(&path);
            if c <= self.limit() {
                configs.push(Config { path, cost: c, seq: s.clone() });
            }
        }
        configs.sort_by(|a, b| a.cost.total_cmp(&b.cost).then_with(|| a.seq.cmp(&b.seq)));
        Ok(ConfigSet { goal, configs })
    }

    pub fn to_file(&self) -> IndexFile {
        IndexFile {
            environment: self.graph.env().clone(),
            anchor: self.anchor,
            tether: self.tether,
            cell_count: self.graph.cell_count(),
            encoding_count: self.encoding_count(),
            table: self.table.iter().map(|s| s.iter().cloned().collect()).collect(),
        }
    }

    /// Rebuilds an index over `g`, which must be the dissection of
    /// `f.environment`.
    pub fn from_file(g: &'g DissectionGraph, f: &IndexFile) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if g.env() != &f.environment {
            return bad("index environment differs from the graph's".into());
        }
        if f.cell_count != g.cell_count() || f.table.len() != g.cell_count() {
            return bad(format!("index has {} cells, dissection has {}", f.table.len(), g.cell_count()));
        }
        let anchor_cell = check_anchor(g, f.anchor, f.tether)?;
        let mut table = vec![BTreeSet::new(); g.cell_count()];
        for (c, seqs) in f.table.iter().enumerate() {
            for s in seqs {
                s.check(g)?;
                if s.first() != anchor_cell || s.last() != CellId(c) || !s.is_rollback_free() {
                    return bad(format!("sequence {s} does not belong in cell {c}"));
                }
                table[c].insert(s.clone());
            }
        }
        if !table[anchor_cell.0].contains(&NodeSeq::single(anchor_cell)) {
            return bad("anchor cell lacks the trivial sequence".into());
        }
        let idx = TcsIndex { graph: g, anchor: f.anchor, tether: f.tether, anchor_cell, table };
        if idx.encoding_count() != f.encoding_count {
            return bad(format!("encodingCount {} but {} sequences stored", f.encoding_count, idx.encoding_count()));
        }
        Ok(idx)
    }
}
