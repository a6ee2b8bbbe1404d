//! Untethered global shortest paths. Every repeat-free cell sequence from
//! the anchor that passes a cheap length bound is stored; a query combines
//! the sequences of the start and goal cells and keeps the shortest
//! repeat-free candidate.

use std::collections::BTreeSet;

use crate::dissection::DissectionGraph;
use crate::encoding::{optimal_homotopic_path, CellId, Encoding, NodeSeq};
use crate::error::{Error, Result};
use crate::geom::{cost, Point, Polyline};
use crate::tcs::{check_anchor, expand, lower_cost, DEFAULT_MAX_ENCODINGS};

use super::{transition, TIE_EPS};

pub struct UtppIndex<'g> {
    graph: &'g DissectionGraph,
    anchor: Point,
    zeta_eff: f64,
    table: Vec<BTreeSet<NodeSeq>>,
}

impl<'g> UtppIndex<'g> {
    pub fn graph(&self) -> &'g DissectionGraph {
        self.graph
    }

    pub fn anchor(&self) -> Point {
        self.anchor
    }

    pub fn zeta_eff(&self) -> f64 {
        self.zeta_eff
    }

    pub fn table(&self, c: CellId) -> &BTreeSet<NodeSeq> {
        &self.table[c.0]
    }

    pub fn encoding_count(&self) -> usize {
        self.table.iter().map(BTreeSet::len).sum()
    }
}

/// Length bound used when none is given: twice the environment diameter.
pub fn default_zeta_eff(g: &DissectionGraph) -> f64 {
    2.0 * g.diameter()
}

pub fn utpp_preprocess<'g>(g: &'g DissectionGraph, anchor: Point, zeta_eff: f64) -> Result<UtppIndex<'g>> {
    utpp_preprocess_with_limit(g, anchor, zeta_eff, DEFAULT_MAX_ENCODINGS)
}

pub fn utpp_preprocess_with_limit<'g>(
    g: &'g DissectionGraph,
    anchor: Point,
    zeta_eff: f64,
    max_encodings: usize,
) -> Result<UtppIndex<'g>> {
    let root = check_anchor(g, anchor, zeta_eff)?;
    let table = expand(g, root, max_encodings, true, |s| {
        lower_cost(g, anchor, s).is_ok_and(|c| c <= zeta_eff)
    })?;
    Ok(UtppIndex { graph: g, anchor, zeta_eff, table })
}

pub fn utpp_plan(idx: &UtppIndex, start: Point, goal: Point) -> Result<Polyline> {
    let g = idx.graph;
    for p in [start, goal] {
        if !g.env().is_free(p) {
            return Err(Error::PointInObstacle(p));
        }
    }
    let (cs, cg) = (g.locate(start)?, g.locate(goal)?);
    let mut candidates = BTreeSet::new();
    for rs in idx.table(cs) {
        for rg in idx.table(cg) {
            let s = transition(rs, rg)?;
            if !s.has_repeats() {
                candidates.insert(s);
            }
        }
    }
    let mut best: Option<(f64, Polyline)> = None;
    // Candidates iterate in lexicographic order, so strict improvement
    // keeps the smallest sequence among ties.
    for s in candidates {
        let p = optimal_homotopic_path(g, &Encoding::new(start, s, goal))?;
        let c = cost(&p);
        if best.as_ref().is_none_or(|(bc, _)| c < bc - TIE_EPS) {
            best = Some((c, p));
        }
    }
    best.map(|b| b.1).ok_or(Error::NoPath)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissection::dissect;
    use crate::maps;

    fn pt(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn single_cell() {
        let g = dissect(&maps::square(1.0, 1.0)).unwrap();
        let idx = utpp_preprocess(&g, pt(0.5, 0.5), 5.0).unwrap();
        assert_eq!(idx.encoding_count(), 1);
        let p = utpp_plan(&idx, pt(0.1, 0.1), pt(0.9, 0.5)).unwrap();
        assert_eq!(p.len(), 2);
        assert!(utpp_plan(&idx, pt(0.3, 0.3), pt(0.3, 0.3)).unwrap().is_constant());
    }

    #[test]
    fn ring() {
        let g = dissect(&maps::ring()).unwrap();
        let a = pt(0.5, 1.5);
        let idx = utpp_preprocess(&g, a, default_zeta_eff(&g)).unwrap();
        for s in (0..g.cell_count()).flat_map(|c| idx.table(CellId(c))) {
            assert!(!s.has_repeats());
        }
        assert_eq!(idx.table(g.locate(pt(2.5, 1.5)).unwrap()).len(), 2);
        let p = utpp_plan(&idx, a, pt(2.5, 1.5)).unwrap();
        assert!((cost(&p) - (1.0 + 2.0 * 0.5f64.sqrt())).abs() < 1e-9);

        let tiny = utpp_preprocess(&g, a, 0.1).unwrap();
        assert_eq!(tiny.encoding_count(), 1);
        assert!(matches!(utpp_plan(&tiny, a, pt(2.5, 1.5)), Err(Error::NoPath)));
    }
}
