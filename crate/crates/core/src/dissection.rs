//! Convex dissection of a polygon-with-holes free space and its cell
//! adjacency graph.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

use crate::encoding::CellId;
use crate::error::{Error, Result};
use crate::geom::{
    orient, point_in_polygon, segments_touch, Containment, Point, Segment, SimplePolygon, EPS_COL,
    EPS_PT,
};

#[derive(Clone, Debug, PartialEq)]
pub struct Environment {
    pub name: String,
    boundary: SimplePolygon,
    obstacles: Vec<SimplePolygon>,
}

#[derive(Serialize, Deserialize)]
struct EnvironmentJson {
    #[serde(default)]
    name: String,
    boundary: Vec<Point>,
    #[serde(default)]
    obstacles: Vec<Vec<Point>>,
}

impl Serialize for Environment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EnvironmentJson {
            name: self.name.clone(),
            boundary: self.boundary.vertices().to_vec(),
            obstacles: self.obstacles.iter().map(|o| o.vertices().to_vec()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Environment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = EnvironmentJson::deserialize(d)?;
        Environment::new(raw.name, raw.boundary, raw.obstacles).map_err(serde::de::Error::custom)
    }
}

/// Where a query point sits relative to the environment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Free,
    InObstacle(usize),
    OutsideBoundary,
}

impl Environment {
    /// Validates the environment and normalizes orientation (boundary CCW,
    /// obstacles CW).
    pub fn new(
        name: impl Into<String>,
        boundary: Vec<Point>,
        obstacles: Vec<Vec<Point>>,
    ) -> Result<Self> {
        let inv = |e: Error| Error::InvalidEnvironment(e.to_string());
        let boundary = SimplePolygon::new(boundary).map_err(inv)?.with_orientation(true);
        let obstacles = obstacles
            .into_iter()
            .enumerate()
            .map(|(i, o)| {
                SimplePolygon::new(o)
                    .map(|p| p.with_orientation(false))
                    .map_err(|e| Error::InvalidEnvironment(format!("obstacle {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;

        for (i, o) in obstacles.iter().enumerate() {
            for &v in o.vertices() {
                if point_in_polygon(v, &boundary) != Containment::Inside {
                    return Err(Error::InvalidEnvironment(format!(
                        "obstacle {i} is not strictly inside the boundary (vertex {v})"
                    )));
                }
            }
            if o.edges().any(|e| boundary.edges().any(|b| segments_touch(&e, &b, EPS_PT))) {
                return Err(Error::InvalidEnvironment(format!(
                    "obstacle {i} touches the boundary"
                )));
            }
            for (j, p) in obstacles.iter().enumerate().skip(i + 1) {
                let touching = o.edges().any(|e| p.edges().any(|f| segments_touch(&e, &f, EPS_PT)));
                let nested = point_in_polygon(o.vertices()[0], p) != Containment::Outside
                    || point_in_polygon(p.vertices()[0], o) != Containment::Outside;
                if touching || nested {
                    return Err(Error::InvalidEnvironment(format!(
                        "obstacles {i} and {j} overlap or touch"
                    )));
                }
            }
        }
        Ok(Environment { name: name.into(), boundary, obstacles })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidEnvironment(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("environment serializes")
    }

    pub fn boundary(&self) -> &SimplePolygon {
        &self.boundary
    }

    pub fn obstacles(&self) -> &[SimplePolygon] {
        &self.obstacles
    }

    pub fn free_area(&self) -> f64 {
        self.boundary.area() - self.obstacles.iter().map(|o| o.area()).sum::<f64>()
    }

    /// Largest distance between two boundary vertices.
    pub fn diameter(&self) -> f64 {
        let vs = self.boundary.vertices();
        let mut d: f64 = 0.0;
        for (i, &p) in vs.iter().enumerate() {
            for &q in &vs[i + 1..] {
                d = d.max(p.dist(q));
            }
        }
        d
    }

    /// Closed free space: boundary and obstacle edges count as free.
    pub fn region(&self, q: Point) -> Region {
        if point_in_polygon(q, &self.boundary) == Containment::Outside {
            return Region::OutsideBoundary;
        }
        for (i, o) in self.obstacles.iter().enumerate() {
            if point_in_polygon(q, o) == Containment::Inside {
                return Region::InObstacle(i);
            }
        }
        Region::Free
    }

    pub fn is_free(&self, q: Point) -> bool {
        self.region(q) == Region::Free
    }

    pub(crate) fn check_free(&self, q: Point) -> Result<()> {
        match self.region(q) {
            Region::Free => Ok(()),
            Region::InObstacle(_) => Err(Error::PointInObstacle(q)),
            Region::OutsideBoundary => Err(Error::PointOutsideBoundary(q)),
        }
    }

    /// All boundary and obstacle edges.
    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        self.boundary.edges().chain(self.obstacles.iter().flat_map(|o| o.edges()))
    }

    /// All boundary and obstacle vertices.
    pub fn vertices(&self) -> impl Iterator<Item = Point> + '_ {
        self.boundary
            .vertices()
            .iter()
            .chain(self.obstacles.iter().flat_map(|o| o.vertices().iter()))
            .copied()
    }

    /// Strictly inside free space (interior, not on any edge).
    fn is_open_free(&self, q: Point) -> bool {
        point_in_polygon(q, &self.boundary) == Containment::Inside
            && self.obstacles.iter().all(|o| point_in_polygon(q, o) == Containment::Outside)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexCell {
    pub id: CellId,
    pub polygon: SimplePolygon,
    pub cutline_ids: Vec<usize>,
}

/// Shared edge between two cells. `segment` runs counter-clockwise along
/// the boundary of `cells.0`, which is always the lower id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cutline {
    pub id: usize,
    pub segment: Segment,
    pub cells: (CellId, CellId),
}

impl Cutline {
    /// The cutline as a portal crossed from `from` into the other cell:
    /// returns `(right, left)` endpoints as seen by a traveller heading
    /// across.
    pub fn portal_from(&self, from: CellId) -> (Point, Point) {
        if from == self.cells.0 {
            (self.segment.a, self.segment.b)
        } else {
            (self.segment.b, self.segment.a)
        }
    }

    pub fn other(&self, c: CellId) -> CellId {
        if c == self.cells.0 {
            self.cells.1
        } else {
            self.cells.0
        }
    }

    pub fn length(&self) -> f64 {
        self.segment.length()
    }
}

#[derive(Clone, Debug)]
pub struct DissectionGraph {
    env: Environment,
    cells: Vec<ConvexCell>,
    cutlines: Vec<Cutline>,
    adjacency: Vec<Vec<(CellId, usize)>>,
    by_pair: HashMap<(CellId, CellId), usize>,
    bboxes: Vec<(Point, Point)>,
    diameter: f64,
}

impl DissectionGraph {
    pub fn env(&self) -> &Environment {
        &self.env
    }

    pub fn cells(&self) -> &[ConvexCell] {
        &self.cells
    }

    pub fn cutlines(&self) -> &[Cutline] {
        &self.cutlines
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn cell(&self, c: CellId) -> Result<&ConvexCell> {
        self.cells.get(c.0).ok_or(Error::UnknownCell(c))
    }

    pub fn cutline(&self, id: usize) -> &Cutline {
        &self.cutlines[id]
    }

    /// Adjacent cell ids in ascending order.
    pub fn neighbors(&self, c: CellId) -> Result<Vec<CellId>> {
        self.check_cell(c)?;
        Ok(self.adjacency[c.0].iter().map(|&(n, _)| n).collect())
    }

    pub(crate) fn neighbor_links(&self, c: CellId) -> &[(CellId, usize)] {
        &self.adjacency[c.0]
    }

    pub fn are_adjacent(&self, a: CellId, b: CellId) -> bool {
        self.by_pair.contains_key(&ordered(a, b))
    }

    pub fn cutline_between(&self, a: CellId, b: CellId) -> Result<&Cutline> {
        self.check_cell(a)?;
        self.check_cell(b)?;
        self.by_pair
            .get(&ordered(a, b))
            .map(|&i| &self.cutlines[i])
            .ok_or(Error::NotAdjacent(a, b))
    }

    pub(crate) fn check_cell(&self, c: CellId) -> Result<()> {
        if c.0 < self.cells.len() {
            Ok(())
        } else {
            Err(Error::UnknownCell(c))
        }
    }

    /// Lowest-id cell whose closed polygon contains `q`.
    pub fn locate(&self, q: Point) -> Result<CellId> {
        self.env.check_free(q)?;
        self.cells_containing(q)
            .next()
            .map_or_else(|| Ok(self.nearest_cell(q)), Ok)
    }

    /// All cells whose closed polygon contains `q`, ascending.
    pub fn cells_containing(&self, q: Point) -> impl Iterator<Item = CellId> + '_ {
        self.cells
            .iter()
            .zip(&self.bboxes)
            .filter(move |(_, (lo, hi))| {
                q.x >= lo.x - EPS_PT && q.x <= hi.x + EPS_PT && q.y >= lo.y - EPS_PT && q.y <= hi.y + EPS_PT
            })
            .filter(move |(c, _)| point_in_polygon(q, &c.polygon) != Containment::Outside)
            .map(|(c, _)| c.id)
    }

    // Free points that miss every closed cell by rounding.
    fn nearest_cell(&self, q: Point) -> CellId {
        let d = |c: &ConvexCell| {
            c.polygon.edges().map(|e| e.distance_to(q)).fold(f64::INFINITY, f64::min)
        };
        self.cells
            .iter()
            .min_by(|a, b| d(a).total_cmp(&d(b)))
            .map(|c| c.id)
            .expect("non-empty dissection")
    }

    pub fn cell_contains(&self, c: CellId, q: Point) -> bool {
        point_in_polygon(q, &self.cells[c.0].polygon) != Containment::Outside
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "name": self.env.name,
            "cells": self.cells.iter().map(|c| serde_json::json!({
                "id": c.id,
                "vertices": c.polygon.vertices(),
                "cutlines": c.cutline_ids,
            })).collect::<Vec<_>>(),
            "cutlines": self.cutlines.iter().map(|l| serde_json::json!({
                "id": l.id,
                "a": l.segment.a,
                "b": l.segment.b,
                "cells": [l.cells.0, l.cells.1],
            })).collect::<Vec<_>>(),
        })
    }
}

fn ordered(a: CellId, b: CellId) -> (CellId, CellId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Triangulates the free space and merges triangles across diagonals while
/// both diagonal endpoints stay convex.
pub fn dissect(env: &Environment) -> Result<DissectionGraph> {
    let mut cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::new();
    let mut rings = vec![env.boundary.vertices()];
    rings.extend(env.obstacles.iter().map(|o| o.vertices()));
    for ring in &rings {
        let mut handles = Vec::with_capacity(ring.len());
        for p in ring.iter() {
            let h = cdt
                .insert(Point2::new(p.x, p.y))
                .map_err(|e| Error::InvalidEnvironment(format!("vertex {p}: {e:?}")))?;
            handles.push(h);
        }
        for i in 0..handles.len() {
            let (a, b) = (handles[i], handles[(i + 1) % handles.len()]);
            if cdt.try_add_constraint(a, b).is_empty() && !cdt.exists_constraint(a, b) {
                return Err(Error::InvalidEnvironment(format!(
                    "edge {} -> {} crosses another edge",
                    ring[i],
                    ring[(i + 1) % ring.len()]
                )));
            }
        }
    }

    let pos: Vec<Point> = cdt
        .vertices()
        .map(|v| {
            let p = v.position();
            Point::new(p.x, p.y)
        })
        .collect();

    let mut polys: Vec<Option<Vec<usize>>> = Vec::new();
    for face in cdt.inner_faces() {
        let vs = face.vertices().map(|v| v.fix().index());
        let c = (pos[vs[0]] + pos[vs[1]] + pos[vs[2]]) * (1.0 / 3.0);
        if env.is_open_free(c) {
            polys.push(Some(vs.to_vec()));
        }
    }
    if polys.is_empty() {
        return Err(Error::InvalidEnvironment("free space is empty".into()));
    }

    let triangles: Vec<Vec<usize>> = polys.into_iter().flatten().collect();
    let mut diagonals: Vec<(usize, usize)> = {
        let mut directed = std::collections::HashSet::new();
        for t in &triangles {
            for k in 0..3 {
                directed.insert((t[k], t[(k + 1) % 3]));
            }
        }
        directed.iter().filter(|&&(u, v)| u < v && directed.contains(&(v, u))).copied().collect()
    };
    diagonals.sort_by(|&(a, b), &(c, d)| {
        let la = pos[a].dist(pos[b]);
        let lc = pos[c].dist(pos[d]);
        lc.total_cmp(&la).then((a, b).cmp(&(c, d)))
    });

    // Greedy merging depends on the diagonal order; try a few fixed orders
    // and keep the coarsest result.
    let mut orders = vec![diagonals.clone(), diagonals.iter().rev().copied().collect()];
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    for _ in 0..6 {
        let mut o = diagonals.clone();
        for i in (1..o.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            o.swap(i, (state >> 33) as usize % (i + 1));
        }
        orders.push(o);
    }
    let mut rings = orders
        .iter()
        .map(|o| hertel_mehlhorn(&triangles, o, &pos))
        .min_by_key(|r| r.len())
        .unwrap();
    let centroids: Vec<Point> = rings
        .iter()
        .map(|r| {
            SimplePolygon::from_vertices_unchecked(r.iter().map(|&i| pos[i]).collect()).centroid()
        })
        .collect();
    let mut order: Vec<usize> = (0..rings.len()).collect();
    order.sort_by(|&i, &j| {
        centroids[i]
            .x
            .total_cmp(&centroids[j].x)
            .then(centroids[i].y.total_cmp(&centroids[j].y))
    });
    rings = order.iter().map(|&i| std::mem::take(&mut rings[i])).collect();

    // Rebuild ownership with final ids to enumerate shared edges.
    let mut edge_cell: HashMap<(usize, usize), usize> = HashMap::new();
    for (ci, r) in rings.iter().enumerate() {
        for k in 0..r.len() {
            edge_cell.insert((r[k], r[(k + 1) % r.len()]), ci);
        }
    }
    let mut shared: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    for (&(u, v), &c) in &edge_cell {
        if let Some(&d) = edge_cell.get(&(v, u)) {
            if c < d {
                shared.insert((c, d), (u, v));
            }
        }
    }

    let mut cells: Vec<ConvexCell> = rings
        .iter()
        .enumerate()
        .map(|(i, r)| ConvexCell {
            id: CellId(i),
            polygon: SimplePolygon::from_vertices_unchecked(r.iter().map(|&k| pos[k]).collect()),
            cutline_ids: Vec::new(),
        })
        .collect();
    let mut cutlines = Vec::with_capacity(shared.len());
    let mut adjacency = vec![Vec::new(); cells.len()];
    let mut by_pair = HashMap::new();
    for (id, (&(c, d), &(u, v))) in shared.iter().enumerate() {
        cutlines.push(Cutline {
            id,
            segment: Segment::new(pos[u], pos[v]),
            cells: (CellId(c), CellId(d)),
        });
        cells[c].cutline_ids.push(id);
        cells[d].cutline_ids.push(id);
        adjacency[c].push((CellId(d), id));
        adjacency[d].push((CellId(c), id));
        by_pair.insert((CellId(c), CellId(d)), id);
    }
    for a in &mut adjacency {
        a.sort();
    }
    let bboxes = cells.iter().map(|c| c.polygon.bbox()).collect();
    let g = DissectionGraph {
        diameter: env.diameter(),
        env: env.clone(),
        cells,
        cutlines,
        adjacency,
        by_pair,
        bboxes,
    };
    if !is_connected(&g) {
        return Err(Error::InvalidEnvironment("free space is disconnected".into()));
    }
    Ok(g)
}

fn hertel_mehlhorn(triangles: &[Vec<usize>], diagonals: &[(usize, usize)], pos: &[Point]) -> Vec<Vec<usize>> {
    let mut polys: Vec<Option<Vec<usize>>> = triangles.iter().cloned().map(Some).collect();
    // Directed edge -> polygon that has it on its CCW boundary.
    let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
    for (pi, p) in triangles.iter().enumerate() {
        for k in 0..3 {
            owner.insert((p[k], p[(k + 1) % 3]), pi);
        }
    }
    for &(u, v) in diagonals {
        let (Some(&pu), Some(&pv)) = (owner.get(&(u, v)), owner.get(&(v, u))) else {
            continue;
        };
        if pu == pv {
            continue;
        }
        let p = polys[pu].as_ref().unwrap();
        let q = polys[pv].as_ref().unwrap();
        let merged = merge_rings(p, q, u, v);
        if !ring_convex_at(&merged, pos, u) || !ring_convex_at(&merged, pos, v) {
            continue;
        }
        owner.remove(&(u, v));
        owner.remove(&(v, u));
        for k in 0..merged.len() {
            owner.insert((merged[k], merged[(k + 1) % merged.len()]), pu);
        }
        polys[pu] = Some(merged);
        polys[pv] = None;
    }
    polys.into_iter().flatten().collect()
}

// p has directed edge u->v, q has v->u. Result walks p from v round to u,
// then q from u round to v, without repeating the shared endpoints.
fn merge_rings(p: &[usize], q: &[usize], u: usize, v: usize) -> Vec<usize> {
    let np = p.len();
    let nq = q.len();
    let iv = p.iter().position(|&x| x == v).unwrap();
    let iu = q.iter().position(|&x| x == u).unwrap();
    let mut out = Vec::with_capacity(np + nq - 2);
    for k in 0..np {
        out.push(p[(iv + k) % np]);
    }
    // out ends with u; q continues from after u up to before v.
    for k in 1..nq - 1 {
        out.push(q[(iu + k) % nq]);
    }
    out
}

fn ring_convex_at(ring: &[usize], pos: &[Point], vertex: usize) -> bool {
    let n = ring.len();
    let i = ring.iter().position(|&x| x == vertex).unwrap();
    let a = pos[ring[(i + n - 1) % n]];
    let b = pos[ring[i]];
    let c = pos[ring[(i + 1) % n]];
    let (e1, e2) = (b - a, c - b);
    orient(a, b, c) >= -EPS_COL * e1.norm() * e2.norm()
}

fn is_connected(g: &DissectionGraph) -> bool {
    let mut seen = vec![false; g.cells.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(c) = stack.pop() {
        for &(n, _) in &g.adjacency[c] {
            if !seen[n.0] {
                seen[n.0] = true;
                stack.push(n.0);
            }
        }
    }
    seen.into_iter().all(|s| s)
}
