//! Repeated timing of preprocessing and queries.

use std::fmt::Write;
use std::path::Path;
use std::time::Instant;

use cdt::planners::{default_zeta_eff, tmv_search, tpp_plan, utpp_plan, utpp_preprocess, TppQuery};
use cdt::tcs::{tcs_preprocess, TcsIndex};
use cdt::{dissect, CellId, DissectionGraph, Environment, Point, Polyline};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{input_err, CliResult, Failure};

pub struct Options {
    pub reps: usize,
    pub anchor: Option<Point>,
    pub tether: Option<f64>,
    pub queries: usize,
    pub seed: u64,
    pub timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Tcs,
    Foc,
    Tpp,
    Tmv,
    Utpp,
}

/// One entry of a `--tasks` file.
#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Task {
    pub kind: Kind,
    /// Overrides the run-wide anchor and tether for this task.
    pub anchor: Option<Point>,
    pub tether: Option<f64>,
    /// Query goals; the ordered targets for a tour.
    #[serde(default)]
    pub goals: Vec<Point>,
    pub start_config: Option<Polyline>,
    /// Untethered start point.
    pub start: Option<Point>,
    pub zeta_eff: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub median: f64,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TaskReport {
    pub kind: Kind,
    pub queries: usize,
    pub feasible: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub encoding_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub configs: Option<usize>,
    /// Summed cost over feasible queries.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_cost: Option<f64>,
    /// Milliseconds per repetition.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ms: Option<Stats>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub map: String,
    pub cell_count: usize,
    pub anchor: Point,
    pub tether: f64,
    pub reps: usize,
    pub seed: u64,
    pub tasks: Vec<TaskReport>,
}

impl Report {
    pub fn markdown(&self) -> String {
        let mut s = format!(
            "map {} ({} cells), anchor {}, tether {}, {} reps\n\n",
            self.map, self.cell_count, self.anchor, self.tether, self.reps
        );
        s.push_str("| task | queries | feasible | encodings | configs | total cost | median ms | mean ms |\n");
        s.push_str("|---|---|---|---|---|---|---|---|\n");
        let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
        for t in &self.tasks {
            let _ = writeln!(
                s,
                "| {:?} | {} | {} | {} | {} | {} | {} | {} |",
                t.kind,
                t.queries,
                t.feasible,
                opt(t.encoding_count.map(|v| v.to_string())),
                opt(t.configs.map(|v| v.to_string())),
                opt(t.total_cost.map(|v| format!("{v:.6}"))),
                opt(t.ms.as_ref().map(|m| format!("{:.3}", m.median))),
                opt(t.ms.as_ref().map(|m| format!("{:.3}", m.mean))),
            );
        }
        s.trim_end().to_string()
    }
}

fn stats(mut xs: Vec<f64>) -> Stats {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    let median = if n % 2 == 1 { xs[n / 2] } else { 0.5 * (xs[n / 2 - 1] + xs[n / 2]) };
    Stats { median, mean: xs.iter().sum::<f64>() / n as f64 }
}

// Runs `f` `reps` times; keeps the first outcome and the timings.
fn timed<T>(opts: &Options, mut f: impl FnMut() -> CliResult<T>) -> CliResult<(T, Option<Stats>)> {
    let mut first = None;
    let mut ms = Vec::with_capacity(opts.reps);
    for _ in 0..opts.reps {
        let t = Instant::now();
        let v = f()?;
        ms.push(t.elapsed().as_secs_f64() * 1e3);
        first.get_or_insert(v);
    }
    let v = first.ok_or_else(|| input_err("reps must be at least 1"))?;
    Ok((v, opts.timing.then(|| stats(ms))))
}

// Feasible results become `Some`, infeasible ones `None`.
fn feasible<T>(r: cdt::Result<T>) -> CliResult<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_infeasible() => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn summarize(kind: Kind, costs: &[Option<f64>]) -> TaskReport {
    let ok: Vec<f64> = costs.iter().flatten().copied().collect();
    TaskReport {
        kind,
        queries: costs.len(),
        feasible: ok.len(),
        encoding_count: None,
        configs: None,
        total_cost: (!ok.is_empty()).then(|| ok.iter().sum()),
        ms: None,
    }
}

fn run_task(g: &DissectionGraph, idx: &TcsIndex, task: &Task, opts: &Options) -> CliResult<TaskReport> {
    let need_config = || {
        task.start_config.clone().ok_or_else(|| input_err(format!("{:?} task needs startConfig", task.kind)))
    };
    let mut report = match task.kind {
        Kind::Tcs => {
            let (n, ms) = timed(opts, || Ok(tcs_preprocess(g, idx.anchor(), idx.tether())?.encoding_count()))?;
            TaskReport { kind: Kind::Tcs, queries: 1, feasible: 1, encoding_count: Some(n), configs: None, total_cost: None, ms }
        }
        Kind::Foc => {
            let (counts, ms) = timed(opts, || {
                task.goals.iter().map(|&q| Ok(idx.configs_at(q)?.len())).collect::<CliResult<Vec<_>>>()
            })?;
            TaskReport {
                kind: Kind::Foc,
                queries: counts.len(),
                feasible: counts.iter().filter(|&&c| c > 0).count(),
                encoding_count: None,
                configs: Some(counts.iter().sum()),
                total_cost: None,
                ms,
            }
        }
        Kind::Tpp => {
            let start_config = need_config()?;
            let (costs, ms) = timed(opts, || {
                task.goals
                    .iter()
                    .map(|&goal| {
                        let q = TppQuery { start_config: start_config.clone(), goal };
                        Ok(feasible(tpp_plan(idx, &q))?.map(|p| cdt::geom::cost(&p)))
                    })
                    .collect::<CliResult<Vec<_>>>()
            })?;
            TaskReport { ms, ..summarize(Kind::Tpp, &costs) }
        }
        Kind::Tmv => {
            let start_config = need_config()?;
            if task.goals.is_empty() {
                return Err(input_err("tmv task needs at least one goal"));
            }
            let (c, ms) = timed(opts, || Ok(feasible(tmv_search(idx, &start_config, &task.goals))?.map(|r| r.cost)))?;
            TaskReport { ms, ..summarize(Kind::Tmv, &[c]) }
        }
        Kind::Utpp => {
            let start = task.start.ok_or_else(|| input_err("utpp task needs start"))?;
            let z = task.zeta_eff.unwrap_or_else(|| default_zeta_eff(g));
            let u = utpp_preprocess(g, idx.anchor(), z)?;
            let (costs, ms) = timed(opts, || {
                task.goals
                    .iter()
                    .map(|&goal| Ok(feasible(utpp_plan(&u, start, goal))?.map(|p| cdt::geom::cost(&p))))
                    .collect::<CliResult<Vec<_>>>()
            })?;
            TaskReport { encoding_count: Some(u.encoding_count()), ms, ..summarize(Kind::Utpp, &costs) }
        }
    };
    if !opts.timing {
        report.ms = None;
    }
    Ok(report)
}

fn setup(env: &Environment, opts: &Options) -> CliResult<(DissectionGraph, Point, f64)> {
    if opts.reps == 0 {
        return Err(input_err("reps must be at least 1"));
    }
    let g = dissect(env)?;
    let anchor = match opts.anchor {
        Some(a) => a,
        None => g.cell(CellId(0))?.polygon.centroid(),
    };
    let tether = opts.tether.unwrap_or_else(|| 0.5 * g.diameter());
    Ok((g, anchor, tether))
}

fn report(env: &Environment, g: &DissectionGraph, anchor: Point, tether: f64, opts: &Options, tasks: Vec<TaskReport>) -> Report {
    Report { map: env.name.clone(), cell_count: g.cell_count(), anchor, tether, reps: opts.reps, seed: opts.seed, tasks }
}

impl Task {
    fn new(kind: Kind) -> Self {
        Task { kind, anchor: None, tether: None, goals: vec![], start_config: None, start: None, zeta_eff: None }
    }

    fn check_bounds(&self, env: &Environment) -> CliResult<()> {
        let (lo, hi) = env.boundary().bbox();
        let pts = self
            .anchor
            .iter()
            .chain(&self.goals)
            .chain(self.start.iter())
            .chain(self.start_config.iter().flat_map(|c| c.waypoints()));
        for p in pts {
            if p.x < lo.x || p.x > hi.x || p.y < lo.y || p.y > hi.y {
                return Err(input_err(format!("{:?} task: {p} lies outside the map bounds", self.kind)));
            }
        }
        Ok(())
    }
}

pub fn run_file(env: &Environment, path: &Path, opts: &Options) -> CliResult<Report> {
    let text = std::fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    let tasks: Vec<Task> = serde_json::from_str(&text).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    let (g, anchor, tether) = setup(env, opts)?;
    for t in &tasks {
        t.check_bounds(env)?;
    }
    let idx = tcs_preprocess(&g, anchor, tether)?;
    let mut out = Vec::new();
    for t in &tasks {
        let r = if t.anchor.is_some() || t.tether.is_some() {
            let own = tcs_preprocess(&g, t.anchor.unwrap_or(anchor), t.tether.unwrap_or(tether))?;
            run_task(&g, &own, t, opts)?
        } else {
            run_task(&g, &idx, t, opts)?
        };
        out.push(r);
    }
    Ok(report(env, &g, anchor, tether, opts, out))
}

// Free point strictly inside a single cell, so it never sits on a cutline.
fn sample(g: &DissectionGraph, rng: &mut ChaCha8Rng) -> CliResult<Point> {
    let (lo, hi) = g.env().boundary().bbox();
    for _ in 0..10_000 {
        let p = Point::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
        if g.env().is_free(p) && g.cells_containing(p).count() == 1 {
            return Ok(p);
        }
    }
    Err(Failure::Internal("could not sample a free point".into()))
}

/// The generated suite: preprocessing, configuration queries, tethered
/// point-to-point and tour queries, and untethered queries.
pub fn run_default(env: &Environment, opts: &Options) -> CliResult<Report> {
    let (g, anchor, tether) = setup(env, opts)?;
    let idx = tcs_preprocess(&g, anchor, tether)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let goals = (0..opts.queries).map(|_| sample(&g, &mut rng)).collect::<CliResult<Vec<_>>>()?;

    let mut start_config = None;
    for _ in 0..1000 {
        let p = sample(&g, &mut rng)?;
        if let Some(c) = idx.configs_at(p)?.configs.into_iter().next() {
            start_config = Some(c.path);
            break;
        }
    }
    let targets = (0..3).map(|_| sample(&g, &mut rng)).collect::<CliResult<Vec<_>>>()?;
    let start = sample(&g, &mut rng)?;

    let mut tasks = vec![Task::new(Kind::Tcs), Task { goals: goals.clone(), ..Task::new(Kind::Foc) }];
    if let Some(sc) = start_config {
        tasks.push(Task { goals: goals.clone(), start_config: Some(sc.clone()), ..Task::new(Kind::Tpp) });
        tasks.push(Task { goals: targets, start_config: Some(sc), ..Task::new(Kind::Tmv) });
    }
    // The library default bound explodes on large maps; queries that need
    // more show up as infeasible.
    let zeta_eff = Some(0.75 * g.diameter());
    tasks.push(Task { goals, start: Some(start), zeta_eff, ..Task::new(Kind::Utpp) });
    let out = tasks.iter().map(|t| run_task(&g, &idx, t, opts)).collect::<CliResult<Vec<_>>>()?;
    Ok(report(env, &g, anchor, tether, opts, out))
}
