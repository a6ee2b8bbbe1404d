//! The `cdt` command-line tool.

mod bench;
mod input;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cdt::geom::cost;
use cdt::oracle::funnel::funnel_shortest;
use cdt::oracle::grid_hag::{default_resolution, grid_hag_configs};
use cdt::oracle::hsig::h_signature;
use cdt::oracle::visibility::visibility_shortest;
use cdt::planners::{default_zeta_eff, tmv_search, tpp_plan, utpp_plan, utpp_preprocess_with_limit, TppQuery};
use cdt::svg::{render_svg, Layers};
use cdt::tcs::{tcs_preprocess_with_limit, IndexFile, TcsIndex, DEFAULT_MAX_ENCODINGS};
use cdt::{dissect, theta, DissectionGraph, Encoding, Point, Polyline};
use clap::{Parser, Subcommand};
use serde::Serialize;

use input::{load_env, parse_point, parse_points, parse_polyline};

#[derive(Parser, Debug)]
#[command(name = "cdt", version, about = "Tethered-robot planning over convex dissections")]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Leave timings out of the output.
    #[arg(long, global = true)]
    no_timing: bool,
    /// Seed for generated queries.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Convex dissection of a map.
    Dissect {
        map: String,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Build the tethered configuration index.
    Tcs {
        map: String,
        #[arg(long)]
        anchor: String,
        #[arg(long)]
        tether: f64,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, env = "CDT_MAX_ENCODINGS", default_value_t = DEFAULT_MAX_ENCODINGS)]
        max_encodings: usize,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// All feasible optimal tether configurations ending at a goal.
    Foc {
        index: PathBuf,
        #[arg(long)]
        goal: String,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Tethered point-to-point path.
    Tpp {
        index: PathBuf,
        /// Start tether as "x0,y0;x1,y1;...", beginning at the anchor.
        #[arg(long)]
        config: String,
        #[arg(long)]
        goal: String,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Tethered tour through ordered targets and back.
    Tmv {
        index: PathBuf,
        #[arg(long)]
        config: String,
        /// Targets as "x1,y1;x2,y2;...".
        #[arg(long)]
        targets: String,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Untethered global shortest path.
    Utpp {
        map: String,
        #[arg(long)]
        anchor: String,
        #[arg(long)]
        zeta_eff: Option<f64>,
        #[arg(long)]
        start: String,
        #[arg(long)]
        goal: String,
        #[arg(long, env = "CDT_MAX_ENCODINGS", default_value_t = DEFAULT_MAX_ENCODINGS)]
        max_encodings: usize,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Time preprocessing and queries on a map.
    Bench {
        map: String,
        /// JSON array of tasks; a seeded default suite otherwise.
        #[arg(long)]
        tasks: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        reps: usize,
        #[arg(long)]
        anchor: Option<String>,
        #[arg(long)]
        tether: Option<f64>,
        /// Generated queries per task in the default suite.
        #[arg(long, default_value_t = 10)]
        queries: usize,
    },
    #[command(subcommand, hide = true)]
    Oracle(OracleCmd),
}

#[derive(Subcommand, Debug)]
enum OracleCmd {
    Visibility {
        map: String,
        #[arg(long)]
        start: String,
        #[arg(long)]
        goal: String,
    },
    Funnel {
        map: String,
        #[arg(long)]
        start: String,
        /// Cell ids as "0,1,2".
        #[arg(long)]
        seq: String,
        #[arg(long)]
        end: String,
    },
    Hsig {
        map: String,
        #[arg(long)]
        path: String,
    },
    Hag {
        map: String,
        #[arg(long)]
        anchor: String,
        #[arg(long)]
        tether: f64,
        #[arg(long)]
        goal: String,
        #[arg(long)]
        resolution: Option<f64>,
    },
}

#[derive(Debug)]
pub(crate) enum Failure {
    Input(String),
    Infeasible(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Infeasible(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "input error: {m}"),
            Failure::Infeasible(m) => write!(f, "infeasible: {m}"),
            Failure::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<cdt::Error> for Failure {
    fn from(e: cdt::Error) -> Self {
        if e.is_infeasible() {
            Failure::Infeasible(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

pub(crate) type CliResult<T> = Result<T, Failure>;

pub(crate) fn input_err(e: impl fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

/// Runs the tool on `args` (program name first), writing results to `out`
/// and diagnostics to `err`. Returns the process exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "{f}");
            f.code()
        }
    }
}

pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

#[derive(Serialize)]
struct PathOut<'a> {
    path: &'a Polyline,
    cost: f64,
}

pub(crate) fn emit_json(out: &mut dyn Write, v: &impl Serialize) -> CliResult<()> {
    let s = serde_json::to_string(v).map_err(|e| Failure::Internal(e.to_string()))?;
    writeln!(out, "{s}").map_err(|e| Failure::Internal(e.to_string()))
}

fn say(out: &mut dyn Write, s: impl fmt::Display) -> CliResult<()> {
    writeln!(out, "{s}").map_err(|e| Failure::Internal(e.to_string()))
}

fn write_svg(path: &Option<PathBuf>, g: &DissectionGraph, layers: Layers) -> CliResult<()> {
    if let Some(p) = path {
        std::fs::write(p, render_svg(g, &layers)).map_err(|e| input_err(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn base_layers() -> Layers {
    Layers { environment: true, cells: true, cutlines: true, ..Layers::default() }
}

fn emit_path(cli: &Cli, out: &mut dyn Write, p: &Polyline) -> CliResult<()> {
    let c = cost(p);
    if cli.json {
        emit_json(out, &PathOut { path: p, cost: c })
    } else {
        say(out, format!("cost {c:.6}, {} waypoints", p.len()))?;
        for w in p.waypoints() {
            say(out, format!("  {w}"))?;
        }
        Ok(())
    }
}

fn load_index_file(path: &Path) -> CliResult<IndexFile> {
    let text = std::fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn check_ends(p: &Polyline, a: Point, b: Point) -> CliResult<()> {
    let tol = 1e-9 * (1.0 + a.norm().max(b.norm()));
    if p.first().approx_eq(a, tol) && p.last().approx_eq(b, tol) {
        Ok(())
    } else {
        Err(Failure::Internal(format!("path runs {} -> {}, expected {a} -> {b}", p.first(), p.last())))
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    match &cli.cmd {
        Cmd::Dissect { map, svg } => {
            let env = load_env(map)?;
            let g = dissect(&env)?;
            write_svg(svg, &g, base_layers())?;
            if cli.json {
                emit_json(out, &g.to_json())
            } else {
                say(out, format!("{}: {} cells, {} cutlines", env.name, g.cell_count(), g.cutlines().len()))
            }
        }
        Cmd::Tcs { map, anchor, tether, output, max_encodings, svg } => {
            let env = load_env(map)?;
            let anchor = parse_point(anchor)?;
            let g = dissect(&env)?;
            let t = Instant::now();
            let idx = tcs_preprocess_with_limit(&g, anchor, *tether, *max_encodings)?;
            let ms = t.elapsed().as_secs_f64() * 1e3;
            let file = idx.to_file();
            let text = serde_json::to_string_pretty(&file).map_err(|e| Failure::Internal(e.to_string()))?;
            std::fs::write(output, text + "\n").map_err(|e| input_err(format!("{}: {e}", output.display())))?;
            write_svg(svg, &g, Layers { anchor: Some(anchor), ..base_layers() })?;
            if cli.json {
                let mut v = serde_json::json!({
                    "cellCount": file.cell_count,
                    "encodingCount": file.encoding_count,
                });
                if !cli.no_timing {
                    v["preprocessMs"] = serde_json::json!(ms);
                }
                emit_json(out, &v)
            } else {
                let timing = if cli.no_timing { String::new() } else { format!(" in {ms:.2} ms") };
                say(out, format!("{} encodings over {} cells{timing}", file.encoding_count, file.cell_count))
            }
        }
        Cmd::Foc { index, goal, svg } => {
            let file = load_index_file(index)?;
            let goal = parse_point(goal)?;
            let g = dissect(&file.environment)?;
            let idx = TcsIndex::from_file(&g, &file)?;
            let cs = idx.configs_at(goal)?;
            for c in &cs.configs {
                check_ends(&c.path, idx.anchor(), goal)?;
            }
            let configs = cs.configs.iter().map(|c| c.path.clone()).collect();
            write_svg(svg, &g, Layers { configs, anchor: Some(idx.anchor()), ..base_layers() })?;
            if cli.json {
                emit_json(out, &cs)
            } else {
                say(out, format!("{} configurations at {goal}", cs.len()))?;
                for c in &cs.configs {
                    say(out, format!("  cost {:.6} cells {}", c.cost, c.seq))?;
                }
                Ok(())
            }
        }
        Cmd::Tpp { index, config, goal, svg } => {
            let file = load_index_file(index)?;
            let start_config = parse_polyline(config)?;
            let goal = parse_point(goal)?;
            let g = dissect(&file.environment)?;
            let idx = TcsIndex::from_file(&g, &file)?;
            let robot = start_config.last();
            let p = tpp_plan(&idx, &TppQuery { start_config: start_config.clone(), goal })?;
            check_ends(&p, robot, goal)?;
            write_svg(
                svg,
                &g,
                Layers { configs: vec![start_config], paths: vec![p.clone()], anchor: Some(idx.anchor()), ..base_layers() },
            )?;
            emit_path(cli, out, &p)
        }
        Cmd::Tmv { index, config, targets, svg } => {
            let file = load_index_file(index)?;
            let start_config = parse_polyline(config)?;
            let targets = parse_points(targets)?;
            let g = dissect(&file.environment)?;
            let idx = TcsIndex::from_file(&g, &file)?;
            let robot = start_config.last();
            let r = tmv_search(&idx, &start_config, &targets)?;
            check_ends(&r.path, robot, robot)?;
            write_svg(
                svg,
                &g,
                Layers { configs: vec![start_config], paths: vec![r.path.clone()], anchor: Some(idx.anchor()), ..base_layers() },
            )?;
            emit_path(cli, out, &r.path)
        }
        Cmd::Utpp { map, anchor, zeta_eff, start, goal, max_encodings, svg } => {
            let env = load_env(map)?;
            let (anchor, start, goal) = (parse_point(anchor)?, parse_point(start)?, parse_point(goal)?);
            let g = dissect(&env)?;
            let z = zeta_eff.unwrap_or_else(|| default_zeta_eff(&g));
            let idx = utpp_preprocess_with_limit(&g, anchor, z, *max_encodings)?;
            let p = utpp_plan(&idx, start, goal)?;
            check_ends(&p, start, goal)?;
            write_svg(svg, &g, Layers { paths: vec![p.clone()], ..base_layers() })?;
            emit_path(cli, out, &p)
        }
        Cmd::Bench { map, tasks, reps, anchor, tether, queries } => {
            let env = load_env(map)?;
            let anchor = anchor.as_deref().map(parse_point).transpose()?;
            let opts = bench::Options { reps: *reps, anchor, tether: *tether, queries: *queries, seed: cli.seed, timing: !cli.no_timing };
            let report = match tasks {
                Some(path) => bench::run_file(&env, path, &opts)?,
                None => bench::run_default(&env, &opts)?,
            };
            if cli.json {
                emit_json(out, &report)
            } else {
                say(out, report.markdown())
            }
        }
        Cmd::Oracle(o) => oracle(cli, o, out),
    }
}

fn oracle(cli: &Cli, o: &OracleCmd, out: &mut dyn Write) -> CliResult<()> {
    match o {
        OracleCmd::Visibility { map, start, goal } => {
            let env = load_env(map)?;
            let p = visibility_shortest(&env, parse_point(start)?, parse_point(goal)?)?;
            emit_path(cli, out, &p)
        }
        OracleCmd::Funnel { map, start, seq, end } => {
            let env = load_env(map)?;
            let g = dissect(&env)?;
            let ids = seq
                .split(',')
                .map(|s| s.trim().parse::<usize>().map_err(|e| input_err(format!("cell id {s:?}: {e}"))))
                .collect::<CliResult<Vec<_>>>()?;
            let e = Encoding::new(parse_point(start)?, cdt::NodeSeq::from_ids(&ids), parse_point(end)?);
            let p = funnel_shortest(&g, &e)?;
            emit_path(cli, out, &p)
        }
        OracleCmd::Hsig { map, path } => {
            let env = load_env(map)?;
            let h = h_signature(&env, &parse_polyline(path)?);
            if cli.json {
                emit_json(out, &h)
            } else {
                say(out, h)
            }
        }
        OracleCmd::Hag { map, anchor, tether, goal, resolution } => {
            let env = load_env(map)?;
            let g = dissect(&env)?;
            let (a, b) = (parse_point(anchor)?, parse_point(goal)?);
            let res = resolution.unwrap_or_else(|| default_resolution(&env));
            let classes = grid_hag_configs(&env, a, *tether, b, res)?;
            let mut rows = Vec::new();
            for c in classes {
                let taut = cost(&theta(&g, &c.path)?);
                rows.push(serde_json::json!({
                    "signature": c.signature.to_string(),
                    "gridCost": c.cost,
                    "tautCost": taut,
                }));
            }
            if cli.json {
                emit_json(out, &rows)
            } else {
                for r in rows {
                    say(out, format!("{} grid {:.6} taut {:.6}", r["signature"], r["gridCost"], r["tautCost"]))?;
                }
                Ok(())
            }
        }
    }
}
