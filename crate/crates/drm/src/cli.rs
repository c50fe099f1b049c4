//! The `drm` command.
//!
//! Exit codes: 0 on success, 1 on any operational error, 2 when a query has
//! no path.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use drm_core::drm::harden;
use drm_core::mapf::{derive_grid, derive_udrm, evaluate, flow_simulate, summarize, EvalConfig, GraphKind, MapfGraph};
use drm_core::optim::{train_with_observer, AdamParams, TrainConfig};
use drm_core::search::{path_cost_hard, path_cost_relaxed, query_hard, query_relaxed};
use drm_core::{Config2, CostParams, OccupancyMap, Path as QueryPath, Prng, RelaxedDrm};
use rand::SeedableRng;

use crate::manifest::RunManifest;
use crate::roadmap::{self, Roadmap};
use crate::svg::Scene;
use crate::tables::{self, FlowRow};
use crate::pgm;

pub const DEFAULT_RESOLUTION: f64 = 0.01;
pub const INFEASIBLE: &str = "infeasible under edge directions";

/// Stream for the path drawn into optimization frames; kept apart from the
/// training stream so frames never change the roadmap.
const FRAME_STREAM: u64 = 0xf4a3e5;

#[derive(Debug, Parser)]
#[command(name = "drm", version, about = "Optimize directed roadmaps and evaluate them for multi-agent path finding")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a roadmap on a map and optimize it.
    Optimize(OptimizeArgs),
    /// Answer one path query on a roadmap.
    Query(QueryArgs),
    /// Multi-agent evaluation.
    #[command(subcommand)]
    Evaluate(EvaluateCommand),
    /// Render a roadmap to SVG.
    Export(ExportArgs),
}

#[derive(Debug, Subcommand)]
pub enum EvaluateCommand {
    /// Plan with RCBS on the directed, undirected and grid graphs.
    Mapf(MapfArgs),
    /// Count proximity events between point agents moving along shortest paths.
    Flow(FlowArgs),
}

#[derive(Debug, Args)]
pub struct CostArgs {
    #[arg(long, default_value_t = 3.0)]
    pub alpha_t: f64,
    #[arg(long, default_value_t = 2.0)]
    pub alpha_d: f64,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// Meters per map cell.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub resolution: f64,
    #[arg(long, default_value_t = 100)]
    pub vertices: usize,
    #[arg(long, default_value_t = 2048)]
    pub batches: usize,
    #[arg(long, default_value_t = 256)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Roadmap output (DRMv1).
    #[arg(long)]
    pub out: PathBuf,
    /// Metrics CSV; defaults to the roadmap path with a `.metrics.csv` extension.
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub retriangulate_every: usize,
    /// Held-out queries evaluated every `--eval-every` batches.
    #[arg(long, default_value_t = 256)]
    pub eval_set: usize,
    #[arg(long, default_value_t = 50)]
    pub eval_every: usize,
    #[arg(long, default_value_t = 0.0)]
    pub heuristic_weight: f64,
    #[arg(long)]
    pub frames_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    pub frame_every: usize,
    #[command(flatten)]
    pub cost: CostArgs,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long)]
    pub roadmap: PathBuf,
    /// Defaults to the resolution recorded in the roadmap.
    #[arg(long)]
    pub resolution: Option<f64>,
    /// Start as `x,y` in meters.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub start: Config2,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub goal: Config2,
    /// Search only along committed edge directions.
    #[arg(long)]
    pub hard: bool,
    #[arg(long, default_value_t = drm_core::drm::DEFAULT_TAU)]
    pub tau: f64,
    /// Defaults to 0 for relaxed queries and 1 for hard ones.
    #[arg(long)]
    pub heuristic_weight: Option<f64>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub cost: CostArgs,
}

#[derive(Debug, Args)]
pub struct MapfArgs {
    #[arg(long)]
    pub roadmap: PathBuf,
    /// Needed for the grid baseline.
    #[arg(long)]
    pub map: Option<PathBuf>,
    #[arg(long)]
    pub resolution: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "odrm,udrm,grid", value_parser = parse_kind)]
    pub graph: Vec<GraphKind>,
    #[arg(long, value_delimiter = ',', default_value = "25")]
    pub agents: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub runs: usize,
    /// Seconds per planner call.
    #[arg(long, default_value_t = 300.0)]
    pub time_limit: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = drm_core::drm::DEFAULT_TAU)]
    pub tau: f64,
    /// Per-run results CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Aggregate CSV; defaults to the results path with a `.summary.csv` extension.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    #[arg(long)]
    pub roadmap: PathBuf,
    #[arg(long)]
    pub map: Option<PathBuf>,
    #[arg(long)]
    pub resolution: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "odrm,udrm", value_parser = parse_kind)]
    pub graph: Vec<GraphKind>,
    #[arg(long, default_value_t = 50)]
    pub agents: usize,
    /// Proximity radius, meters.
    #[arg(long, default_value_t = 0.2)]
    pub radius: f64,
    /// Number of runs; run `i` uses seed `--seed + i`.
    #[arg(long, default_value_t = 30)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = drm_core::drm::DEFAULT_TAU)]
    pub tau: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub roadmap: PathBuf,
    /// Drawn underneath the roadmap when given.
    #[arg(long)]
    pub map: Option<PathBuf>,
    #[arg(long)]
    pub resolution: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_point(s: &str) -> Result<Config2, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
    let coord = |t: &str| t.trim().parse::<f64>().ok().filter(|v| v.is_finite());
    match (coord(x), coord(y)) {
        (Some(x), Some(y)) => Ok(Config2::new(x, y)),
        _ => Err(format!("expected two finite numbers, got `{s}`")),
    }
}

fn parse_kind(s: &str) -> Result<GraphKind, String> {
    GraphKind::parse(s).ok_or_else(|| format!("unknown graph kind `{s}` (odrm, udrm, grid)"))
}

/// Why a command stopped.
#[derive(Debug)]
pub enum Failure {
    /// No path exists; exit code 2.
    NoPath(String),
    Error(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Error(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::NoPath(_) => 2,
            Failure::Error(_) => 1,
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code. Reports go to `out`, diagnostics to standard error.
pub fn run<W: Write>(argv: Vec<String>, out: &mut W) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command, &argv, out) {
        Ok(()) => 0,
        Err(f) => {
            match &f {
                Failure::NoPath(reason) => eprintln!("no path: {reason}"),
                Failure::Error(e) => eprintln!("error: {e:#}"),
            }
            f.exit_code()
        }
    }
}

pub fn execute<W: Write>(command: Command, argv: &[String], out: &mut W) -> Result<(), Failure> {
    let started = Instant::now();
    let mut manifest = RunManifest::new(argv.to_vec());
    let artifacts = match command {
        Command::Optimize(a) => optimize(&a, &mut manifest, out)?,
        Command::Query(a) => query(&a, &mut manifest, out)?,
        Command::Evaluate(EvaluateCommand::Mapf(a)) => evaluate_mapf(&a, &mut manifest, out)?,
        Command::Evaluate(EvaluateCommand::Flow(a)) => evaluate_flow(&a, &mut manifest, out)?,
        Command::Export(a) => export(&a, &mut manifest)?,
    };
    manifest.duration_seconds = started.elapsed().as_secs_f64();
    for artifact in artifacts {
        manifest
            .write_next_to(&artifact)
            .with_context(|| format!("writing manifest for {}", artifact.display()))?;
    }
    Ok(())
}

fn read(path: &Path, manifest: &mut RunManifest) -> anyhow::Result<Vec<u8>> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    manifest.input(path, &bytes);
    Ok(bytes)
}

fn write(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn load_map(path: &Path, resolution: f64, manifest: &mut RunManifest) -> anyhow::Result<OccupancyMap> {
    let bytes = read(path, manifest)?;
    pgm::load_map(&bytes, resolution).with_context(|| format!("loading map {}", path.display()))
}

fn load_roadmap(path: &Path, manifest: &mut RunManifest) -> anyhow::Result<Roadmap> {
    let bytes = read(path, manifest)?;
    let text = String::from_utf8(bytes).map_err(|_| anyhow!("{}: not valid UTF-8", path.display()))?;
    roadmap::parse(&text).with_context(|| format!("parsing roadmap {}", path.display()))
}

fn cost_params(cost: &CostArgs, heuristic_weight: f64) -> anyhow::Result<CostParams> {
    let params = CostParams { alpha_t: cost.alpha_t, alpha_d: cost.alpha_d, heuristic_weight };
    params.validate()?;
    Ok(params)
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    path.with_extension(suffix)
}

fn map_id(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

fn optimize<W: Write>(a: &OptimizeArgs, manifest: &mut RunManifest, out: &mut W) -> anyhow::Result<Vec<PathBuf>> {
    let map = load_map(&a.map, a.resolution, manifest)?;
    let params = cost_params(&a.cost, a.heuristic_weight)?;
    let cfg = TrainConfig {
        batch_size: a.batch_size,
        batches: a.batches,
        retriangulate_every: a.retriangulate_every,
        eval_set_size: a.eval_set,
        eval_every: a.eval_every,
        seed: a.seed,
        adam: AdamParams::default(),
    };
    if a.frames_dir.is_some() && a.frame_every == 0 {
        bail!("--frame-every must be at least 1");
    }
    manifest.seed = Some(a.seed);
    manifest
        .param("resolution", a.resolution)
        .param("vertices", a.vertices)
        .param("batches", a.batches)
        .param("batch_size", a.batch_size)
        .param("retriangulate_every", a.retriangulate_every)
        .param("eval_set", a.eval_set)
        .param("eval_every", a.eval_every)
        .param("alpha_t", params.alpha_t)
        .param("alpha_d", params.alpha_d)
        .param("heuristic_weight", params.heuristic_weight);

    let mut frames = Vec::new();
    let mut frame_error = None;
    if let Some(dir) = &a.frames_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut frame_rng = Prng::new(a.seed, FRAME_STREAM);
    let outcome = train_with_observer(&map, a.vertices, &cfg, &params, |report, g| {
        let Some(dir) = &a.frames_dir else { return };
        if report.batch_index % a.frame_every != 0 || frame_error.is_some() {
            return;
        }
        let path = random_path(g, &map, &params, &mut frame_rng);
        let scene = Scene {
            map: Some(&map),
            graph: Some(g),
            path,
            title: Some(format!("batch {}", report.batch_index)),
        };
        let file = dir.join(format!("frame_{:06}.svg", report.batch_index));
        match write(&file, scene.render().as_bytes()) {
            Ok(()) => frames.push(file),
            Err(e) => frame_error = Some(e),
        }
    })
    .context("training failed")?;
    if let Some(e) = frame_error {
        return Err(e);
    }

    let graph = outcome.graph.with_map_ref(map_id(&a.map));
    write(&a.out, roadmap::serialize(&graph, a.resolution).as_bytes())?;
    let metrics = a.metrics.clone().unwrap_or_else(|| with_suffix(&a.out, "metrics.csv"));
    let mut buf = Vec::new();
    tables::write_metrics(&mut buf, &outcome.reports)?;
    write(&metrics, &buf)?;

    let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_owned(), |v| format!("{v:.4}"));
    writeln!(out, "roadmap: {}", a.out.display())?;
    writeln!(out, "metrics: {}", metrics.display())?;
    writeln!(out, "vertices {} edges {}", graph.vertex_count(), graph.edges().len())?;
    writeln!(out, "held-out cost: before {} after {}", fmt(outcome.initial_eval), fmt(outcome.final_eval))?;
    if !frames.is_empty() {
        writeln!(out, "frames: {}", frames.len())?;
    }
    let mut artifacts = vec![a.out.clone(), metrics];
    artifacts.extend(frames);
    Ok(artifacts)
}

/// One random relaxed query drawn for a frame; `None` if it has no answer.
fn random_path(g: &RelaxedDrm, map: &OccupancyMap, params: &CostParams, rng: &mut Prng) -> Option<Vec<Config2>> {
    let s = map.sample_one_free(rng).ok()?;
    let t = map.sample_one_free(rng).ok()?;
    let p = query_relaxed(g, map, s, t, params).ok()?;
    Some(polyline(|v| g.vertex(v), &p))
}

fn polyline(vertex: impl Fn(usize) -> Config2, p: &QueryPath) -> Vec<Config2> {
    let mut points = vec![p.start];
    points.extend(p.waypoints.iter().map(|&v| vertex(v)));
    points.push(p.goal);
    points
}

fn query<W: Write>(a: &QueryArgs, manifest: &mut RunManifest, out: &mut W) -> Result<Vec<PathBuf>, Failure> {
    let rm = load_roadmap(&a.roadmap, manifest)?;
    let resolution = a.resolution.unwrap_or(rm.resolution);
    let map = load_map(&a.map, resolution, manifest)?;
    let weight = a.heuristic_weight.unwrap_or(if a.hard { 1.0 } else { 0.0 });
    let params = cost_params(&a.cost, weight)?;
    manifest
        .param("resolution", resolution)
        .param("start", format!("{},{}", a.start.x, a.start.y))
        .param("goal", format!("{},{}", a.goal.x, a.goal.y))
        .param("hard", a.hard)
        .param("tau", a.tau)
        .param("heuristic_weight", weight);

    let g = &rm.graph;
    let hard = harden(g, a.tau);
    let found = if a.hard {
        query_hard(&hard, &map, a.start, a.goal, &params)
    } else {
        query_relaxed(g, &map, a.start, a.goal, &params)
    };
    let path = match found {
        Ok(p) => p,
        Err(drm_core::Error::Unreachable) if a.hard => return Err(Failure::NoPath(INFEASIBLE.to_owned())),
        Err(e @ (drm_core::Error::Unreachable | drm_core::Error::NoConnection(_))) => {
            return Err(Failure::NoPath(e.to_string()))
        }
        Err(e) => return Err(anyhow::Error::from(e).into()),
    };

    let relaxed = path_cost_relaxed(g, &path, &params).map_err(anyhow::Error::from)?;
    let hard_cost = path_cost_hard(&hard, &path, &params);
    let points = polyline(|v| g.vertex(v), &path);
    let ids: Vec<String> = path.waypoints.iter().map(|v| v.to_string()).collect();
    let (first, last) = (points[1.min(points.len() - 1)], points[points.len().saturating_sub(2)]);
    let io = |e: io::Error| Failure::Error(e.into());
    writeln!(out, "start {} {}", path.start.x, path.start.y).map_err(io)?;
    writeln!(out, "goal {} {}", path.goal.x, path.goal.y).map_err(io)?;
    writeln!(out, "waypoints {}", ids.join(" ")).map_err(io)?;
    writeln!(out, "start_tail {}", path.start.distance(&first)).map_err(io)?;
    writeln!(out, "goal_tail {}", last.distance(&path.goal)).map_err(io)?;
    writeln!(out, "relaxed_cost {relaxed}").map_err(io)?;
    match hard_cost {
        Some(c) => writeln!(out, "hard_cost {c}"),
        None => writeln!(out, "hard_cost {INFEASIBLE}"),
    }
    .map_err(io)?;

    let mut artifacts = Vec::new();
    if let Some(svg) = &a.svg {
        let scene = Scene { map: Some(&map), graph: Some(g), path: Some(points), title: None };
        write(svg, scene.render().as_bytes())?;
        artifacts.push(svg.clone());
    }
    Ok(artifacts)
}

/// The requested graphs, in the order asked for.
fn build_graphs(
    rm: &Roadmap,
    kinds: &[GraphKind],
    tau: f64,
    map: Option<&OccupancyMap>,
) -> anyhow::Result<Vec<MapfGraph>> {
    let hard = harden(&rm.graph, tau);
    kinds
        .iter()
        .map(|kind| match kind {
            GraphKind::OdrmHard => Ok(MapfGraph::from_hard(&hard)),
            GraphKind::Udrm => Ok(derive_udrm(&hard)),
            GraphKind::Grid => {
                let map = map.ok_or_else(|| anyhow!("the grid baseline needs --map"))?;
                Ok(derive_grid(map, rm.graph.vertex_count())?)
            }
        })
        .collect()
}

fn optional_map(
    path: Option<&Path>,
    resolution: f64,
    manifest: &mut RunManifest,
) -> anyhow::Result<Option<OccupancyMap>> {
    path.map(|p| load_map(p, resolution, manifest)).transpose()
}

fn evaluate_mapf<W: Write>(a: &MapfArgs, manifest: &mut RunManifest, out: &mut W) -> anyhow::Result<Vec<PathBuf>> {
    let rm = load_roadmap(&a.roadmap, manifest)?;
    let resolution = a.resolution.unwrap_or(rm.resolution);
    let map = optional_map(a.map.as_deref(), resolution, manifest)?;
    let graphs = build_graphs(&rm, &a.graph, a.tau, map.as_ref())?;
    let cfg = EvalConfig { agent_counts: a.agents.clone(), runs: a.runs, seed: a.seed, time_limit: a.time_limit };
    manifest.seed = Some(a.seed);
    manifest
        .param("graph", a.graph.iter().map(|k| k.name()).collect::<Vec<_>>().join(","))
        .param("agents", a.agents.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
        .param("runs", a.runs)
        .param("time_limit", a.time_limit)
        .param("tau", a.tau);

    let t0 = Instant::now();
    let clock = move || t0.elapsed().as_secs_f64();
    let refs: Vec<&MapfGraph> = graphs.iter().collect();
    let records = evaluate(&refs, &cfg, &clock);
    let rows = summarize(&records);

    let mut buf = Vec::new();
    tables::write_results(&mut buf, &records)?;
    write(&a.out, &buf)?;
    let summary = a.summary.clone().unwrap_or_else(|| with_suffix(&a.out, "summary.csv"));
    buf.clear();
    tables::write_summary(&mut buf, &rows)?;
    write(&summary, &buf)?;

    for (kind, g) in a.graph.iter().zip(&graphs) {
        writeln!(out, "{}: {} vertices, {} arcs", kind.name(), g.vertex_count(), g.arc_count())?;
    }
    for r in &rows {
        let arrival = r.mean_avg_arrival.map_or_else(|| "-".to_owned(), |v| format!("{v:.3}"));
        writeln!(
            out,
            "{:<5} agents {:>4}  success {:>6.1}%  avg arrival {arrival}  compute {:.3}s",
            r.kind.name(),
            r.agents,
            100.0 * r.success_rate,
            r.mean_compute_seconds
        )?;
    }
    Ok(vec![a.out.clone(), summary])
}

fn evaluate_flow<W: Write>(a: &FlowArgs, manifest: &mut RunManifest, out: &mut W) -> anyhow::Result<Vec<PathBuf>> {
    if !(a.radius >= 0.0 && a.radius.is_finite()) {
        bail!("--radius must be a finite non-negative number");
    }
    let rm = load_roadmap(&a.roadmap, manifest)?;
    let resolution = a.resolution.unwrap_or(rm.resolution);
    let map = optional_map(a.map.as_deref(), resolution, manifest)?;
    let graphs = build_graphs(&rm, &a.graph, a.tau, map.as_ref())?;
    manifest.seed = Some(a.seed);
    manifest
        .param("graph", a.graph.iter().map(|k| k.name()).collect::<Vec<_>>().join(","))
        .param("agents", a.agents)
        .param("radius", a.radius)
        .param("seeds", a.seeds)
        .param("tau", a.tau);

    let mut rows = Vec::new();
    for (kind, g) in a.graph.iter().zip(&graphs) {
        for i in 0..a.seeds {
            let seed = a.seed.wrapping_add(i);
            let outcome = flow_simulate(g, a.agents, a.radius, &mut Prng::seed_from_u64(seed));
            rows.push(FlowRow { kind: *kind, radius: a.radius, seed, outcome });
        }
    }
    let mut buf = Vec::new();
    tables::write_flow(&mut buf, &rows)?;
    write(&a.out, &buf)?;
    for kind in &a.graph {
        let mut events: Vec<usize> = rows.iter().filter(|r| r.kind == *kind).map(|r| r.outcome.events).collect();
        events.sort_unstable();
        let median = events.get(events.len() / 2).copied().unwrap_or(0);
        writeln!(out, "{:<5} median events {median} over {} seeds", kind.name(), events.len())?;
    }
    Ok(vec![a.out.clone()])
}

fn export(a: &ExportArgs, manifest: &mut RunManifest) -> anyhow::Result<Vec<PathBuf>> {
    let rm = load_roadmap(&a.roadmap, manifest)?;
    let resolution = a.resolution.unwrap_or(rm.resolution);
    let map = optional_map(a.map.as_deref(), resolution, manifest)?;
    manifest.param("resolution", resolution);
    let scene = Scene { map: map.as_ref(), graph: Some(&rm.graph), path: None, title: None };
    write(&a.out, scene.render().as_bytes())?;
    Ok(vec![a.out.clone()])
}
