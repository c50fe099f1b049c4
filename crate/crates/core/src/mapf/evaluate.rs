use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;

use super::graph::{GraphKind, MapfGraph};
use super::rcbs::{rcbs, Clock, MapfInstance};
use crate::drm::VertexId;
use crate::env::Prng;

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub agent_counts: Vec<usize>,
    pub runs: usize,
    pub seed: u64,
    /// Wall-clock budget per planner call, seconds.
    pub time_limit: f64,
}

/// Outcome of one planner run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub kind: GraphKind,
    pub agents: usize,
    pub run: usize,
    pub seed: u64,
    pub success: bool,
    pub avg_arrival: Option<f64>,
    pub makespan: Option<usize>,
    pub compute_seconds: f64,
    pub conflicts_resolved: usize,
}

/// Aggregate over the runs of one (graph kind, agent count) group.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub kind: GraphKind,
    pub agents: usize,
    pub runs: usize,
    pub success_rate: f64,
    /// Mean of the per-run average arrival time over successful runs.
    pub mean_avg_arrival: Option<f64>,
    pub mean_compute_seconds: f64,
}

/// Random start and goal vertices inside the largest strongly connected
/// component, so every agent can reach its goal. Starts are distinct, goals
/// are distinct. `None` if the component has fewer than `agents` vertices.
pub fn sample_instance(graph: &MapfGraph, agents: usize, rng: &mut Prng) -> Option<Vec<(VertexId, VertexId)>> {
    let mut starts = graph.largest_component();
    if starts.len() < agents {
        return None;
    }
    let mut goals = starts.clone();
    starts.shuffle(rng);
    goals.shuffle(rng);
    Some(starts.into_iter().zip(goals).take(agents).collect())
}

/// Runs RCBS `runs` times for every graph and agent count. Run `r` uses seed
/// `cfg.seed + r` for both instance sampling and the planner's coin flips.
pub fn evaluate<C: Clock>(graphs: &[&MapfGraph], cfg: &EvalConfig, clock: &C) -> Vec<RunRecord> {
    let mut records = Vec::new();
    for graph in graphs {
        for &agents in &cfg.agent_counts {
            for run in 0..cfg.runs {
                let seed = cfg.seed.wrapping_add(run as u64);
                let mut rng = Prng::seed_from_u64(seed);
                let started = clock.seconds();
                let outcome = sample_instance(graph, agents, &mut rng).map(|pairs| {
                    let instance = MapfInstance::new(graph, pairs).expect("sampled instance is valid");
                    rcbs(&instance, &mut rng, clock, cfg.time_limit)
                });
                let compute_seconds = clock.seconds() - started;
                let record = match outcome {
                    Some(Ok(sol)) => RunRecord {
                        kind: graph.kind(),
                        agents,
                        run,
                        seed,
                        success: true,
                        avg_arrival: Some(sol.average_arrival_time),
                        makespan: Some(sol.makespan),
                        compute_seconds,
                        conflicts_resolved: sol.conflicts_resolved,
                    },
                    Some(Err(fail)) => RunRecord {
                        kind: graph.kind(),
                        agents,
                        run,
                        seed,
                        success: false,
                        avg_arrival: None,
                        makespan: None,
                        compute_seconds,
                        conflicts_resolved: fail.conflicts_resolved,
                    },
                    None => RunRecord {
                        kind: graph.kind(),
                        agents,
                        run,
                        seed,
                        success: false,
                        avg_arrival: None,
                        makespan: None,
                        compute_seconds,
                        conflicts_resolved: 0,
                    },
                };
                records.push(record);
            }
        }
    }
    records
}

/// Groups records by (kind, agents) in first-seen order.
pub fn summarize(records: &[RunRecord]) -> Vec<MetricsRow> {
    let mut keys: Vec<(GraphKind, usize)> = Vec::new();
    for r in records {
        if !keys.contains(&(r.kind, r.agents)) {
            keys.push((r.kind, r.agents));
        }
    }
    keys.into_iter()
        .map(|(kind, agents)| {
            let group: Vec<&RunRecord> = records.iter().filter(|r| r.kind == kind && r.agents == agents).collect();
            let runs = group.len();
            let arrivals: Vec<f64> = group.iter().filter_map(|r| r.avg_arrival).collect();
            MetricsRow {
                kind,
                agents,
                runs,
                success_rate: group.iter().filter(|r| r.success).count() as f64 / runs as f64,
                mean_avg_arrival: (!arrivals.is_empty()).then(|| arrivals.iter().sum::<f64>() / arrivals.len() as f64),
                mean_compute_seconds: group.iter().map(|r| r.compute_seconds).sum::<f64>() / runs as f64,
            }
        })
        .collect()
}
