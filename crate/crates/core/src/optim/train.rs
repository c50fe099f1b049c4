use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::SeedableRng;

use super::adam::{AdamParams, AdamState};
use super::gradient::{batch_gradient, flatten, variable_count};
use crate::drm::{build_relaxed, retriangulate, RelaxedDrm, VertexId};
use crate::env::{Config2, OccupancyMap, Prng};
use crate::error::{Error, Result};
use crate::search::{query_relaxed, CostParams};

/// `|d|` below this counts as an undecided edge in reports.
pub const UNDECIDED_THRESHOLD: f64 = 0.5;

/// PCG stream used for the held-out evaluation queries.
const EVAL_STREAM: u64 = 0x5eed_e7a1;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub batches: usize,
    pub retriangulate_every: usize,
    pub eval_set_size: usize,
    pub eval_every: usize,
    pub seed: u64,
    pub adam: AdamParams,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 256,
            batches: 2048,
            retriangulate_every: 1,
            eval_set_size: 256,
            eval_every: 50,
            seed: 0,
            adam: AdamParams::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidParameter("batch size must be at least 1"));
        }
        if self.retriangulate_every == 0 {
            return Err(Error::InvalidParameter("retriangulation cadence must be at least 1"));
        }
        if self.eval_every == 0 {
            return Err(Error::InvalidParameter("evaluation cadence must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchReport {
    pub batch_index: usize,
    /// Sum of relaxed path costs over the feasible queries of the batch.
    pub batch_cost: f64,
    pub feasible_queries: usize,
    pub gradient_norm: f64,
    /// Mean relaxed cost over the held-out queries, on evaluation batches.
    pub eval_cost: Option<f64>,
    /// Fraction of edges with `|d| < 0.5` in the graph the batch ran on.
    pub undecided_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub graph: RelaxedDrm,
    pub reports: Vec<BatchReport>,
    /// Held-out cost of the initial and the final graph.
    pub initial_eval: Option<f64>,
    pub final_eval: Option<f64>,
}

/// Uniform start/goal pairs over the free space.
pub fn sample_queries(map: &OccupancyMap, count: usize, rng: &mut Prng) -> Result<Vec<(Config2, Config2)>> {
    (0..count)
        .map(|_| Ok((map.sample_one_free(rng)?, map.sample_one_free(rng)?)))
        .collect()
}

/// Mean relaxed cost over the feasible queries, `None` if there are none.
pub fn evaluate_queries(
    g: &RelaxedDrm,
    map: &OccupancyMap,
    queries: &[(Config2, Config2)],
    params: &CostParams,
) -> Option<f64> {
    let costs: Vec<f64> = queries
        .iter()
        .filter_map(|&(s, t)| query_relaxed(g, map, s, t, params).ok())
        .map(|p| p.cost)
        .collect();
    (!costs.is_empty()).then(|| costs.iter().sum::<f64>() / costs.len() as f64)
}

/// Accepts each proposed position that is free and not already taken by
/// another vertex; everything else stays where it was.
pub fn project_vertices(g: &RelaxedDrm, proposed: &[Config2], map: &OccupancyMap) -> Vec<Config2> {
    let key = |p: &Config2| (p.x.to_bits(), p.y.to_bits());
    let mut taken: BTreeMap<(u64, u64), usize> = BTreeMap::new();
    for p in g.vertices() {
        *taken.entry(key(p)).or_default() += 1;
    }
    let mut out = Vec::with_capacity(proposed.len());
    for (old, new) in g.vertices().iter().zip(proposed) {
        if let Some(count) = taken.get_mut(&key(old)) {
            *count -= 1;
            if *count == 0 {
                taken.remove(&key(old));
            }
        }
        let accepted = if map.is_free(*new) && !taken.contains_key(&key(new)) {
            *new
        } else {
            *old
        };
        *taken.entry(key(&accepted)).or_default() += 1;
        out.push(accepted);
    }
    out
}

/// Runs the full optimization. See [`train_with_observer`].
pub fn train(map: &OccupancyMap, n: usize, cfg: &TrainConfig, params: &CostParams) -> Result<TrainOutcome> {
    train_with_observer(map, n, cfg, params, |_, _| {})
}

/// Builds an initial roadmap and descends the batch cost with ADAM over all
/// vertex coordinates and edge scalars. `observer` sees every batch report
/// together with the graph after that batch's update.
pub fn train_with_observer<F>(
    map: &OccupancyMap,
    n: usize,
    cfg: &TrainConfig,
    params: &CostParams,
    mut observer: F,
) -> Result<TrainOutcome>
where
    F: FnMut(&BatchReport, &RelaxedDrm),
{
    cfg.validate()?;
    params.validate()?;
    let mut rng = Prng::seed_from_u64(cfg.seed);
    let mut graph = build_relaxed(map, n, &mut rng)?;
    let mut eval_rng = Prng::new(cfg.seed, EVAL_STREAM);
    let eval_set = sample_queries(map, cfg.eval_set_size, &mut eval_rng)?;
    let initial_eval = evaluate_queries(&graph, map, &eval_set, params);

    let mut adam = AdamState::new(cfg.adam, variable_count(&graph));
    let mut reports = Vec::with_capacity(cfg.batches);
    for batch_index in 0..cfg.batches {
        let (grad, mut report) = batch_gradient(&graph, map, cfg.batch_size, params, &mut rng)?;
        report.batch_index = batch_index;
        if batch_index % cfg.eval_every == 0 {
            report.eval_cost = if batch_index == 0 {
                initial_eval
            } else {
                evaluate_queries(&graph, map, &eval_set, params)
            };
        }

        let mut vars = flatten(&graph);
        adam.step(&mut vars, &grad)?;
        let vertex_count = graph.vertex_count();
        let proposed: Vec<Config2> = vars[..2 * vertex_count]
            .chunks_exact(2)
            .map(|xy| Config2::new(xy[0], xy[1]))
            .collect();
        let positions = project_vertices(&graph, &proposed, map);
        let moved = graph
            .with_positions(positions)?
            .with_directions(&vars[2 * vertex_count..])?;
        let next = if (batch_index + 1) % cfg.retriangulate_every == 0 {
            retriangulate(&moved, map)?
        } else {
            moved.without_colliding_edges(map)
        };
        carry_moments(&mut adam, &moved, &next);
        graph = next;

        observer(&report, &graph);
        reports.push(report);
    }
    let final_eval = evaluate_queries(&graph, map, &eval_set, params);
    Ok(TrainOutcome {
        graph,
        reports,
        initial_eval,
        final_eval,
    })
}

/// Re-indexes the edge moments of `adam` from `before`'s edge list to
/// `after`'s by vertex pair; new edges start with zero moments.
fn carry_moments(adam: &mut AdamState, before: &RelaxedDrm, after: &RelaxedDrm) {
    let offset = 2 * before.vertex_count();
    let old: BTreeMap<(VertexId, VertexId), usize> = before
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| (e.pair(), offset + i))
        .collect();
    let remap = |values: &[f64]| -> Vec<f64> {
        let mut out = values[..offset].to_vec();
        out.extend(
            after
                .edges()
                .iter()
                .map(|e| old.get(&e.pair()).map_or(0.0, |&i| values[i])),
        );
        out
    };
    adam.m = remap(&adam.m);
    adam.v = remap(&adam.v);
}
