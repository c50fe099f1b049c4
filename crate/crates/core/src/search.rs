//! Path cost model and single-agent queries on relaxed and hard roadmaps.
//!
//! A path is `x_s → p_1 → … → p_K → x_g`. Tails cost
//! `T(r) = α_T (r² + r)`; an inner segment of length `L` read with scalar
//! `d` costs `L · D(d)` with `D(d) = α_D / (1 + e^d)` on the relaxed graph
//! and just `L` on the hard graph, where traversal against an arc is
//! infeasible.
//!
//! Queries attach `x_s` and `x_g` as two temporary vertices connected to
//! their nearest visible roadmap vertices and run a best-first search with
//! heuristic `w · |v − x_g|`. With `w = 0` this is uniform-cost search and
//! exact for both graphs; `w = 1` is exact on the hard graph as long as
//! `α_T ≥ 1`.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::drm::{HardDrm, RelaxedDrm, VertexId};
use crate::env::{Config2, OccupancyMap};
use crate::error::{Error, Result};

/// Nearest vertices tried first when attaching a tail.
pub const TAIL_NEIGHBORS: usize = 3;
/// Upper bound for the doubled tail neighborhood.
pub const MAX_TAIL_NEIGHBORS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams {
    pub alpha_t: f64,
    pub alpha_d: f64,
    /// Weight of the Euclidean heuristic, in `[0, 1]`.
    pub heuristic_weight: f64,
}

impl CostParams {
    /// Exact uniform-cost search for the relaxed graph.
    pub const fn relaxed() -> Self {
        Self {
            alpha_t: 3.0,
            alpha_d: 2.0,
            heuristic_weight: 0.0,
        }
    }

    /// Euclidean A* for the hard graph.
    pub const fn hard() -> Self {
        Self {
            heuristic_weight: 1.0,
            ..Self::relaxed()
        }
    }

    pub fn with_heuristic_weight(self, heuristic_weight: f64) -> Self {
        Self {
            heuristic_weight,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_t > 0.0 && self.alpha_t.is_finite()) {
            return Err(Error::InvalidParameter("alpha_T must be positive"));
        }
        if !(self.alpha_d > 0.0 && self.alpha_d.is_finite()) {
            return Err(Error::InvalidParameter("alpha_D must be positive"));
        }
        if !(0.0..=1.0).contains(&self.heuristic_weight) {
            return Err(Error::InvalidParameter("heuristic weight must lie in [0, 1]"));
        }
        Ok(())
    }
}

impl Default for CostParams {
    fn default() -> Self {
        Self::relaxed()
    }
}

/// A discrete path through a roadmap with its cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub start: Config2,
    pub goal: Config2,
    pub waypoints: Vec<VertexId>,
    pub cost: f64,
}

impl Path {
    /// Same path walked from goal to start; the cost is not recomputed.
    pub fn reversed(&self) -> Path {
        let mut waypoints = self.waypoints.clone();
        waypoints.reverse();
        Path {
            start: self.goal,
            goal: self.start,
            waypoints,
            cost: f64::NAN,
        }
    }
}

/// `D(d) = α_D / (1 + e^d)`.
pub fn direction_penalty(d: f64, params: &CostParams) -> f64 {
    params.alpha_d / (1.0 + libm::exp(d))
}

/// `D'(d) = -α_D e^d / (1 + e^d)²`, evaluated without overflow.
pub fn direction_penalty_derivative(d: f64, params: &CostParams) -> f64 {
    let e = libm::exp(-libm::fabs(d));
    -params.alpha_d * e / ((1.0 + e) * (1.0 + e))
}

/// `T(r) = α_T (r² + r)`.
pub fn tail_cost(r: f64, params: &CostParams) -> f64 {
    params.alpha_t * (r * r + r)
}

/// `T'(r) = α_T (2r + 1)`.
pub fn tail_cost_derivative(r: f64, params: &CostParams) -> f64 {
    params.alpha_t * (2.0 * r + 1.0)
}

fn endpoints(p: &Path) -> Result<(VertexId, VertexId)> {
    match (p.waypoints.first(), p.waypoints.last()) {
        (Some(&first), Some(&last)) => Ok((first, last)),
        _ => Err(Error::InvalidParameter("path needs at least one waypoint")),
    }
}

/// Relaxed cost of `p`'s geometry on `g`.
pub fn path_cost_relaxed(g: &RelaxedDrm, p: &Path, params: &CostParams) -> Result<f64> {
    let (first, last) = endpoints(p)?;
    let mut cost = tail_cost(p.start.distance(&g.vertex(first)), params)
        + tail_cost(g.vertex(last).distance(&p.goal), params);
    for w in p.waypoints.windows(2) {
        let (_, _, d) = g.directed(w[0], w[1]).ok_or(Error::MissingEdge(w[0], w[1]))?;
        cost += g.vertex(w[0]).distance(&g.vertex(w[1])) * direction_penalty(d, params);
    }
    Ok(cost)
}

/// Hard cost of `p` on `g`, `None` when some step is not an arc.
pub fn path_cost_hard(g: &HardDrm, p: &Path, params: &CostParams) -> Option<f64> {
    let (first, last) = endpoints(p).ok()?;
    let mut cost = tail_cost(p.start.distance(&g.vertex(first)), params)
        + tail_cost(g.vertex(last).distance(&p.goal), params);
    for w in p.waypoints.windows(2) {
        if !g.has_arc(w[0], w[1]) {
            return None;
        }
        cost += g.vertex(w[0]).distance(&g.vertex(w[1]));
    }
    Some(cost)
}

/// Visible vertices among the `k` nearest to `x`, with their distances,
/// nearest first. If none of them is visible `k` doubles, up to
/// `min(24, |V|)`.
pub fn connect_tails(vertices: &[Config2], map: &OccupancyMap, x: Config2, k: usize) -> Vec<(VertexId, f64)> {
    let mut by_distance: Vec<(f64, VertexId)> = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (x.distance(v), i))
        .collect();
    by_distance.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let cap = MAX_TAIL_NEIGHBORS.max(k).min(vertices.len());
    let mut k = k.max(1).min(cap.max(1));
    let mut checked = 0;
    loop {
        let upto = k.min(by_distance.len());
        let found: Vec<(VertexId, f64)> = by_distance[checked..upto]
            .iter()
            .filter(|(_, v)| map.segment_free(x, vertices[*v]))
            .map(|&(r, v)| (v, r))
            .collect();
        if !found.is_empty() || upto >= cap {
            return found;
        }
        checked = upto;
        k = (k * 2).min(cap);
    }
}

/// Minimum relaxed-cost path from `x_s` to `x_g`; both directions of every
/// edge are expandable.
pub fn query_relaxed(
    g: &RelaxedDrm,
    map: &OccupancyMap,
    x_s: Config2,
    x_g: Config2,
    params: &CostParams,
) -> Result<Path> {
    let sources = attach(g.vertices(), map, x_s, "start")?;
    let sinks = attach(g.vertices(), map, x_g, "goal")?;
    best_first(g.vertices(), x_s, x_g, &sources, &sinks, params, |v, push| {
        let from = g.vertex(v);
        for &(w, e) in g.neighbors(v) {
            let d = if v < w { g.edges()[e].d } else { -g.edges()[e].d };
            push(w, from.distance(&g.vertex(w)) * direction_penalty(d, params));
        }
    })
}

/// Minimum hard-cost path from `x_s` to `x_g` along outgoing arcs only.
pub fn query_hard(g: &HardDrm, map: &OccupancyMap, x_s: Config2, x_g: Config2, params: &CostParams) -> Result<Path> {
    let sources = attach(g.vertices(), map, x_s, "start")?;
    let sinks = attach(g.vertices(), map, x_g, "goal")?;
    best_first(g.vertices(), x_s, x_g, &sources, &sinks, params, |v, push| {
        let from = g.vertex(v);
        for &w in g.successors(v) {
            push(w, from.distance(&g.vertex(w)));
        }
    })
}

fn attach(vertices: &[Config2], map: &OccupancyMap, x: Config2, which: &'static str) -> Result<Vec<(VertexId, f64)>> {
    let found = connect_tails(vertices, map, x, TAIL_NEIGHBORS);
    if found.is_empty() {
        Err(Error::NoConnection(which))
    } else {
        Ok(found)
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    f: f64,
    g: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    // BinaryHeap is a max-heap: smaller f, then smaller id, pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Best-first search over the roadmap plus a start node `n` and a goal node
/// `n + 1`.
fn best_first<F>(
    vertices: &[Config2],
    x_s: Config2,
    x_g: Config2,
    sources: &[(VertexId, f64)],
    sinks: &[(VertexId, f64)],
    params: &CostParams,
    mut successors: F,
) -> Result<Path>
where
    F: FnMut(VertexId, &mut dyn FnMut(VertexId, f64)),
{
    let n = vertices.len();
    let (start, goal) = (n, n + 1);
    let mut sink_cost: Vec<Option<f64>> = alloc::vec![None; n];
    for &(v, r) in sinks {
        sink_cost[v] = Some(tail_cost(r, params));
    }
    let w = params.heuristic_weight;
    let heuristic = |node: usize| -> f64 {
        if w == 0.0 || node == goal {
            0.0
        } else if node == start {
            w * x_s.distance(&x_g)
        } else {
            w * vertices[node].distance(&x_g)
        }
    };

    let mut best = alloc::vec![f64::INFINITY; n + 2];
    let mut parent = alloc::vec![usize::MAX; n + 2];
    let mut closed = alloc::vec![false; n + 2];
    let mut open = BinaryHeap::new();
    best[start] = 0.0;
    open.push(Entry {
        f: heuristic(start),
        g: 0.0,
        node: start,
    });

    while let Some(Entry { g, node, .. }) = open.pop() {
        if closed[node] || g > best[node] {
            continue;
        }
        closed[node] = true;
        if node == goal {
            let mut waypoints = Vec::new();
            let mut cur = parent[goal];
            while cur != start {
                waypoints.push(cur);
                cur = parent[cur];
            }
            waypoints.reverse();
            return Ok(Path {
                start: x_s,
                goal: x_g,
                waypoints,
                cost: g,
            });
        }
        let mut relax = |next: usize, step: f64| {
            let candidate = g + step;
            if !closed[next] && candidate < best[next] {
                best[next] = candidate;
                parent[next] = node;
                open.push(Entry {
                    f: candidate + heuristic(next),
                    g: candidate,
                    node: next,
                });
            }
        };
        if node == start {
            for &(v, r) in sources {
                relax(v, tail_cost(r, params));
            }
        } else {
            successors(node, &mut relax);
            if let Some(c) = sink_cost[node] {
                relax(goal, c);
            }
        }
    }
    Err(Error::Unreachable)
}
