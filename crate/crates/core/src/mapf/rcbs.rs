//! Random conflict-based search: agents are planned independently, and each
//! conflict is resolved by constraining one of the two agents involved,
//! chosen by coin flip, then replanning it.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;

use super::graph::MapfGraph;
use super::planner::{horizon, plan_single_avoiding, Constraint, Forbidden};
use crate::drm::VertexId;
use crate::env::Prng;
use crate::error::{Error, Result};

/// Monotonic time source in seconds.
pub trait Clock {
    fn seconds(&self) -> f64;
}

impl<F: Fn() -> f64> Clock for F {
    fn seconds(&self) -> f64 {
        self()
    }
}

/// Agents with distinct starts and distinct goals on a graph.
#[derive(Debug, Clone)]
pub struct MapfInstance<'g> {
    pub graph: &'g MapfGraph,
    pub agents: Vec<(VertexId, VertexId)>,
}

impl<'g> MapfInstance<'g> {
    pub fn new(graph: &'g MapfGraph, agents: Vec<(VertexId, VertexId)>) -> Result<Self> {
        let n = graph.vertex_count();
        if agents.iter().any(|&(s, g)| s >= n || g >= n) {
            return Err(Error::InvalidParameter("start or goal is not a vertex"));
        }
        let mut starts: Vec<_> = agents.iter().map(|a| a.0).collect();
        let mut goals: Vec<_> = agents.iter().map(|a| a.1).collect();
        starts.sort_unstable();
        goals.sort_unstable();
        if starts.windows(2).any(|w| w[0] == w[1]) || goals.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("starts and goals must be distinct"));
        }
        Ok(Self { graph, agents })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapfSolution {
    /// Per agent, the vertex at each timestep up to its arrival.
    pub paths: Vec<Vec<VertexId>>,
    pub makespan: usize,
    pub sum_of_arrival_times: usize,
    pub average_arrival_time: f64,
    pub conflicts_resolved: usize,
}

impl MapfSolution {
    pub fn from_paths(paths: Vec<Vec<VertexId>>, conflicts_resolved: usize) -> Self {
        let arrivals: Vec<usize> = paths.iter().map(|p| arrival_time(p)).collect();
        let sum: usize = arrivals.iter().sum();
        Self {
            makespan: arrivals.iter().copied().max().unwrap_or(0),
            sum_of_arrival_times: sum,
            average_arrival_time: if arrivals.is_empty() {
                0.0
            } else {
                sum as f64 / arrivals.len() as f64
            },
            paths,
            conflicts_resolved,
        }
    }

    /// Position of `agent` at `time`, holding at the last vertex.
    pub fn position(&self, agent: usize, time: usize) -> VertexId {
        at(&self.paths[agent], time)
    }
}

/// Timestep after which the path never leaves its last vertex.
pub fn arrival_time(path: &[VertexId]) -> usize {
    let Some(&last) = path.last() else { return 0 };
    path.iter().rposition(|&v| v != last).map_or(0, |i| i + 1)
}

fn at(path: &[VertexId], time: usize) -> VertexId {
    path[time.min(path.len() - 1)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    TimeLimit,
    ReplanCascade,
    Unreachable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub reason: FailureReason,
    pub elapsed_seconds: f64,
    pub remaining_conflicts: usize,
    pub conflicts_resolved: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConflictKind {
    Vertex(VertexId),
    /// Undirected edge `{a, b}`, `a < b`.
    Edge(VertexId, VertexId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conflict {
    pub time: usize,
    pub agents: (usize, usize),
    pub kind: ConflictKind,
}

/// All conflicts at one timestep, sorted by agent pair.
fn conflicts_at(paths: &[Vec<VertexId>], time: usize) -> Vec<Conflict> {
    let mut out = Vec::new();
    let mut by_vertex: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
    for (i, p) in paths.iter().enumerate() {
        by_vertex.entry(at(p, time)).or_default().push(i);
    }
    for (v, agents) in by_vertex {
        for (k, &i) in agents.iter().enumerate() {
            for &j in &agents[k + 1..] {
                out.push(Conflict {
                    time,
                    agents: (i, j),
                    kind: ConflictKind::Vertex(v),
                });
            }
        }
    }
    if time > 0 {
        let mut by_edge: BTreeMap<(VertexId, VertexId), Vec<usize>> = BTreeMap::new();
        for (i, p) in paths.iter().enumerate() {
            let (a, b) = (at(p, time - 1), at(p, time));
            if a != b {
                by_edge.entry((a.min(b), a.max(b))).or_default().push(i);
            }
        }
        for ((a, b), agents) in by_edge {
            for (k, &i) in agents.iter().enumerate() {
                for &j in &agents[k + 1..] {
                    out.push(Conflict {
                        time,
                        agents: (i, j),
                        kind: ConflictKind::Edge(a, b),
                    });
                }
            }
        }
    }
    // vertex before edge for the same pair
    out.sort_by_key(|c| (c.agents, matches!(c.kind, ConflictKind::Edge(..))));
    out
}

fn path_horizon(paths: &[Vec<VertexId>]) -> usize {
    paths.iter().map(Vec::len).max().unwrap_or(0)
}

/// Earliest conflict, lowest agent pair first.
pub fn first_conflict(paths: &[Vec<VertexId>]) -> Option<Conflict> {
    (0..path_horizon(paths)).find_map(|t| conflicts_at(paths, t).into_iter().next())
}

pub fn count_conflicts(paths: &[Vec<VertexId>]) -> usize {
    (0..path_horizon(paths)).map(|t| conflicts_at(paths, t).len()).sum()
}

fn constraint_for(paths: &[Vec<VertexId>], conflict: &Conflict, agent: usize) -> Constraint {
    let forbidden = match conflict.kind {
        ConflictKind::Vertex(vertex) => Forbidden::Vertex {
            vertex,
            time: conflict.time,
        },
        ConflictKind::Edge(..) => Forbidden::Edge {
            from: at(&paths[agent], conflict.time - 1),
            to: at(&paths[agent], conflict.time),
            time: conflict.time,
        },
    };
    Constraint { agent, forbidden }
}

/// Solves `instance` with random conflict resolution.
///
/// Gives up when `clock` passes `time_limit` seconds after the call, or when
/// more than `10 · agents` replans come back without a path.
pub fn rcbs<C: Clock>(
    instance: &MapfInstance<'_>,
    rng: &mut Prng,
    clock: &C,
    time_limit: f64,
) -> core::result::Result<MapfSolution, Failure> {
    let graph = instance.graph;
    let agents = instance.agents.len();
    let started = clock.seconds();
    let mut constraints: Vec<Vec<Constraint>> = alloc::vec![Vec::new(); agents];
    let mut resolved = 0;
    let mut dead_ends = 0;
    let cascade_cap = 10 * agents;
    let total_constraints = |c: &[Vec<Constraint>]| c.iter().map(Vec::len).sum::<usize>();

    let plan = |agent: usize, constraints: &[Vec<Constraint>], paths: &[Vec<VertexId>]| {
        let (s, g) = instance.agents[agent];
        let h = horizon(graph, total_constraints(constraints), agents);
        let others: Vec<&[VertexId]> = paths
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != agent)
            .map(|(_, p)| p.as_slice())
            .collect();
        plan_single_avoiding(graph, s, g, &constraints[agent], h, &others)
    };

    let mut paths = Vec::with_capacity(agents);
    for a in 0..agents {
        match plan(a, &constraints, &paths) {
            Some(p) => paths.push(p),
            None => {
                return Err(Failure {
                    reason: FailureReason::Unreachable,
                    elapsed_seconds: clock.seconds() - started,
                    remaining_conflicts: 0,
                    conflicts_resolved: 0,
                })
            }
        }
    }

    loop {
        let Some(conflict) = first_conflict(&paths) else {
            return Ok(MapfSolution::from_paths(paths, resolved));
        };
        let elapsed = clock.seconds() - started;
        let fail = |reason, paths: &[Vec<VertexId>], resolved| Failure {
            reason,
            elapsed_seconds: elapsed,
            remaining_conflicts: count_conflicts(paths),
            conflicts_resolved: resolved,
        };
        if elapsed > time_limit {
            return Err(fail(FailureReason::TimeLimit, &paths, resolved));
        }

        let (i, j) = conflict.agents;
        let (chosen, other) = if rng.random_bool(0.5) { (i, j) } else { (j, i) };
        let mut replanned = false;
        for agent in [chosen, other] {
            constraints[agent].push(constraint_for(&paths, &conflict, agent));
            if let Some(p) = plan(agent, &constraints, &paths) {
                paths[agent] = p;
                replanned = true;
                break;
            }
            constraints[agent].pop();
            dead_ends += 1;
        }
        if replanned {
            resolved += 1;
        } else {
            // Neither agent can absorb the constraint: restart the chosen one.
            constraints[chosen].clear();
            if let Some(p) = plan(chosen, &constraints, &paths) {
                paths[chosen] = p;
            }
        }
        if dead_ends > cascade_cap {
            return Err(fail(FailureReason::ReplanCascade, &paths, resolved));
        }
    }
}
