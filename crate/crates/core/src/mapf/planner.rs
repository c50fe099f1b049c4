use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::graph::MapfGraph;
use crate::drm::VertexId;

/// What a constraint forbids for its agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Forbidden {
    /// Being at `vertex` at `time`.
    Vertex { vertex: VertexId, time: usize },
    /// Moving `from → to` during the step that ends at `time`.
    Edge { from: VertexId, to: VertexId, time: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    pub agent: usize,
    pub forbidden: Forbidden,
}

/// Search horizon for an agent: `|V| + |constraints| + agents`.
pub fn horizon(graph: &MapfGraph, constraint_count: usize, agents: usize) -> usize {
    graph.vertex_count() + constraint_count + agents
}

/// Earliest-arrival timed path from `start` to `goal` that waits or follows
/// one outgoing edge per timestep and avoids `constraints` (all assumed to
/// belong to the agent being planned). The result has one entry per
/// timestep up to and including arrival; the agent is then assumed to stay
/// at `goal` forever, so arrival is only accepted once no later vertex
/// constraint hits the goal.
pub fn plan_single(
    graph: &MapfGraph,
    start: VertexId,
    goal: VertexId,
    constraints: &[Constraint],
    horizon: usize,
) -> Option<Vec<VertexId>> {
    plan_single_avoiding(graph, start, goal, constraints, horizon, &[])
}

/// [`plan_single`], breaking ties between equally early paths by the
/// number of vertex and swap conflicts with `others` (timed paths that hold
/// their last vertex forever), then by lower predecessor id.
pub fn plan_single_avoiding(
    graph: &MapfGraph,
    start: VertexId,
    goal: VertexId,
    constraints: &[Constraint],
    horizon: usize,
    others: &[&[VertexId]],
) -> Option<Vec<VertexId>> {
    let mut vertex_blocked = BTreeSet::new();
    let mut edge_blocked = BTreeSet::new();
    let mut goal_blocked_until: Option<usize> = None;
    for c in constraints {
        match c.forbidden {
            Forbidden::Vertex { vertex, time } => {
                vertex_blocked.insert((vertex, time));
                if vertex == goal {
                    goal_blocked_until = Some(goal_blocked_until.map_or(time, |t| t.max(time)));
                }
            }
            Forbidden::Edge { from, to, time } => {
                edge_blocked.insert((from, to, time));
            }
        }
    }
    if vertex_blocked.contains(&(start, 0)) {
        return None;
    }
    let hops = graph.hops_to(goal);
    if hops[start] == usize::MAX {
        return None;
    }

    let at = |p: &[VertexId], t: usize| p[t.min(p.len() - 1)];
    let clashes = |v: VertexId, w: VertexId, t: usize| -> usize {
        others
            .iter()
            .filter(|p| !p.is_empty())
            .filter(|p| at(p, t + 1) == w || (v != w && at(p, t) == w && at(p, t + 1) == v))
            .count()
    };

    let n = graph.vertex_count();
    // parents[t][v]: predecessor of v at time t, usize::MAX if not reached
    let mut parents: Vec<Vec<usize>> = Vec::new();
    let mut layer = alloc::vec![usize::MAX; n];
    let mut score = alloc::vec![usize::MAX; n];
    layer[start] = start;
    score[start] = others.iter().filter(|p| !p.is_empty() && p[0] == start).count();
    let mut frontier = alloc::vec![start];
    let mut t = 0;
    loop {
        if layer[goal] != usize::MAX && goal_blocked_until.is_none_or(|until| until < t) {
            parents.push(layer);
            let mut path = alloc::vec![goal; t + 1];
            let mut cur = goal;
            for time in (1..=t).rev() {
                cur = parents[time][cur];
                path[time - 1] = cur;
            }
            return Some(path);
        }
        if t >= horizon || frontier.is_empty() {
            return None;
        }
        let mut next = alloc::vec![usize::MAX; n];
        let mut next_score = alloc::vec![usize::MAX; n];
        let mut next_frontier = Vec::new();
        for &v in &frontier {
            let moves = core::iter::once(v).chain(graph.successors(v).iter().copied());
            for w in moves {
                if vertex_blocked.contains(&(w, t + 1))
                    || (w != v && edge_blocked.contains(&(v, w, t + 1)))
                    || hops[w].saturating_add(t + 1) > horizon
                {
                    continue;
                }
                let s = score[v] + clashes(v, w, t);
                let better = next[w] == usize::MAX || s < next_score[w] || (s == next_score[w] && v < next[w]);
                if better {
                    if next[w] == usize::MAX {
                        next_frontier.push(w);
                    }
                    next[w] = v;
                    next_score[w] = s;
                }
            }
        }
        next_frontier.sort_unstable();
        parents.push(layer);
        layer = next;
        score = next_score;
        frontier = next_frontier;
        t += 1;
    }
}
