use alloc::vec::Vec;

use super::graph::MapfGraph;
use crate::drm::VertexId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    WrongAgentCount,
    EmptyPath(usize),
    WrongStart(usize),
    WrongGoal(usize),
    IllegalMove { agent: usize, time: usize },
    VertexConflict { first: usize, second: usize, time: usize },
    EdgeConflict { first: usize, second: usize, time: usize },
}

/// Checks timed paths against the graph and each other. Paths are held at
/// their last vertex after they end.
pub fn validate_solution(
    graph: &MapfGraph,
    agents: &[(VertexId, VertexId)],
    paths: &[Vec<VertexId>],
) -> Result<(), Violation> {
    if paths.len() != agents.len() {
        return Err(Violation::WrongAgentCount);
    }
    for (k, (path, &(start, goal))) in paths.iter().zip(agents).enumerate() {
        let (Some(&first), Some(&last)) = (path.first(), path.last()) else {
            return Err(Violation::EmptyPath(k));
        };
        if first != start {
            return Err(Violation::WrongStart(k));
        }
        if last != goal {
            return Err(Violation::WrongGoal(k));
        }
        for time in 1..path.len() {
            let (from, to) = (path[time - 1], path[time]);
            if from != to && !graph.successors(from).contains(&to) {
                return Err(Violation::IllegalMove { agent: k, time });
            }
        }
    }

    let end = paths.iter().map(|p| p.len()).max().unwrap_or(0);
    let pos = |k: usize, t: usize| -> VertexId {
        let p = &paths[k];
        if t < p.len() {
            p[t]
        } else {
            p[p.len() - 1]
        }
    };
    for first in 0..paths.len() {
        for second in first + 1..paths.len() {
            for time in 0..end {
                if pos(first, time) == pos(second, time) {
                    return Err(Violation::VertexConflict { first, second, time });
                }
                if time == 0 {
                    continue;
                }
                let a = [pos(first, time - 1), pos(first, time)];
                let b = [pos(second, time - 1), pos(second, time)];
                let moving = a[0] != a[1] && b[0] != b[1];
                let same = (a[0] == b[0] && a[1] == b[1]) || (a[0] == b[1] && a[1] == b[0]);
                if moving && same {
                    return Err(Violation::EdgeConflict { first, second, time });
                }
            }
        }
    }
    Ok(())
}
