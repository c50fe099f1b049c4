use alloc::vec::Vec;

use super::evaluate::sample_instance;
use super::graph::MapfGraph;
use crate::env::{Config2, Prng};

/// Simulation timestep, seconds.
pub const FLOW_DT: f64 = 0.05;
/// Agent speed, meters per second.
pub const FLOW_SPEED: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowOutcome {
    /// Number of timesteps in which some pair of agents is closer than the
    /// radius.
    pub events: usize,
    pub agents: usize,
    pub steps: usize,
}

struct Polyline {
    points: Vec<Config2>,
    /// Arc length at each point.
    at: Vec<f64>,
}

impl Polyline {
    fn new(points: Vec<Config2>) -> Self {
        let mut at = Vec::with_capacity(points.len());
        let mut s = 0.0;
        for (i, p) in points.iter().enumerate() {
            if i > 0 {
                s += points[i - 1].distance(p);
            }
            at.push(s);
        }
        Self { points, at }
    }

    fn length(&self) -> f64 {
        self.at.last().copied().unwrap_or(0.0)
    }

    /// Point at arc length `s`; `cursor` only ever moves forward.
    fn point(&self, s: f64, cursor: &mut usize) -> Config2 {
        while *cursor + 2 < self.points.len() && self.at[*cursor + 1] <= s {
            *cursor += 1;
        }
        let (a, b) = (self.points[*cursor], self.points[(*cursor + 1).min(self.points.len() - 1)]);
        let span = self.at[(*cursor + 1).min(self.at.len() - 1)] - self.at[*cursor];
        if span <= 0.0 {
            return a;
        }
        let t = ((s - self.at[*cursor]) / span).clamp(0.0, 1.0);
        Config2::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t)
    }
}

/// Moves `agents` point agents simultaneously at constant speed along their
/// individually shortest paths and counts the timesteps in which some pair
/// is closer than `proximity_radius` (coincident agents always count). Agents vanish
/// once they reach their goal. Starts and goals are drawn from the largest
/// strongly connected component; if it is smaller than `agents`, all of its
/// vertices are used.
pub fn flow_simulate(graph: &MapfGraph, agents: usize, proximity_radius: f64, rng: &mut Prng) -> FlowOutcome {
    let count = agents.min(graph.largest_component().len());
    let Some(pairs) = sample_instance(graph, count, rng) else {
        return FlowOutcome {
            events: 0,
            agents: 0,
            steps: 0,
        };
    };
    let routes: Vec<Polyline> = pairs
        .iter()
        .map(|&(s, g)| {
            let path = graph.shortest_path(s, g).expect("component is strongly connected");
            Polyline::new(path.into_iter().map(|v| graph.position(v)).collect())
        })
        .collect();
    let longest = routes.iter().map(Polyline::length).fold(0.0, f64::max);
    let r2 = proximity_radius * proximity_radius;
    let mut cursors = alloc::vec![0usize; routes.len()];
    let mut positions: Vec<Config2> = Vec::with_capacity(routes.len());
    let mut events = 0;
    let mut steps = 0;
    loop {
        let t = steps as f64 * FLOW_DT;
        let s = t * FLOW_SPEED;
        if s >= longest {
            break;
        }
        positions.clear();
        for (route, cursor) in routes.iter().zip(&mut cursors) {
            if s < route.length() {
                positions.push(route.point(s, cursor));
            }
        }
        let close = positions.iter().enumerate().any(|(i, a)| {
            positions[i + 1..].iter().any(|b| {
                let (dx, dy) = (a.x - b.x, a.y - b.y);
                let d2 = dx * dx + dy * dy;
                d2 < r2 || d2 == 0.0
            })
        });
        events += usize::from(close);
        steps += 1;
    }
    FlowOutcome {
        events,
        agents: routes.len(),
        steps,
    }
}
