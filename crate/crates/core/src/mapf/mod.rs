//! Discrete multi-agent path finding on roadmaps and grids, plus a
//! continuous point-agent flow simulator.
//!
//! Agents move along one edge or wait per timestep. Two agents conflict when
//! they occupy the same vertex at the same timestep or use the same
//! undirected edge during the same step.

mod evaluate;
mod flow;
mod graph;
mod planner;
mod rcbs;
mod validate;

pub use evaluate::{evaluate, sample_instance, summarize, EvalConfig, MetricsRow, RunRecord};
pub use flow::{flow_simulate, FlowOutcome, FLOW_DT, FLOW_SPEED};
pub use graph::{derive_grid, derive_udrm, grid_pitch, grid_with_pitch, GraphKind, MapfGraph};
pub use planner::{horizon, plan_single, plan_single_avoiding, Constraint, Forbidden};
pub use rcbs::{
    arrival_time, count_conflicts, first_conflict, rcbs, Clock, Conflict, ConflictKind, Failure, FailureReason,
    MapfInstance, MapfSolution,
};
pub use validate::{validate_solution, Violation};
