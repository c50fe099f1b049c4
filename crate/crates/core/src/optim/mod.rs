//! Stochastic optimization of a relaxed roadmap over random path queries.

mod adam;
mod gradient;
mod train;

pub use adam::{AdamParams, AdamState};
pub use gradient::{batch_gradient, flatten, path_gradient, variable_count, PathGradient};
pub use train::{
    evaluate_queries, project_vertices, sample_queries, train, train_with_observer, BatchReport, TrainConfig,
    TrainOutcome, UNDECIDED_THRESHOLD,
};
