//! Directed roadmaps for multi-agent path finding.
//!
//! The crate builds roadmap graphs over 2D occupancy maps, gives every
//! undirected edge a real-valued direction scalar, and optimizes vertex
//! positions and scalars with ADAM over batches of random path queries.
//! Committing every scalar to its sign yields a directed roadmap that can be
//! compared against its undirected copy and a grid with the planners in
//! [`mapf`].
//!
//! Everything here is `no_std` with `alloc`; file formats, timing and the
//! command line live in the `drm` companion crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod delaunay;
pub mod drm;
pub mod env;
pub mod error;
pub mod mapf;
pub mod optim;
pub mod search;

pub use drm::{EdgeIndex, HardDrm, RelaxedDrm, VertexId};
pub use env::{Cell, Config2, OccupancyMap, Prng};
pub use error::Error;
pub use search::{CostParams, Path};
