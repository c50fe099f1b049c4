//! File formats, rendering and the command line for `drm-core`.
//!
//! * [`pgm`] reads occupancy maps from portable graymaps.
//! * [`roadmap`] reads and writes the `DRMv1` roadmap format.
//! * [`tables`] writes training metrics and evaluation results as CSV.
//! * [`svg`] draws maps, roadmaps and paths.
//! * [`manifest`] records how every output was produced.
//! * [`scenario`] generates the bundled test maps.

pub mod cli;
pub mod manifest;
pub mod pgm;
pub mod roadmap;
pub mod scenario;
pub mod svg;
pub mod tables;

pub use drm_core as core;
