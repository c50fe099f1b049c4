//! Relaxed and hard directed roadmaps.
//!
//! A [`RelaxedDrm`] stores each undirected edge once as `(u, v, d)` with
//! `u < v`. Traversing `u → v` reads `+d`, traversing `v → u` reads `-d`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::delaunay::triangulate;
use crate::env::{sample_free, Config2, OccupancyMap, Prng};
use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeIndex = usize;

/// Default threshold below which `|d|` counts as undecided when hardening.
pub const DEFAULT_TAU: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub d: f64,
}

impl Edge {
    pub fn pair(&self) -> (VertexId, VertexId) {
        (self.u, self.v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedDrm {
    vertices: Vec<Config2>,
    edges: Vec<Edge>,
    map_ref: String,
    adjacency: Vec<Vec<(VertexId, EdgeIndex)>>,
}

impl RelaxedDrm {
    /// Assembles a graph after checking its structural invariants: ids in
    /// range, `u < v`, no duplicate pairs. Geometry is checked separately by
    /// [`RelaxedDrm::check_against`].
    pub fn from_parts(vertices: Vec<Config2>, mut edges: Vec<Edge>, map_ref: String) -> Result<Self> {
        let n = vertices.len();
        edges.sort_by(|a, b| a.pair().cmp(&b.pair()));
        for (i, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n || e.u >= e.v {
                return Err(Error::InvalidParameter("edge must satisfy u < v < vertex count"));
            }
            if i > 0 && edges[i - 1].pair() == e.pair() {
                return Err(Error::InvalidParameter("duplicate edge"));
            }
            if !e.d.is_finite() {
                return Err(Error::InvalidParameter("direction scalar must be finite"));
            }
        }
        let mut adjacency = alloc::vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            adjacency[e.u].push((e.v, i));
            adjacency[e.v].push((e.u, i));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            vertices,
            edges,
            map_ref,
            adjacency,
        })
    }

    pub fn vertices(&self) -> &[Config2] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexId) -> Config2 {
        self.vertices[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Edges sorted by `(u, v)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn map_ref(&self) -> &str {
        &self.map_ref
    }

    pub fn with_map_ref(mut self, map_ref: impl Into<String>) -> Self {
        self.map_ref = map_ref.into();
        self
    }

    /// Neighbors of `v` with the connecting edge index, sorted by neighbor id.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeIndex)] {
        &self.adjacency[v]
    }

    pub fn edge_index(&self, a: VertexId, b: VertexId) -> Option<EdgeIndex> {
        let list = self.adjacency.get(a)?;
        list.binary_search_by(|(n, _)| n.cmp(&b))
            .ok()
            .map(|i| list[i].1)
    }

    /// Direction scalar as read when traversing `from → to`, with the sign
    /// (`+1` for the stored orientation) and the edge index.
    pub fn directed(&self, from: VertexId, to: VertexId) -> Option<(EdgeIndex, f64, f64)> {
        let e = self.edge_index(from, to)?;
        let sign = if from < to { 1.0 } else { -1.0 };
        Some((e, sign, sign * self.edges[e].d))
    }

    pub fn edge_length(&self, e: EdgeIndex) -> f64 {
        let edge = self.edges[e];
        self.vertices[edge.u].distance(&self.vertices[edge.v])
    }

    /// Same edges and scalars, new vertex positions.
    pub fn with_positions(&self, positions: Vec<Config2>) -> Result<Self> {
        if positions.len() != self.vertices.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vertices.len(),
                got: positions.len(),
            });
        }
        let mut g = self.clone();
        g.vertices = positions;
        Ok(g)
    }

    /// Same geometry, new direction scalars (one per edge, in edge order).
    pub fn with_directions(&self, directions: &[f64]) -> Result<Self> {
        if directions.len() != self.edges.len() {
            return Err(Error::DimensionMismatch {
                expected: self.edges.len(),
                got: directions.len(),
            });
        }
        let mut g = self.clone();
        for (e, d) in g.edges.iter_mut().zip(directions) {
            e.d = *d;
        }
        Ok(g)
    }

    /// Drops edges whose segment is no longer collision-free.
    pub fn without_colliding_edges(&self, map: &OccupancyMap) -> Self {
        let edges = self
            .edges
            .iter()
            .filter(|e| map.segment_free(self.vertices[e.u], self.vertices[e.v]))
            .copied()
            .collect();
        Self::from_parts(self.vertices.clone(), edges, self.map_ref.clone())
            .expect("subset of a valid edge set is valid")
    }

    /// Fraction of edges with `|d| < threshold`; zero for an edgeless graph.
    pub fn undecided_fraction(&self, threshold: f64) -> f64 {
        if self.edges.is_empty() {
            return 0.0;
        }
        let undecided = self.edges.iter().filter(|e| libm::fabs(e.d) < threshold).count();
        undecided as f64 / self.edges.len() as f64
    }

    /// Checks the geometric invariants against `map`: every vertex free and
    /// every edge collision-free.
    pub fn check_against(&self, map: &OccupancyMap) -> core::result::Result<(), InvariantViolation> {
        if let Some(v) = self.vertices.iter().position(|p| !map.is_free(*p)) {
            return Err(InvariantViolation::VertexNotFree(v));
        }
        if let Some(e) = self
            .edges
            .iter()
            .position(|e| !map.segment_free(self.vertices[e.u], self.vertices[e.v]))
        {
            return Err(InvariantViolation::EdgeColliding(e));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvariantViolation {
    VertexNotFree(VertexId),
    EdgeColliding(EdgeIndex),
}

/// Collision-free Delaunay edges of `vertices`. Fewer than three vertices
/// are connected pairwise.
pub fn collision_free_edges(vertices: &[Config2], map: &OccupancyMap) -> Result<Vec<(VertexId, VertexId)>> {
    let candidates = match vertices.len() {
        0 | 1 => Vec::new(),
        2 => alloc::vec![(0, 1)],
        _ => triangulate(vertices)?,
    };
    Ok(candidates
        .into_iter()
        .filter(|&(u, v)| map.segment_free(vertices[u], vertices[v]))
        .collect())
}

/// Samples `n` free vertices and connects them with collision-free Delaunay
/// edges, all scalars zero.
pub fn build_relaxed(map: &OccupancyMap, n: usize, rng: &mut Prng) -> Result<RelaxedDrm> {
    let vertices = sample_free(map, n, rng)?;
    let edges = collision_free_edges(&vertices, map)?
        .into_iter()
        .map(|(u, v)| Edge { u, v, d: 0.0 })
        .collect();
    RelaxedDrm::from_parts(vertices, edges, String::new())
}

/// Recomputes the edge set from the current vertex positions. Edges that
/// survive keep their scalar, new ones start at zero.
pub fn retriangulate(g: &RelaxedDrm, map: &OccupancyMap) -> Result<RelaxedDrm> {
    let previous: BTreeMap<(VertexId, VertexId), f64> = g.edges.iter().map(|e| (e.pair(), e.d)).collect();
    let edges = collision_free_edges(&g.vertices, map)?
        .into_iter()
        .map(|(u, v)| Edge {
            u,
            v,
            d: previous.get(&(u, v)).copied().unwrap_or(0.0),
        })
        .collect();
    RelaxedDrm::from_parts(g.vertices.clone(), edges, g.map_ref.clone())
}

/// Roadmap with committed edge directions.
#[derive(Debug, Clone, PartialEq)]
pub struct HardDrm {
    vertices: Vec<Config2>,
    arcs: Vec<(VertexId, VertexId)>,
    undecided_count: usize,
    successors: Vec<Vec<VertexId>>,
}

impl HardDrm {
    pub fn from_arcs(vertices: Vec<Config2>, mut arcs: Vec<(VertexId, VertexId)>, undecided_count: usize) -> Self {
        arcs.sort_unstable();
        arcs.dedup();
        let mut successors = alloc::vec![Vec::new(); vertices.len()];
        for &(a, b) in &arcs {
            successors[a].push(b);
        }
        Self {
            vertices,
            arcs,
            undecided_count,
            successors,
        }
    }

    pub fn vertices(&self) -> &[Config2] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexId) -> Config2 {
        self.vertices[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Directed arcs, sorted.
    pub fn arcs(&self) -> &[(VertexId, VertexId)] {
        &self.arcs
    }

    pub fn undecided_count(&self) -> usize {
        self.undecided_count
    }

    /// Outgoing neighbors of `v`, sorted.
    pub fn successors(&self, v: VertexId) -> &[VertexId] {
        &self.successors[v]
    }

    pub fn has_arc(&self, from: VertexId, to: VertexId) -> bool {
        self.successors
            .get(from)
            .is_some_and(|s| s.binary_search(&to).is_ok())
    }
}

/// Commits every edge to the sign of its scalar. Edges with `|d| < tau` keep
/// both directions and are counted as undecided.
pub fn harden(g: &RelaxedDrm, tau: f64) -> HardDrm {
    let mut arcs = Vec::with_capacity(g.edges.len() * 2);
    let mut undecided = 0;
    for e in &g.edges {
        // d = 0 stays undecided even for tau = 0
        let committed = e.d != 0.0 && libm::fabs(e.d) >= tau;
        if committed && e.d > 0.0 {
            arcs.push((e.u, e.v));
        } else if committed {
            arcs.push((e.v, e.u));
        } else {
            arcs.push((e.u, e.v));
            arcs.push((e.v, e.u));
            undecided += 1;
        }
    }
    HardDrm::from_arcs(g.vertices.clone(), arcs, undecided)
}
