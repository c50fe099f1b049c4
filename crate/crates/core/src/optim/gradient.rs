use alloc::vec::Vec;

use crate::drm::{EdgeIndex, RelaxedDrm, VertexId};
use crate::env::{OccupancyMap, Prng};
use crate::error::{Error, Result};
use crate::search::{
    direction_penalty, direction_penalty_derivative, query_relaxed, tail_cost_derivative, CostParams, Path,
};

use super::train::BatchReport;

/// Gradient of one path's relaxed cost, nonzero entries only. Entries may
/// repeat when a path revisits a vertex or edge; they add up.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PathGradient {
    pub vertices: Vec<(VertexId, [f64; 2])>,
    pub edges: Vec<(EdgeIndex, f64)>,
}

impl PathGradient {
    /// Adds into a dense vector laid out as `[x0, y0, x1, y1, …, d0, d1, …]`.
    pub fn add_to(&self, dense: &mut [f64], vertex_count: usize) {
        for &(v, [gx, gy]) in &self.vertices {
            dense[2 * v] += gx;
            dense[2 * v + 1] += gy;
        }
        for &(e, gd) in &self.edges {
            dense[2 * vertex_count + e] += gd;
        }
    }
}

/// Number of decision variables of `g`: two per vertex, one per edge.
pub fn variable_count(g: &RelaxedDrm) -> usize {
    2 * g.vertex_count() + g.edges().len()
}

/// Decision variables of `g` in the dense layout.
pub fn flatten(g: &RelaxedDrm) -> Vec<f64> {
    let mut out = Vec::with_capacity(variable_count(g));
    for p in g.vertices() {
        out.push(p.x);
        out.push(p.y);
    }
    out.extend(g.edges().iter().map(|e| e.d));
    out
}

/// Exact gradient of the relaxed path cost with the waypoint sequence held
/// fixed. Zero-length segments contribute no position gradient.
pub fn path_gradient(g: &RelaxedDrm, p: &Path, params: &CostParams) -> Result<PathGradient> {
    let (Some(&first), Some(&last)) = (p.waypoints.first(), p.waypoints.last()) else {
        return Err(Error::InvalidParameter("path needs at least one waypoint"));
    };
    let mut out = PathGradient::default();

    let mut tail = |v: VertexId, fixed: crate::env::Config2| {
        let q = g.vertex(v);
        let r = q.distance(&fixed);
        if r > 0.0 {
            let scale = tail_cost_derivative(r, params) / r;
            out.vertices.push((v, [scale * (q.x - fixed.x), scale * (q.y - fixed.y)]));
        }
    };
    tail(first, p.start);
    tail(last, p.goal);

    for w in p.waypoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (e, sign, d) = g.directed(a, b).ok_or(Error::MissingEdge(a, b))?;
        let (pa, pb) = (g.vertex(a), g.vertex(b));
        let length = pa.distance(&pb);
        if length > 0.0 {
            let scale = direction_penalty(d, params) / length;
            let (gx, gy) = (scale * (pa.x - pb.x), scale * (pa.y - pb.y));
            out.vertices.push((a, [gx, gy]));
            out.vertices.push((b, [-gx, -gy]));
        }
        out.edges.push((e, sign * length * direction_penalty_derivative(d, params)));
    }
    Ok(out)
}

/// Samples `batch_size` uniform start/goal pairs, solves each on the relaxed
/// graph and averages the path gradients over the feasible ones.
///
/// The returned report has `batch_index` 0 and no evaluation cost; the
/// training loop fills those in.
pub fn batch_gradient(
    g: &RelaxedDrm,
    map: &OccupancyMap,
    batch_size: usize,
    params: &CostParams,
    rng: &mut Prng,
) -> Result<(Vec<f64>, BatchReport)> {
    let queries = super::train::sample_queries(map, batch_size, rng)?;
    let n = g.vertex_count();
    let mut grad = alloc::vec![0.0; variable_count(g)];
    let mut batch_cost = 0.0;
    let mut feasible = 0;
    for (x_s, x_g) in queries {
        let path = match query_relaxed(g, map, x_s, x_g, params) {
            Ok(path) => path,
            Err(Error::NoConnection(_) | Error::Unreachable) => continue,
            Err(e) => return Err(e),
        };
        batch_cost += path.cost;
        feasible += 1;
        path_gradient(g, &path, params)?.add_to(&mut grad, n);
    }
    if feasible == 0 {
        return Err(Error::AllQueriesInfeasible(batch_size));
    }
    let scale = 1.0 / feasible as f64;
    grad.iter_mut().for_each(|x| *x *= scale);
    let gradient_norm = libm::sqrt(grad.iter().map(|x| x * x).sum());
    Ok((
        grad,
        BatchReport {
            batch_index: 0,
            batch_cost,
            feasible_queries: feasible,
            gradient_norm,
            eval_cost: None,
            undecided_fraction: g.undecided_fraction(super::UNDECIDED_THRESHOLD),
        },
    ))
}
