//! Delaunay triangulation by a lexicographic sweep followed by Lawson edge
//! flips.
//!
//! Points are inserted in (x, y) order; each new point lies outside the
//! current hull and is fanned to every hull edge it sees. The resulting
//! triangulation is then made locally Delaunay by flipping illegal edges.
//! Exactly co-circular quadrilaterals keep the diagonal whose endpoints are
//! lexicographically smallest.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::env::Config2;
use crate::error::{Error, Result};

/// Twice the signed area of `abc`; positive when counter-clockwise.
pub fn orient(a: Config2, b: Config2, c: Config2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Positive when `d` lies strictly inside the circumcircle of the
/// counter-clockwise triangle `abc`, zero when co-circular.
pub fn incircle(a: Config2, b: Config2, c: Config2, d: Config2) -> f64 {
    let (adx, ady) = (a.x - d.x, a.y - d.y);
    let (bdx, bdy) = (b.x - d.x, b.y - d.y);
    let (cdx, cdy) = (c.x - d.x, c.y - d.y);
    (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
        + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy)
        + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady)
}

/// Undirected Delaunay edges `(u, v)` with `u < v`, sorted.
///
/// All-collinear input degenerates to the chain of consecutive points in
/// lexicographic order.
pub fn triangulate(points: &[Config2]) -> Result<Vec<(usize, usize)>> {
    let n = points.len();
    if n < 3 {
        return Err(Error::TooFewPoints(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| points[i].lex_cmp(&points[j]).then(i.cmp(&j)));
    for w in order.windows(2) {
        if points[w[0]] == points[w[1]] {
            let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
            return Err(Error::DuplicatePoint(a, b));
        }
    }

    let p = |i: usize| points[i];
    let Some(apex) = (2..n).find(|&k| orient(p(order[0]), p(order[1]), p(order[k])) != 0.0) else {
        let mut chain: Vec<(usize, usize)> = order
            .windows(2)
            .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
            .collect();
        chain.sort_unstable();
        return Ok(chain);
    };

    let mut mesh = Mesh::default();
    let ccw = orient(p(order[0]), p(order[1]), p(order[apex])) > 0.0;
    for i in 0..apex - 1 {
        let (a, b, c) = (order[i], order[i + 1], order[apex]);
        if ccw {
            mesh.insert(a, b, c);
        } else {
            mesh.insert(b, a, c);
        }
    }
    let mut hull: Vec<usize> = Vec::with_capacity(n);
    if ccw {
        hull.extend_from_slice(&order[..apex]);
        hull.push(order[apex]);
    } else {
        hull.push(order[0]);
        hull.push(order[apex]);
        hull.extend(order[1..apex].iter().rev());
    }

    for &v in &order[apex + 1..] {
        let m = hull.len();
        let visible: Vec<bool> = (0..m)
            .map(|i| orient(p(hull[i]), p(hull[(i + 1) % m]), p(v)) < 0.0)
            .collect();
        let Some(start) = (0..m).find(|&i| visible[i] && !visible[(i + m - 1) % m]) else {
            // Not reachable for sorted input; skip rather than corrupt the mesh.
            continue;
        };
        hull.rotate_left(start);
        let count = (0..m).take_while(|&i| visible[(i + start) % m]).count();
        for i in 0..count {
            mesh.insert(hull[(i + 1) % m], hull[i], v);
        }
        hull.splice(1..count, core::iter::once(v));
    }

    mesh.legalize(points);
    Ok(mesh.edges())
}

/// Triangles stored as directed half-edges `(a, b) -> c` for each
/// counter-clockwise triangle `abc`.
#[derive(Default)]
struct Mesh {
    opposite: BTreeMap<(usize, usize), usize>,
}

impl Mesh {
    fn insert(&mut self, a: usize, b: usize, c: usize) {
        self.opposite.insert((a, b), c);
        self.opposite.insert((b, c), a);
        self.opposite.insert((c, a), b);
    }

    fn remove(&mut self, a: usize, b: usize, c: usize) {
        self.opposite.remove(&(a, b));
        self.opposite.remove(&(b, c));
        self.opposite.remove(&(c, a));
    }

    fn legalize(&mut self, points: &[Config2]) {
        let mut stack: Vec<(usize, usize)> = self
            .opposite
            .keys()
            .filter(|(a, b)| a < b && self.opposite.contains_key(&(*b, *a)))
            .copied()
            .collect();
        let budget = 16 * points.len() * points.len() + 64;
        let mut flips = 0;
        while let Some((a, b)) = stack.pop() {
            let (Some(&c), Some(&d)) = (self.opposite.get(&(a, b)), self.opposite.get(&(b, a)))
            else {
                continue;
            };
            if !should_flip(points, a, b, c, d) {
                continue;
            }
            self.remove(a, b, c);
            self.remove(b, a, d);
            self.insert(a, d, c);
            self.insert(d, b, c);
            stack.extend([(a, d), (d, b), (b, c), (c, a)]);
            flips += 1;
            if flips > budget {
                break;
            }
        }
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        let set: BTreeSet<(usize, usize)> = self
            .opposite
            .keys()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        set.into_iter().collect()
    }
}

/// Edge `ab` shared by triangles `abc` and `bad` is illegal when `d` is
/// inside the circumcircle of `abc`, or co-circular and `cd` wins the tie.
fn should_flip(points: &[Config2], a: usize, b: usize, c: usize, d: usize) -> bool {
    let det = incircle(points[a], points[b], points[c], points[d]);
    if det > 0.0 {
        return true;
    }
    if det < 0.0 {
        return false;
    }
    // Flipping needs a strictly convex quadrilateral a, d, b, c.
    if orient(points[c], points[d], points[b]) <= 0.0 || orient(points[d], points[c], points[a]) <= 0.0 {
        return false;
    }
    diagonal_cmp(points, (c, d), (a, b)) == Ordering::Less
}

/// Orders diagonals by their lexicographically smaller endpoint, then the
/// larger one.
fn diagonal_cmp(points: &[Config2], x: (usize, usize), y: (usize, usize)) -> Ordering {
    let sorted = |(u, v): (usize, usize)| {
        if points[u].lex_cmp(&points[v]).is_le() {
            (points[u], points[v])
        } else {
            (points[v], points[u])
        }
    };
    let (x0, x1) = sorted(x);
    let (y0, y1) = sorted(y);
    x0.lex_cmp(&y0).then_with(|| x1.lex_cmp(&y1))
}
