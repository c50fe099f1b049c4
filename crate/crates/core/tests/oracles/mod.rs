//! Slow, obviously-correct reference implementations used by the
//! integration tests. Nothing here calls into the code under test except
//! for map primitives and graph accessors.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, VecDeque};

use drm_core::drm::{build_relaxed, harden, DEFAULT_TAU};
use drm_core::mapf::{derive_udrm, grid_with_pitch, Constraint, Forbidden, MapfGraph};
use drm_core::{Cell, Config2, OccupancyMap, Prng};
use rand::Rng;

/// Circumcenter and squared radius, `None` for (near) collinear triples.
pub fn circumcircle(a: Config2, b: Config2, c: Config2) -> Option<(Config2, f64)> {
    let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    let scale = (b.x - a.x).abs().max((c.x - a.x).abs()).max((b.y - a.y).abs()).max((c.y - a.y).abs());
    if d.abs() <= 1e-12 * scale * scale {
        return None;
    }
    let (a2, b2, c2) = (a.x * a.x + a.y * a.y, b.x * b.x + b.y * b.y, c.x * c.x + c.y * c.y);
    let ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
    let uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
    let center = Config2::new(ux, uy);
    let r2 = (a.x - ux).powi(2) + (a.y - uy).powi(2);
    Some((center, r2))
}

fn dist2(a: Config2, b: Config2) -> f64 {
    (a.x - b.x).powi(2) + (a.y - b.y).powi(2)
}

/// True if some four points lie on a common circle up to a relative
/// tolerance, in which case the Delaunay triangulation is not unique.
pub fn has_cocircular_quadruple(points: &[Config2]) -> bool {
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let Some((c, r2)) = circumcircle(points[i], points[j], points[k]) else {
                    continue;
                };
                for (l, p) in points.iter().enumerate() {
                    if l != i && l != j && l != k && (dist2(*p, c) - r2).abs() <= 1e-9 * r2 {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Delaunay edges by exhaustive search: every triangle whose circumcircle
/// contains no other point contributes its three sides.
pub fn brute_force_delaunay(points: &[Config2]) -> BTreeSet<(usize, usize)> {
    let n = points.len();
    let mut edges = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let Some((c, r2)) = circumcircle(points[i], points[j], points[k]) else {
                    continue;
                };
                let empty = points
                    .iter()
                    .enumerate()
                    .all(|(l, p)| l == i || l == j || l == k || dist2(*p, c) >= r2 * (1.0 - 1e-12));
                if empty {
                    edges.insert((i, j));
                    edges.insert((j, k));
                    edges.insert((i, k));
                }
            }
        }
    }
    edges
}

/// Tail attachment following the documented rule: the visible vertices
/// among the `k` nearest, with `k` doubling from 3 up to `min(24, n)`.
pub fn tails(vertices: &[Config2], map: &OccupancyMap, x: Config2) -> Vec<(usize, f64)> {
    let mut order: Vec<usize> = (0..vertices.len()).collect();
    order.sort_by(|&a, &b| {
        x.distance(&vertices[a])
            .partial_cmp(&x.distance(&vertices[b]))
            .unwrap()
            .then(a.cmp(&b))
    });
    let cap = 24.min(vertices.len());
    let mut k = 3.min(cap);
    loop {
        let found: Vec<(usize, f64)> = order[..k]
            .iter()
            .filter(|&&v| map.segment_free(x, vertices[v]))
            .map(|&v| (v, x.distance(&vertices[v])))
            .collect();
        if !found.is_empty() || k >= cap {
            return found;
        }
        k = (2 * k).min(cap);
    }
}

/// Quadratic-time Dijkstra over an explicit weighted digraph.
pub fn dijkstra(n: usize, arcs: &[(usize, usize, f64)], source: usize) -> Vec<f64> {
    let mut out: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(a, b, w) in arcs {
        out[a].push((b, w));
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[source] = 0.0;
    for _ in 0..n {
        let Some(u) = (0..n).filter(|&v| !done[v] && dist[v].is_finite()).min_by(|&a, &b| dist[a].partial_cmp(&dist[b]).unwrap())
        else {
            break;
        };
        done[u] = true;
        for &(v, w) in &out[u] {
            if dist[u] + w < dist[v] {
                dist[v] = dist[u] + w;
            }
        }
    }
    dist
}

/// Optimal query cost on a tail-augmented digraph whose inner arcs are
/// given; nodes `n` and `n + 1` are the start and goal configurations.
pub fn augmented_query_cost(
    vertices: &[Config2],
    map: &OccupancyMap,
    inner: &[(usize, usize, f64)],
    x_s: Config2,
    x_g: Config2,
    alpha_t: f64,
) -> Option<f64> {
    let n = vertices.len();
    let t = |r: f64| alpha_t * (r * r + r);
    let mut arcs = inner.to_vec();
    let (s, g) = (n, n + 1);
    let starts = tails(vertices, map, x_s);
    let goals = tails(vertices, map, x_g);
    if starts.is_empty() || goals.is_empty() {
        return None;
    }
    arcs.extend(starts.iter().map(|&(v, r)| (s, v, t(r))));
    arcs.extend(goals.iter().map(|&(v, r)| (v, g, t(r))));
    let cost = dijkstra(n + 2, &arcs, s)[g];
    cost.is_finite().then_some(cost)
}

/// Earliest arrival for one agent by iterative deepening over explicit move
/// sequences. Arrival at time `t` is accepted only if the goal is free of
/// vertex constraints at every later time.
pub fn brute_force_single(
    graph: &MapfGraph,
    start: usize,
    goal: usize,
    constraints: &[Constraint],
    max_time: usize,
) -> Option<usize> {
    let blocked_vertex = |v: usize, t: usize| {
        constraints
            .iter()
            .any(|c| c.forbidden == Forbidden::Vertex { vertex: v, time: t })
    };
    let blocked_edge = |a: usize, b: usize, t: usize| {
        constraints
            .iter()
            .any(|c| c.forbidden == Forbidden::Edge { from: a, to: b, time: t })
    };
    let goal_clear_after = |t: usize| {
        !constraints.iter().any(|c| matches!(c.forbidden, Forbidden::Vertex { vertex, time } if vertex == goal && time > t))
    };
    if blocked_vertex(start, 0) {
        return None;
    }
    #[allow(clippy::too_many_arguments)]
    fn walk(
        graph: &MapfGraph,
        at: usize,
        t: usize,
        limit: usize,
        goal: usize,
        ok: &dyn Fn(usize, usize, usize) -> bool,
        done: &dyn Fn(usize) -> bool,
        dead: &mut BTreeSet<(usize, usize)>,
    ) -> bool {
        if t == limit {
            return at == goal && done(t);
        }
        if dead.contains(&(at, t)) {
            return false;
        }
        let mut moves = vec![at];
        moves.extend(graph.successors(at).iter().copied());
        let found = moves
            .into_iter()
            .any(|next| ok(at, next, t + 1) && walk(graph, next, t + 1, limit, goal, ok, done, dead));
        if !found {
            dead.insert((at, t));
        }
        found
    }
    let ok = |a: usize, b: usize, t: usize| !blocked_vertex(b, t) && (a == b || !blocked_edge(a, b, t));
    (0..=max_time).find(|&limit| walk(graph, start, 0, limit, goal, &ok, &goal_clear_after, &mut BTreeSet::new()))
}

/// Minimum sum of arrival times over all conflict-free joint plans, by
/// uniform-cost search over joint positions. An agent's arrival is the time
/// from which it stays at its goal for good; finished agents keep
/// occupying their goal.
pub fn joint_optimum(graph: &MapfGraph, agents: &[(usize, usize)]) -> Option<usize> {
    type State = (Vec<usize>, Vec<bool>);
    let k = agents.len();
    let goals: Vec<usize> = agents.iter().map(|a| a.1).collect();

    // all ways to retire any subset of the agents currently at their goal
    let retire = |pos: &[usize], done: &[bool]| -> Vec<Vec<bool>> {
        let candidates: Vec<usize> = (0..k).filter(|&i| !done[i] && pos[i] == goals[i]).collect();
        (0..1usize << candidates.len())
            .map(|mask| {
                let mut d = done.to_vec();
                for (bit, &i) in candidates.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        d[i] = true;
                    }
                }
                d
            })
            .collect()
    };

    let start_pos: Vec<usize> = agents.iter().map(|a| a.0).collect();
    let mut best: HashMap<State, usize> = HashMap::new();
    let mut heap = BinaryHeap::new();
    for d in retire(&start_pos, &vec![false; k]) {
        best.insert((start_pos.clone(), d.clone()), 0);
        heap.push(std::cmp::Reverse((0usize, start_pos.clone(), d)));
    }
    while let Some(std::cmp::Reverse((cost, pos, done))) = heap.pop() {
        if best.get(&(pos.clone(), done.clone())).is_some_and(|&c| c < cost) {
            continue;
        }
        if done.iter().all(|&d| d) {
            return Some(cost);
        }
        let active = done.iter().filter(|&&d| !d).count();
        // cartesian product of per-agent moves
        let options: Vec<Vec<usize>> = (0..k)
            .map(|i| {
                if done[i] {
                    vec![pos[i]]
                } else {
                    let mut m = vec![pos[i]];
                    m.extend(graph.successors(pos[i]).iter().copied());
                    m
                }
            })
            .collect();
        let mut idx = vec![0; k];
        'product: loop {
            let next: Vec<usize> = (0..k).map(|i| options[i][idx[i]]).collect();
            if joint_move_ok(&pos, &next) {
                for d in retire(&next, &done) {
                    let c = cost + active;
                    let key = (next.clone(), d.clone());
                    if best.get(&key).is_none_or(|&old| c < old) {
                        best.insert(key, c);
                        heap.push(std::cmp::Reverse((c, next.clone(), d)));
                    }
                }
            }
            for i in 0..k {
                idx[i] += 1;
                if idx[i] < options[i].len() {
                    continue 'product;
                }
                idx[i] = 0;
            }
            break;
        }
    }
    None
}

fn joint_move_ok(from: &[usize], to: &[usize]) -> bool {
    let k = from.len();
    for i in 0..k {
        for j in i + 1..k {
            if to[i] == to[j] {
                return false;
            }
            let moving = from[i] != to[i] && from[j] != to[j];
            let same_edge = (from[i] == from[j] && to[i] == to[j]) || (from[i] == to[j] && to[i] == from[j]);
            if moving && same_edge {
                return false;
            }
        }
    }
    true
}

/// Independent vertex/edge conflict check over padded timed paths. Returns
/// a description of the first problem found.
pub fn check_paths(graph: &MapfGraph, agents: &[(usize, usize)], paths: &[Vec<usize>]) -> Result<(), String> {
    if paths.len() != agents.len() {
        return Err(format!("{} paths for {} agents", paths.len(), agents.len()));
    }
    for (i, (p, &(s, g))) in paths.iter().zip(agents).enumerate() {
        if p.first() != Some(&s) || p.last() != Some(&g) {
            return Err(format!("agent {i} does not go from {s} to {g}"));
        }
        for w in p.windows(2) {
            if w[0] != w[1] && !graph.successors(w[0]).contains(&w[1]) {
                return Err(format!("agent {i} jumps {} -> {}", w[0], w[1]));
            }
        }
    }
    let horizon = paths.iter().map(Vec::len).max().unwrap_or(0);
    let at = |p: &Vec<usize>, t: usize| p[t.min(p.len() - 1)];
    for t in 0..horizon {
        let mut seen = BTreeMap::new();
        for (i, p) in paths.iter().enumerate() {
            if let Some(j) = seen.insert(at(p, t), i) {
                return Err(format!("agents {j} and {i} share vertex {} at t={t}", at(p, t)));
            }
        }
        if t == 0 {
            continue;
        }
        for i in 0..paths.len() {
            for j in i + 1..paths.len() {
                let (a0, a1) = (at(&paths[i], t - 1), at(&paths[i], t));
                let (b0, b1) = (at(&paths[j], t - 1), at(&paths[j], t));
                if a0 != a1 && a0 == b1 && a1 == b0 {
                    return Err(format!("agents {i} and {j} swap on {a0}-{a1} at t={t}"));
                }
            }
        }
    }
    Ok(())
}

/// Undirected BFS connectivity over the symmetric closure of `graph`.
pub fn connected(graph: &MapfGraph) -> bool {
    let n = graph.vertex_count();
    if n == 0 {
        return true;
    }
    let mut adj = vec![Vec::new(); n];
    for v in 0..n {
        for &w in graph.successors(v) {
            adj[v].push(w);
            adj[w].push(v);
        }
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// A roadmap with at most 10 vertices on an open 4 m square: a hardened
/// Delaunay roadmap with random directions, its undirected copy, or a
/// coarse grid, one third each.
pub fn small_roadmap(rng: &mut Prng) -> MapfGraph {
    let map = OccupancyMap::filled(40, 40, Cell::Free, 0.1).unwrap();
    loop {
        let g = match rng.random_range(0..3) {
            kind @ (0 | 1) => {
                let n = rng.random_range(4..=10);
                let relaxed = build_relaxed(&map, n, rng).unwrap();
                let d: Vec<f64> = (0..relaxed.edges().len()).map(|_| rng.random_range(-3.0..3.0)).collect();
                let hard = harden(&relaxed.with_directions(&d).unwrap(), DEFAULT_TAU);
                if kind == 0 {
                    MapfGraph::from_hard(&hard)
                } else {
                    derive_udrm(&hard)
                }
            }
            _ => grid_with_pitch(&map, [1.0, 1.34, 1.6, 2.0][rng.random_range(0..4)]).unwrap(),
        };
        if g.vertex_count() <= 10 {
            return g;
        }
    }
}
