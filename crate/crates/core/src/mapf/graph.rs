use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::drm::{HardDrm, VertexId};
use crate::env::{Config2, OccupancyMap};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphKind {
    OdrmHard,
    Udrm,
    Grid,
}

impl GraphKind {
    pub const ALL: [GraphKind; 3] = [GraphKind::OdrmHard, GraphKind::Udrm, GraphKind::Grid];

    pub fn name(self) -> &'static str {
        match self {
            GraphKind::OdrmHard => "odrm",
            GraphKind::Udrm => "udrm",
            GraphKind::Grid => "grid",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "odrm" => Some(GraphKind::OdrmHard),
            "udrm" => Some(GraphKind::Udrm),
            "grid" => Some(GraphKind::Grid),
            _ => None,
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Graph used by the multi-agent planners: positions plus sorted outgoing
/// neighbor lists.
#[derive(Debug, Clone, PartialEq)]
pub struct MapfGraph {
    vertices: Vec<Config2>,
    adjacency: Vec<Vec<VertexId>>,
    kind: GraphKind,
}

impl MapfGraph {
    pub fn new(vertices: Vec<Config2>, mut adjacency: Vec<Vec<VertexId>>, kind: GraphKind) -> Result<Self> {
        if adjacency.len() != vertices.len() {
            return Err(Error::DimensionMismatch {
                expected: vertices.len(),
                got: adjacency.len(),
            });
        }
        let n = vertices.len();
        for (v, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            if list.iter().any(|&w| w >= n || w == v) {
                return Err(Error::InvalidParameter("adjacency references an invalid vertex"));
            }
        }
        Ok(Self {
            vertices,
            adjacency,
            kind,
        })
    }

    /// The directed roadmap as is.
    pub fn from_hard(g: &HardDrm) -> Self {
        let adjacency = (0..g.vertex_count()).map(|v| g.successors(v).to_vec()).collect();
        Self {
            vertices: g.vertices().to_vec(),
            adjacency,
            kind: GraphKind::OdrmHard,
        }
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn vertices(&self) -> &[Config2] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn position(&self, v: VertexId) -> Config2 {
        self.vertices[v]
    }

    pub fn successors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, from: VertexId, to: VertexId) -> bool {
        self.adjacency
            .get(from)
            .is_some_and(|s| s.binary_search(&to).is_ok())
    }

    pub fn arc_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    /// Vertices of the largest strongly connected component, sorted; ties go
    /// to the component holding the smallest vertex id.
    pub fn largest_component(&self) -> Vec<VertexId> {
        let comp = self.strong_components();
        let count = comp.iter().copied().max().map_or(0, |c| c + 1);
        let mut sizes = alloc::vec![0usize; count];
        for &c in &comp {
            sizes[c] += 1;
        }
        let mut best: Option<usize> = None;
        for &c in &comp {
            if best.is_none_or(|b| sizes[c] > sizes[b]) {
                best = Some(c);
            }
        }
        match best {
            Some(b) => (0..comp.len()).filter(|&v| comp[v] == b).collect(),
            None => Vec::new(),
        }
    }

    /// Component label per vertex (Kosaraju, iterative).
    pub fn strong_components(&self) -> Vec<usize> {
        let n = self.vertices.len();
        let mut order = Vec::with_capacity(n);
        let mut seen = alloc::vec![false; n];
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut stack = alloc::vec![(root, 0usize)];
            while let Some((v, i)) = stack.last_mut() {
                if let Some(&w) = self.adjacency[*v].get(*i) {
                    *i += 1;
                    if !seen[w] {
                        seen[w] = true;
                        stack.push((w, 0));
                    }
                } else {
                    order.push(*v);
                    stack.pop();
                }
            }
        }
        let mut reverse = alloc::vec![Vec::new(); n];
        for (v, list) in self.adjacency.iter().enumerate() {
            for &w in list {
                reverse[w].push(v);
            }
        }
        let mut comp = alloc::vec![usize::MAX; n];
        let mut label = 0;
        for &root in order.iter().rev() {
            if comp[root] != usize::MAX {
                continue;
            }
            comp[root] = label;
            let mut stack = alloc::vec![root];
            while let Some(v) = stack.pop() {
                for &w in &reverse[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = label;
                        stack.push(w);
                    }
                }
            }
            label += 1;
        }
        comp
    }

    /// Hop distance from every vertex to `goal` (reverse BFS); `usize::MAX`
    /// where unreachable.
    pub fn hops_to(&self, goal: VertexId) -> Vec<usize> {
        let n = self.vertices.len();
        let mut reverse = alloc::vec![Vec::new(); n];
        for (v, list) in self.adjacency.iter().enumerate() {
            for &w in list {
                reverse[w].push(v);
            }
        }
        let mut dist = alloc::vec![usize::MAX; n];
        let mut queue = alloc::collections::VecDeque::new();
        dist[goal] = 0;
        queue.push_back(goal);
        while let Some(v) = queue.pop_front() {
            for &w in &reverse[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Euclidean shortest path (Dijkstra, lower id first on ties).
    pub fn shortest_path(&self, start: VertexId, goal: VertexId) -> Option<Vec<VertexId>> {
        #[derive(PartialEq)]
        struct Item(f64, VertexId);
        impl Eq for Item {}
        impl Ord for Item {
            fn cmp(&self, other: &Self) -> Ordering {
                other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
            }
        }
        impl PartialOrd for Item {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }

        let n = self.vertices.len();
        let mut dist = alloc::vec![f64::INFINITY; n];
        let mut parent = alloc::vec![usize::MAX; n];
        let mut heap = BinaryHeap::new();
        dist[start] = 0.0;
        heap.push(Item(0.0, start));
        while let Some(Item(d, v)) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            if v == goal {
                let mut path = alloc::vec![goal];
                let mut cur = goal;
                while cur != start {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &w in &self.adjacency[v] {
                let nd = d + self.vertices[v].distance(&self.vertices[w]);
                if nd < dist[w] {
                    dist[w] = nd;
                    parent[w] = v;
                    heap.push(Item(nd, w));
                }
            }
        }
        None
    }
}

/// Undirected copy of a hard roadmap: every arc in both directions.
pub fn derive_udrm(g: &HardDrm) -> MapfGraph {
    let mut adjacency = alloc::vec![Vec::new(); g.vertex_count()];
    for &(a, b) in g.arcs() {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    for list in &mut adjacency {
        list.sort_unstable();
        list.dedup();
    }
    MapfGraph {
        vertices: g.vertices().to_vec(),
        adjacency,
        kind: GraphKind::Udrm,
    }
}

/// Free cell-center vertices of a grid with the given pitch in meters.
fn grid_vertices(map: &OccupancyMap, pitch: f64) -> (usize, usize, Vec<Option<Config2>>) {
    let cols = libm::floor(map.width_m() / pitch + 1e-9) as usize;
    let rows = libm::floor(map.height_m() / pitch + 1e-9) as usize;
    let mut cells = Vec::with_capacity(cols * rows);
    for j in 0..rows {
        for i in 0..cols {
            let p = Config2::new((i as f64 + 0.5) * pitch, (j as f64 + 0.5) * pitch);
            cells.push(map.is_free(p).then_some(p));
        }
    }
    (cols, rows, cells)
}

fn grid_count(map: &OccupancyMap, pitch: f64) -> usize {
    grid_vertices(map, pitch).2.iter().flatten().count()
}

/// Pitch whose free grid-vertex count is within ±5% of `n_target`, or the
/// closest count found by bisection.
pub fn grid_pitch(map: &OccupancyMap, n_target: usize) -> Result<f64> {
    if n_target < 2 {
        return Err(Error::InvalidParameter("grid needs a target of at least 2 vertices"));
    }
    let target = n_target as f64;
    let within = |count: usize| libm::fabs(count as f64 - target) <= 0.05 * target;
    let free_area = map.free_cell_count() as f64 * map.resolution() * map.resolution();
    let mut best: Option<(f64, f64)> = None;
    let mut consider = |pitch: f64| -> bool {
        let count = grid_count(map, pitch);
        let miss = libm::fabs(count as f64 - target);
        if count >= 2 && best.is_none_or(|(m, _)| miss < m) {
            best = Some((miss, pitch));
        }
        count >= 2 && within(count)
    };
    let guess = libm::sqrt(free_area / target);
    if guess > 0.0 && consider(guess) {
        return Ok(guess);
    }
    let (mut lo, mut hi) = (map.resolution() * 0.5, map.width_m().max(map.height_m()));
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if consider(mid) {
            return Ok(mid);
        }
        if grid_count(map, mid) > n_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // the count is not monotone in the pitch; sweep around the guess
    if guess > 0.0 {
        const STEPS: usize = 2048;
        for k in 0..=STEPS {
            let pitch = guess * libm::exp2(2.0 * k as f64 / STEPS as f64 - 1.0);
            if consider(pitch) {
                return Ok(pitch);
            }
        }
    }
    best.map(|(_, p)| p).ok_or(Error::DegenerateGraph)
}

/// 4-connected grid at the given pitch; neighbors must both be free and
/// joined by a collision-free segment.
pub fn grid_with_pitch(map: &OccupancyMap, pitch: f64) -> Result<MapfGraph> {
    let (cols, rows, cells) = grid_vertices(map, pitch);
    let mut ids = alloc::vec![usize::MAX; cells.len()];
    let mut vertices = Vec::new();
    for (k, c) in cells.iter().enumerate() {
        if let Some(p) = c {
            ids[k] = vertices.len();
            vertices.push(*p);
        }
    }
    if vertices.len() < 2 {
        return Err(Error::DegenerateGraph);
    }
    let mut adjacency = alloc::vec![Vec::new(); vertices.len()];
    for j in 0..rows {
        for i in 0..cols {
            let k = j * cols + i;
            if ids[k] == usize::MAX {
                continue;
            }
            let right = (i + 1 < cols).then(|| k + 1);
            let down = (j + 1 < rows).then(|| k + cols);
            for m in [right, down].into_iter().flatten() {
                if ids[m] != usize::MAX && map.segment_free(vertices[ids[k]], vertices[ids[m]]) {
                    adjacency[ids[k]].push(ids[m]);
                    adjacency[ids[m]].push(ids[k]);
                }
            }
        }
    }
    MapfGraph::new(vertices, adjacency, GraphKind::Grid)
}

/// Grid baseline with roughly `n_target` free vertices.
pub fn derive_grid(map: &OccupancyMap, n_target: usize) -> Result<MapfGraph> {
    grid_with_pitch(map, grid_pitch(map, n_target)?)
}
