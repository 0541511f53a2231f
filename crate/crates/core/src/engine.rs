//! Measurement instruments: components, hop distances, neighborhood shells,
//! induced subgraphs and exact diameters of small graphs.
//!
//! Every routine treats the multigraph as simple: a pair is adjacent when its
//! multiplicity is at least one, and loops are ignored.

use std::collections::VecDeque;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::rng::{self, Stream};

const UNREACHED: u32 = u32::MAX;

/// Largest graph accepted by [`exact_component_diameter`] by default.
pub const DEFAULT_DIAMETER_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    label: Vec<u32>,
    sizes: Vec<usize>,
    giant_id: usize,
}

impl ComponentLabeling {
    pub fn label(&self, v: usize) -> usize {
        self.label[v] as usize
    }

    pub fn labels(&self) -> &[u32] {
        &self.label
    }

    /// Component sizes indexed by component id. Ids follow the order of each
    /// component's smallest vertex.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn giant_id(&self) -> usize {
        self.giant_id
    }

    pub fn giant_size(&self) -> usize {
        self.sizes.get(self.giant_id).copied().unwrap_or(0)
    }

    pub fn in_giant(&self, v: usize) -> bool {
        self.label[v] as usize == self.giant_id
    }

    pub fn giant_vertices(&self) -> Vec<u32> {
        (0..self.label.len() as u32)
            .filter(|&v| self.label[v as usize] as usize == self.giant_id)
            .collect()
    }
}

pub fn connected_components(graph: &MultiGraph) -> ComponentLabeling {
    let n = graph.n();
    let mut label = vec![UNREACHED; n];
    let mut sizes = Vec::new();
    let mut queue = Vec::new();
    for start in 0..n {
        if label[start] != UNREACHED {
            continue;
        }
        let id = sizes.len() as u32;
        label[start] = id;
        queue.clear();
        queue.push(start as u32);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head] as usize;
            head += 1;
            for &v in graph.adjacent(u) {
                if label[v as usize] == UNREACHED {
                    label[v as usize] = id;
                    queue.push(v);
                }
            }
        }
        sizes.push(queue.len());
    }
    let mut giant_id = 0;
    for (id, &size) in sizes.iter().enumerate() {
        if size > sizes[giant_id] {
            giant_id = id;
        }
    }
    ComponentLabeling {
        label,
        sizes,
        giant_id,
    }
}

/// Hop distances from one source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distances {
    dist: Vec<u32>,
}

impl Distances {
    /// `None` when `v` is unreachable from the source.
    pub fn get(&self, v: usize) -> Option<u32> {
        match self.dist[v] {
            UNREACHED => None,
            d => Some(d),
        }
    }

    pub fn reachable_count(&self) -> usize {
        self.dist.iter().filter(|&&d| d != UNREACHED).count()
    }

    pub fn eccentricity(&self) -> u32 {
        self.dist.iter().copied().filter(|&d| d != UNREACHED).max().unwrap_or(0)
    }
}

pub fn bfs_distances(graph: &MultiGraph, source: usize) -> Result<Distances> {
    check_vertex(graph, source)?;
    let mut dist = vec![UNREACHED; graph.n()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source as u32);
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        for &v in graph.adjacent(u as usize) {
            if dist[v as usize] == UNREACHED {
                dist[v as usize] = du + 1;
                queue.push_back(v);
            }
        }
    }
    Ok(Distances { dist })
}

fn check_vertex(graph: &MultiGraph, v: usize) -> Result<()> {
    if v < graph.n() {
        Ok(())
    } else {
        Err(Error::VertexOutOfRange { vertex: v, n: graph.n() })
    }
}

/// Reusable BFS buffers for repeated point-to-point queries.
struct PairBfs {
    dist: Vec<u32>,
    queue: Vec<u32>,
}

impl PairBfs {
    fn new(n: usize) -> Self {
        PairBfs {
            dist: vec![UNREACHED; n],
            queue: Vec::new(),
        }
    }

    /// Stops as soon as `target` is labeled.
    fn distance(&mut self, graph: &MultiGraph, source: usize, target: usize) -> Option<u32> {
        if source == target {
            return Some(0);
        }
        self.dist[source] = 0;
        self.queue.push(source as u32);
        let mut head = 0;
        let mut found = None;
        'search: while head < self.queue.len() {
            let u = self.queue[head] as usize;
            head += 1;
            let next = self.dist[u] + 1;
            for &v in graph.adjacent(u) {
                if self.dist[v as usize] == UNREACHED {
                    if v as usize == target {
                        found = Some(next);
                        break 'search;
                    }
                    self.dist[v as usize] = next;
                    self.queue.push(v);
                }
            }
        }
        for &v in &self.queue {
            self.dist[v as usize] = UNREACHED;
        }
        self.queue.clear();
        found
    }
}

/// Hop distance between two vertices, `None` when disconnected.
pub fn distance_between(graph: &MultiGraph, source: usize, target: usize) -> Result<Option<u32>> {
    check_vertex(graph, source)?;
    check_vertex(graph, target)?;
    Ok(PairBfs::new(graph.n()).distance(graph, source, target))
}

/// Exact distances between `pair_count` ordered pairs of distinct giant
/// vertices drawn uniformly with replacement from the `Pairs` stream of `seed`.
pub fn sample_giant_distances(
    graph: &MultiGraph,
    labeling: &ComponentLabeling,
    pair_count: usize,
    seed: u64,
) -> Result<Vec<u32>> {
    let giant = labeling.giant_vertices();
    if giant.len() < 2 {
        return Err(Error::GiantTooSmall { size: giant.len() });
    }
    let mut rng = rng::stream(seed, Stream::Pairs);
    let mut bfs = PairBfs::new(graph.n());
    let mut out = Vec::with_capacity(pair_count);
    for _ in 0..pair_count {
        let a = giant[rng.random_range(0..giant.len())] as usize;
        let b = loop {
            let b = giant[rng.random_range(0..giant.len())] as usize;
            if b != a {
                break b;
            }
        };
        let d = bfs
            .distance(graph, a, b)
            .expect("vertices of one component are connected");
        out.push(d);
    }
    Ok(out)
}

/// Shells `N_0 = {i0}`, `N_{k+1}` = unvisited neighbors of `N_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShellSequence {
    shells: Vec<Vec<u32>>,
}

impl ShellSequence {
    pub fn shells(&self) -> &[Vec<u32>] {
        &self.shells
    }

    /// Size of shell `k`, zero beyond the computed depth.
    pub fn size(&self, k: usize) -> usize {
        self.shells.get(k).map_or(0, Vec::len)
    }

    pub fn depth(&self) -> usize {
        self.shells.len() - 1
    }
}

/// Computes shells `0..=max_depth`, stopping early at the first empty shell
/// (which is not stored). Each shell is sorted by vertex id.
pub fn neighborhood_shells(graph: &MultiGraph, i0: usize, max_depth: usize) -> Result<ShellSequence> {
    check_vertex(graph, i0)?;
    let mut seen = vec![false; graph.n()];
    seen[i0] = true;
    let mut shells = vec![vec![i0 as u32]];
    while shells.len() <= max_depth {
        let mut next = Vec::new();
        for &u in shells.last().unwrap() {
            for &v in graph.adjacent(u as usize) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_unstable();
        shells.push(next);
    }
    Ok(ShellSequence { shells })
}

/// Sizes of shells 1 and 2 around `i0`, with scratch reused across calls.
pub(crate) struct ShellCounter {
    stamp: Vec<u32>,
    round: u32,
    frontier: Vec<u32>,
}

impl ShellCounter {
    pub(crate) fn new(n: usize) -> Self {
        ShellCounter {
            stamp: vec![0; n],
            round: 0,
            frontier: Vec::new(),
        }
    }

    pub(crate) fn first_two(&mut self, graph: &MultiGraph, i0: usize) -> (usize, usize) {
        self.round += 1;
        let r = self.round;
        self.stamp[i0] = r;
        self.frontier.clear();
        for &v in graph.adjacent(i0) {
            if self.stamp[v as usize] != r {
                self.stamp[v as usize] = r;
                self.frontier.push(v);
            }
        }
        let first = self.frontier.len();
        let mut second = 0;
        for k in 0..first {
            let u = self.frontier[k] as usize;
            for &v in graph.adjacent(u) {
                if self.stamp[v as usize] != r {
                    self.stamp[v as usize] = r;
                    second += 1;
                }
            }
        }
        (first, second)
    }
}

/// A subgraph with densely renumbered vertices. New id `k` is old vertex
/// `kept[k]`; `kept` is increasing so the renumbering preserves order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedSubgraph {
    pub graph: MultiGraph,
    pub kept: Vec<u32>,
}

impl InducedSubgraph {
    pub fn new_id(&self, old: usize) -> Option<usize> {
        self.kept.binary_search(&(old as u32)).ok()
    }

    pub fn old_id(&self, new: usize) -> usize {
        self.kept[new] as usize
    }
}

/// Keeps exactly the edges with both endpoints in `keep`. Duplicates in
/// `keep` are ignored; out-of-range vertices are an error.
pub fn induced_subgraph(graph: &MultiGraph, keep: &[u32]) -> Result<InducedSubgraph> {
    let n = graph.n();
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&v) = kept.last() {
        check_vertex(graph, v as usize)?;
    }
    let mut new_id = vec![UNREACHED; n];
    for (k, &v) in kept.iter().enumerate() {
        new_id[v as usize] = k as u32;
    }
    let mut offsets = Vec::with_capacity(kept.len() + 1);
    offsets.push(0);
    let mut neighbors = Vec::new();
    let mut multiplicities = Vec::new();
    for &v in &kept {
        for (u, m) in graph.entries(v as usize) {
            let id = new_id[u];
            if id != UNREACHED {
                neighbors.push(id);
                multiplicities.push(m);
            }
        }
        offsets.push(neighbors.len());
    }
    Ok(InducedSubgraph {
        graph: MultiGraph::from_csr(offsets, neighbors, multiplicities),
        kept,
    })
}

/// Maximum eccentricity inside the largest component; 0 for an empty or
/// single-vertex component. Runs one BFS per giant vertex.
pub fn exact_component_diameter(graph: &MultiGraph) -> Result<u32> {
    exact_component_diameter_with_cap(graph, DEFAULT_DIAMETER_CAP)
}

pub fn exact_component_diameter_with_cap(graph: &MultiGraph, cap: usize) -> Result<u32> {
    if graph.n() > cap {
        return Err(Error::SizeCapExceeded {
            operation: "exact diameter",
            n: graph.n(),
            cap,
        });
    }
    if graph.n() == 0 {
        return Ok(0);
    }
    let labeling = connected_components(graph);
    let giant = labeling.giant_vertices();
    let mut dist = vec![UNREACHED; graph.n()];
    let mut queue: Vec<u32> = Vec::with_capacity(giant.len());
    let mut diameter = 0;
    for &s in &giant {
        dist[s as usize] = 0;
        queue.push(s);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head] as usize;
            head += 1;
            let du = dist[u];
            diameter = diameter.max(du);
            for &v in graph.adjacent(u) {
                if dist[v as usize] == UNREACHED {
                    dist[v as usize] = du + 1;
                    queue.push(v);
                }
            }
        }
        for &v in &queue {
            dist[v as usize] = UNREACHED;
        }
        queue.clear();
    }
    Ok(diameter)
}
