//! The marked branching process that dominates breadth-first exploration of
//! the graph, its pruning into the exploration itself, first contact with the
//! core, and aggregated-capacity concentration ratios.

use std::collections::HashSet;

use rand::Rng;
use serde::Serialize;

use crate::alias::AliasTable;
use crate::capacity::{mean_capacity, CapacitySequence, SelectionDistribution};
use crate::engine::ShellCounter;
use crate::error::{invalid, Error, Result};
use crate::generator::{generate_fast_with, poisson};
use crate::rng::{self, replication_seed, Stream};
use crate::stats::total_variation;
use crate::structure::CoreParameters;

/// Population above which a replication is abandoned as censored.
pub const DEFAULT_POPULATION_CAP: usize = 10_000_000;

/// Generations of marks with parent links. `parents[g][i]` is the index in
/// generation `g - 1` of the parent of individual `i` of generation `g`
/// (`parents[0]` is empty).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedBranchingProcess {
    pub generations: Vec<Vec<u32>>,
    pub parents: Vec<Vec<u32>>,
    /// True when the population cap stopped the simulation early.
    pub censored: bool,
}

impl MarkedBranchingProcess {
    pub fn sizes(&self) -> Vec<usize> {
        self.generations.iter().map(Vec::len).collect()
    }

    pub fn population(&self) -> usize {
        self.generations.iter().map(Vec::len).sum()
    }
}

/// Simulates generations `0..=max_generations`.
///
/// The root mark is uniform. Given generation `n`, the next size is
/// `Poisson(Σ Λ_mark)`, fresh marks are i.i.d. from `q`, and each child is
/// attached to a parent chosen with probability proportional to the parent's
/// capacity, which makes per-parent offspring counts independent
/// `Poisson(Λ_parent)`. Stops early when a generation is empty.
pub fn simulate_marked_bp(
    caps: &CapacitySequence,
    q: &SelectionDistribution,
    max_generations: usize,
    seed: u64,
    population_cap: usize,
) -> Result<MarkedBranchingProcess> {
    if max_generations == 0 {
        return Err(invalid("max_generations", "at least one generation is required"));
    }
    let mut rng = rng::stream(seed, Stream::Branching);
    let root = rng.random_range(0..caps.n()) as u32;
    let mut generations = vec![vec![root]];
    let mut parents = vec![Vec::new()];
    let mut population = 1usize;
    let mut censored = false;
    for _ in 0..max_generations {
        let current = generations.last().unwrap();
        let weights: Vec<f64> = current.iter().map(|&m| caps.get(m as usize)).collect();
        let size = poisson(&mut rng, weights.iter().sum()) as usize;
        if population + size > population_cap {
            censored = true;
            break;
        }
        if size == 0 {
            break;
        }
        let marks: Vec<u32> = (0..size).map(|_| q.sample(&mut rng) as u32).collect();
        let attach = AliasTable::new(&weights);
        let links: Vec<u32> = (0..size).map(|_| attach.sample(&mut rng) as u32).collect();
        population += size;
        generations.push(marks);
        parents.push(links);
    }
    Ok(MarkedBranchingProcess {
        generations,
        parents,
        censored,
    })
}

/// Surviving marks per generation after pruning, in traversal order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedProcess {
    pub generations: Vec<Vec<u32>>,
}

impl ReducedProcess {
    /// The mark set of generation `k` (sorted), empty beyond the last generation.
    pub fn mark_set(&self, k: usize) -> Vec<u32> {
        let mut s = self.generations.get(k).cloned().unwrap_or_default();
        s.sort_unstable();
        s
    }

    pub fn size(&self, k: usize) -> usize {
        self.generations.get(k).map_or(0, Vec::len)
    }
}

/// Walks generation by generation in emission order and deletes every
/// individual whose mark was already seen, together with its descendants.
/// Deleted individuals do not count as seen.
pub fn prune(process: &MarkedBranchingProcess) -> ReducedProcess {
    let mut seen: HashSet<u32> = HashSet::new();
    let mut generations = Vec::with_capacity(process.generations.len());
    let mut alive_prev: Vec<bool> = Vec::new();
    for (g, marks) in process.generations.iter().enumerate() {
        let mut alive = vec![false; marks.len()];
        let mut kept = Vec::new();
        for (i, &m) in marks.iter().enumerate() {
            let parent_alive = g == 0 || alive_prev[process.parents[g][i] as usize];
            if parent_alive && seen.insert(m) {
                alive[i] = true;
                kept.push(m);
            }
        }
        generations.push(kept);
        alive_prev = alive;
    }
    while generations.len() > 1 && generations.last().is_some_and(Vec::is_empty) {
        generations.pop();
    }
    ReducedProcess { generations }
}

/// Draws i.i.d. marks from `q` until one lands in the core.
#[derive(Debug, Clone)]
pub struct CoreContactSampler {
    q: SelectionDistribution,
    in_core: Vec<bool>,
    draw_cap: usize,
}

/// Outcome of one first-contact search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoreContact {
    /// Index of the first core draw, counting from 1.
    pub draws: usize,
    pub mark: usize,
}

pub const DEFAULT_DRAW_CAP: usize = 1_000_000;

impl CoreContactSampler {
    pub fn new(caps: &CapacitySequence, core: &[u32]) -> Result<Self> {
        if core.is_empty() {
            return Err(invalid("core", "the core is empty"));
        }
        let mut in_core = vec![false; caps.n()];
        for &v in core {
            in_core[v as usize] = true;
        }
        Ok(CoreContactSampler {
            q: SelectionDistribution::new(caps),
            in_core,
            draw_cap: DEFAULT_DRAW_CAP,
        })
    }

    pub fn with_draw_cap(mut self, cap: usize) -> Self {
        self.draw_cap = cap;
        self
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<CoreContact> {
        for draws in 1..=self.draw_cap {
            let j = self.q.sample(rng);
            if self.in_core[j] {
                return Ok(CoreContact { draws, mark: j });
            }
        }
        Err(Error::Numerical {
            operation: "first core contact",
            reason: format!("no core vertex in {} draws", self.draw_cap),
        })
    }
}

/// One first-contact search against the core `T(β_{k*}, ∞)`.
pub fn first_core_contact(caps: &CapacitySequence, params: &CoreParameters, seed: u64) -> Result<CoreContact> {
    let core = crate::structure::core_vertices(caps, params);
    let sampler = CoreContactSampler::new(caps, &core)?;
    sampler.sample(&mut rng::stream(seed, Stream::Selection))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub ratio: f64,
    pub band: (f64, f64),
    pub in_band: bool,
}

fn capacity_above(caps: &CapacitySequence, exponent: f64) -> f64 {
    let threshold = exponent * (caps.n() as f64).ln();
    caps.values().iter().filter(|c| c.ln() > threshold).sum()
}

/// `Σ Λ_i 1{Λ_i > N^α} / (N^{1-(τ-2)α} E[Λ])`, reported against `(1/4, 4)`.
pub fn concentration_check(caps: &CapacitySequence, alpha: f64) -> Result<ConcentrationReport> {
    let tau = caps.tau();
    if !(alpha > 0.0 && alpha < 1.0 / (tau - 1.0)) {
        return Err(invalid("alpha", format!("{alpha} is outside (0, 1/(tau-1))")));
    }
    let n = caps.n() as f64;
    let scale = n.powf(1.0 - (tau - 2.0) * alpha) * mean_capacity(tau)?;
    let ratio = capacity_above(caps, alpha) / scale;
    let band = (0.25, 4.0);
    Ok(ConcentrationReport {
        ratio,
        band,
        in_band: ratio > band.0 && ratio < band.1,
    })
}

/// Band version: `Σ Λ_i 1{Λ_i ∈ (N^α0, N^α1]} / (N^{1-(τ-2)α0} E[Λ])`
/// against `(1/5, 5)`.
pub fn band_concentration_check(caps: &CapacitySequence, alpha0: f64, alpha1: f64) -> Result<ConcentrationReport> {
    let tau = caps.tau();
    let limit = 1.0 / (tau - 1.0);
    if !(alpha0 > 0.0 && alpha0 < alpha1 && alpha1 < limit) {
        return Err(invalid("alpha", format!("need 0 < {alpha0} < {alpha1} < {limit}")));
    }
    let n = caps.n() as f64;
    let scale = n.powf(1.0 - (tau - 2.0) * alpha0) * mean_capacity(tau)?;
    let ratio = (capacity_above(caps, alpha0) - capacity_above(caps, alpha1)) / scale;
    let band = (0.2, 5.0);
    Ok(ConcentrationReport {
        ratio,
        band,
        in_band: ratio > band.0 && ratio < band.1,
    })
}

/// `Σ Λ_i 1{Λ_i > N^{bε}} / Σ Λ_i 1{Λ_i > N^ε}`; tends to 0 for fixed `b > 1`.
pub fn low_tier_ratio(caps: &CapacitySequence, epsilon: f64, b: f64) -> Result<f64> {
    if !(b > 1.0 && epsilon > 0.0) {
        return Err(invalid("b", "need b > 1 and epsilon > 0"));
    }
    let lower = capacity_above(caps, epsilon);
    if lower == 0.0 {
        return Ok(0.0);
    }
    Ok(capacity_above(caps, b * epsilon) / lower)
}

/// Joint histogram coordinate binning for `(shell 1, shell 2)` sizes.
///
/// Sizes above [`SHELL_TRUNCATION`] are pooled into one bin. Below it, bins
/// are exact up to 4 and then grow geometrically, which keeps the number of
/// occupied cells (and the sampling noise of the TV estimate) bounded.
pub fn shell_bin(size: usize) -> u16 {
    const EDGES: [usize; 15] = [0, 1, 2, 3, 4, 5, 7, 10, 15, 22, 32, 47, 70, 104, 156];
    if size > SHELL_TRUNCATION {
        return EDGES.len() as u16;
    }
    (EDGES.partition_point(|&e| e <= size) - 1) as u16
}

pub const SHELL_TRUNCATION: usize = 200;

/// Empirical comparison of graph shells against the pruned process.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingComparison {
    pub samples: usize,
    /// `(shell 1, shell 2)` sizes around a uniform vertex of a fresh graph.
    pub graph_sizes: Vec<(u32, u32)>,
    /// `(|J_1|, |J_2|)` of a fresh pruned process.
    pub process_sizes: Vec<(u32, u32)>,
    /// TV between the binned joint laws.
    pub tv: f64,
    /// TV between the two halves of the graph sample: sampling-noise scale.
    pub graph_split_half_tv: f64,
}

pub fn binned(sizes: &[(u32, u32)]) -> Vec<(u16, u16)> {
    sizes
        .iter()
        .map(|&(a, b)| (shell_bin(a as usize), shell_bin(b as usize)))
        .collect()
}

/// Runs `samples` independent graphs and `samples` independent processes on
/// fixed capacities. Replication `r` of either side uses the seed
/// `replication_seed(seed, N, side, r)` with side 0 for graphs and 1 for the
/// process.
pub fn compare_shells_with_process(caps: &CapacitySequence, samples: usize, seed: u64) -> Result<CouplingComparison> {
    if samples < 2 {
        return Err(invalid("samples", "at least two samples per side"));
    }
    let n = caps.n();
    let q = SelectionDistribution::new(caps);
    let mut counter = ShellCounter::new(n);
    let mut graph_sizes = Vec::with_capacity(samples);
    for r in 0..samples {
        let s = replication_seed(seed, n as u64, 0, r as u64);
        let g = generate_fast_with(caps, &q, s);
        let root = rng::stream(s, Stream::RootVertex).random_range(0..n);
        let (a, b) = counter.first_two(&g, root);
        graph_sizes.push((a as u32, b as u32));
    }
    let mut process_sizes = Vec::with_capacity(samples);
    for r in 0..samples {
        let s = replication_seed(seed, n as u64, 1, r as u64);
        let bp = simulate_marked_bp(caps, &q, 2, s, DEFAULT_POPULATION_CAP)?;
        let reduced = prune(&bp);
        process_sizes.push((reduced.size(1) as u32, reduced.size(2) as u32));
    }
    let tv = total_variation(&binned(&graph_sizes), &binned(&process_sizes));
    let half = samples / 2;
    let graph_split_half_tv = total_variation(&binned(&graph_sizes[..half]), &binned(&graph_sizes[half..]));
    Ok(CouplingComparison {
        samples,
        graph_sizes,
        process_sizes,
        tv,
        graph_split_half_tv,
    })
}
