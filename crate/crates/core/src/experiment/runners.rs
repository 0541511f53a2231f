//! One function per experiment family. Each replication derives its seed
//! with [`replication_seed`]`(master_seed, n, gamma_index, replication)` and
//! runs independently; records come back in (n, gamma, replication) order
//! regardless of scheduling.

use std::time::Instant;

use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentKind};
use super::record::{mean_of, ExperimentRecord};
use crate::branching::{compare_shells_with_process, concentration_check, low_tier_ratio};
use crate::capacity::{sample_capacities, CapacitySequence};
use crate::engine::{
    connected_components, exact_component_diameter, induced_subgraph, sample_giant_distances, ComponentLabeling,
};
use crate::error::Result;
use crate::generator::generate_fast;
use crate::graph::MultiGraph;
use crate::rng::replication_seed;
use crate::structure::{
    delete_above, epsilon_with, robust_distance_bound_with, tier, w, CoreParameters,
};
use crate::theory::{core_removed_scale_with, giant_fraction};

/// Tolerance of the extinction fixed-point iteration used for predictions.
pub const PREDICTION_TOL: f64 = 1e-10;

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn generate(n: u64, tau: f64, seed: u64) -> Result<(CapacitySequence, MultiGraph)> {
    let caps = sample_capacities(n as usize, tau, seed)?;
    let graph = generate_fast(&caps, seed);
    Ok((caps, graph))
}

/// Distances between sampled giant pairs; an empty list when the giant has
/// fewer than two vertices.
fn giant_distances(graph: &MultiGraph, labeling: &ComponentLabeling, pairs: usize, seed: u64) -> Result<Vec<u32>> {
    if labeling.giant_size() < 2 {
        return Ok(Vec::new());
    }
    sample_giant_distances(graph, labeling, pairs, seed)
}

fn replications(config: &ExperimentConfig) -> impl ParallelIterator<Item = usize> {
    (0..config.replications).into_par_iter()
}

/// Records of a runner plus the replications that failed. A failing
/// replication is reported on stderr and skipped; the run goes on.
#[derive(Debug, Default)]
pub struct Collected {
    pub records: Vec<ExperimentRecord>,
    pub failures: Vec<String>,
}

impl Collected {
    fn absorb<T>(&mut self, results: Vec<Result<T>>, context: impl Fn(usize) -> String) -> Vec<T> {
        let mut kept = Vec::with_capacity(results.len());
        for (rep, r) in results.into_iter().enumerate() {
            match r {
                Ok(v) => kept.push(v),
                Err(e) => {
                    let msg = format!("{}: {e}", context(rep));
                    eprintln!("replication failed: {msg}");
                    self.failures.push(msg);
                }
            }
        }
        kept
    }

    fn extend(&mut self, results: Vec<Result<ExperimentRecord>>, context: impl Fn(usize) -> String) {
        let kept = self.absorb(results, context);
        self.records.extend(kept);
    }
}

pub fn run_scaling(config: &ExperimentConfig) -> Result<Collected> {
    let predicted = giant_fraction(config.tau, PREDICTION_TOL)?.giant_fraction;
    let mut out = Collected::default();
    for &n in &config.n_values {
        let params = CoreParameters::with_ell(n, config.tau, config.ell)?;
        let records: Vec<Result<_>> = replications(config)
            .map(|rep| {
                let start = Instant::now();
                let seed = replication_seed(config.master_seed, n, 0, rep as u64);
                let (_, graph) = generate(n, config.tau, seed)?;
                let labeling = connected_components(&graph);
                let mut r = ExperimentRecord::new(ExperimentKind::Scaling, n, config.tau, rep, seed);
                r.set_giant(labeling.giant_size(), graph.n());
                r.distance_samples = giant_distances(&graph, &labeling, config.pairs_per_replication, seed)?;
                r.predicted_bound = Some(2.0 * params.k_star as f64);
                r.predicted_giant_fraction = Some(predicted);
                r.wall_time_ms = millis(start);
                Ok(r)
            })
            .collect();
        out.extend(records, |rep| format!("n={n} replication {rep}"));
    }
    Ok(out)
}

/// One graph per `(n, replication)` is shared by every `γ`; the pair sample
/// for `gamma_values[j]` uses gamma index `j + 1`.
pub fn run_robustness(config: &ExperimentConfig) -> Result<Collected> {
    let mut out = Collected::default();
    for &n in &config.n_values {
        let bounds: Vec<f64> = config
            .gamma_values
            .iter()
            .map(|&g| robust_distance_bound_with(n, g, config.tau, config.ell))
            .collect::<Result<_>>()?;
        let per_rep: Vec<Result<Vec<ExperimentRecord>>> = replications(config)
            .map(|rep| {
                let start = Instant::now();
                let seed = replication_seed(config.master_seed, n, 0, rep as u64);
                let (caps, graph) = generate(n, config.tau, seed)?;
                let baseline = connected_components(&graph).giant_size();
                let setup = millis(start);
                let mut rows = Vec::with_capacity(config.gamma_values.len());
                for (j, &gamma) in config.gamma_values.iter().enumerate() {
                    let start = Instant::now();
                    let pair_seed = replication_seed(config.master_seed, n, j as u64 + 1, rep as u64);
                    let h = delete_above(&graph, &caps, gamma)?;
                    let labeling = connected_components(&h.graph);
                    let mut r = ExperimentRecord::new(ExperimentKind::Robustness, n, config.tau, rep, seed);
                    r.gamma = Some(gamma);
                    r.set_giant(labeling.giant_size(), h.graph.n());
                    r.baseline_giant_size = Some(baseline);
                    r.distance_samples = giant_distances(&h.graph, &labeling, config.pairs_per_replication, pair_seed)?;
                    r.predicted_bound = Some(bounds[j]);
                    r.wall_time_ms = millis(start) + setup / config.gamma_values.len() as f64;
                    rows.push(r);
                }
                Ok(rows)
            })
            .collect();
        let per_rep = out.absorb(per_rep, |rep| format!("n={n} replication {rep}"));
        // Emit in (gamma, replication) order.
        for j in 0..config.gamma_values.len() {
            out.records.extend(per_rep.iter().map(|rows| rows[j].clone()));
        }
    }
    Ok(out)
}

/// Deletes the whole core, `γ = β_{k*}(n)`. Baseline pairs use gamma index 0
/// and pairs in the damaged graph gamma index 1.
pub fn run_core_removal(config: &ExperimentConfig) -> Result<Collected> {
    let mut out = Collected::default();
    for &n in &config.n_values {
        let params = CoreParameters::with_ell(n, config.tau, config.ell)?;
        let gamma = params.core_exponent();
        let scale = core_removed_scale_with(n, config.tau, config.ell)?;
        let records: Vec<Result<_>> = replications(config)
            .map(|rep| {
                let start = Instant::now();
                let seed = replication_seed(config.master_seed, n, 0, rep as u64);
                let (caps, graph) = generate(n, config.tau, seed)?;
                let base = connected_components(&graph);
                let before = giant_distances(&graph, &base, config.pairs_per_replication, seed)?;
                let h = delete_above(&graph, &caps, gamma)?;
                let labeling = connected_components(&h.graph);
                let pair_seed = replication_seed(config.master_seed, n, 1, rep as u64);
                let mut r = ExperimentRecord::new(ExperimentKind::CoreRemoval, n, config.tau, rep, seed);
                r.gamma = Some(gamma);
                r.set_giant(labeling.giant_size(), h.graph.n());
                r.baseline_giant_size = Some(base.giant_size());
                r.baseline_mean_distance = mean_of(&before);
                r.distance_samples = giant_distances(&h.graph, &labeling, config.pairs_per_replication, pair_seed)?;
                r.predicted_scale = Some(scale);
                r.wall_time_ms = millis(start);
                Ok(r)
            })
            .collect();
        out.extend(records, |rep| format!("n={n} replication {rep}"));
    }
    Ok(out)
}

/// Capacities for each `n` come from `replication_seed(master, n, 0, 0)`;
/// `replications` graphs and processes are then compared on them.
pub fn run_coupling(config: &ExperimentConfig) -> Result<Collected> {
    let mut out = Collected::default();
    for &n in &config.n_values {
        let start = Instant::now();
        let seed = replication_seed(config.master_seed, n, 0, 0);
        let record = sample_capacities(n as usize, config.tau, seed).and_then(|caps| {
            let cmp = compare_shells_with_process(&caps, config.replications, seed)?;
            let mut r = ExperimentRecord::new(ExperimentKind::Coupling, n, config.tau, 0, seed);
            r.statistic = Some(cmp.tv);
            r.statistic_aux = Some(cmp.graph_split_half_tv);
            r.wall_time_ms = millis(start);
            Ok(r)
        });
        out.extend(vec![record], |_| format!("n={n} coupling"));
    }
    Ok(out)
}

/// Measures the thin tier `T(γ - ε, γ)` as an induced subgraph.
pub fn run_tiers(config: &ExperimentConfig) -> Result<Collected> {
    let mut out = Collected::default();
    for &n in &config.n_values {
        let eps = epsilon_with(n, config.ell)?;
        for (j, &gamma) in config.gamma_values.iter().enumerate() {
            let width = w(gamma, config.tau)? as f64;
            let lo = gamma - eps;
            let records: Vec<Result<_>> = replications(config)
                .map(|rep| {
                    let start = Instant::now();
                    let seed = replication_seed(config.master_seed, n, j as u64, rep as u64);
                    let (caps, graph) = generate(n, config.tau, seed)?;
                    let members = tier(&caps, lo, Some(gamma))?;
                    let sub = induced_subgraph(&graph, &members)?;
                    let labeling = connected_components(&sub.graph);
                    let mut r = ExperimentRecord::new(ExperimentKind::Tiers, n, config.tau, rep, seed);
                    r.gamma = Some(gamma);
                    r.set_giant(labeling.giant_size(), sub.graph.n());
                    r.tier_size = Some(sub.graph.n());
                    r.tier_components = Some(labeling.component_count());
                    r.tier_diameter = Some(exact_component_diameter(&sub.graph)?);
                    r.predicted_bound = Some(width);
                    r.wall_time_ms = millis(start);
                    Ok(r)
                })
                .collect();
            out.extend(records, |rep| format!("n={n} replication {rep}"));
        }
    }
    Ok(out)
}

pub fn run_concentration(config: &ExperimentConfig) -> Result<Collected> {
    let mut out = Collected::default();
    for &n in &config.n_values {
        let eps = epsilon_with(n, config.ell)?;
        let records: Vec<Result<_>> = replications(config)
            .map(|rep| {
                let start = Instant::now();
                let seed = replication_seed(config.master_seed, n, 0, rep as u64);
                let caps = sample_capacities(n as usize, config.tau, seed)?;
                let mut r = ExperimentRecord::new(ExperimentKind::Concentration, n, config.tau, rep, seed);
                r.gamma = Some(config.alpha);
                r.surviving_vertices = caps.n();
                r.statistic = Some(concentration_check(&caps, config.alpha)?.ratio);
                r.statistic_aux = Some(low_tier_ratio(&caps, eps, config.low_tier_b)?);
                r.wall_time_ms = millis(start);
                Ok(r)
            })
            .collect();
        out.extend(records, |rep| format!("n={n} replication {rep}"));
    }
    Ok(out)
}
