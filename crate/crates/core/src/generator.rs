//! Sampling the conditionally Poissonian multigraph.
//!
//! Given capacities, pair `{i, j}` with `i != j` carries
//! `Poisson(Λ_i Λ_j / L)` parallel edges and vertex `i` carries
//! `Poisson(LOOP_RATE_SCALE · Λ_i² / L)` loops, all independent.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::capacity::{CapacitySequence, SelectionDistribution};
use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::rng::{self, Stream};

/// Loop mean at vertex `i` is `LOOP_RATE_SCALE · Λ_i² / L`.
pub const LOOP_RATE_SCALE: f64 = 1.0;

/// Largest `N` the quadratic generator accepts without an override.
pub const DEFAULT_EXACT_CAP: usize = 5000;

/// Top-up loop rates below this are skipped by the fast generator; the
/// total variation this introduces is at most `N` times the floor.
pub const LOOP_TOPUP_FLOOR: f64 = 1e-13;

/// Poisson variate; zero for a nonpositive mean.
pub fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    let dist = Poisson::new(mean).expect("finite positive Poisson mean");
    dist.sample(rng) as u64
}

/// Pairwise generator: one Poisson draw per unordered pair, loops included.
/// Quadratic cost; refuses `N > cap` when a cap is given.
pub fn generate_exact_with_cap(
    caps: &CapacitySequence,
    seed: u64,
    cap: Option<usize>,
) -> Result<MultiGraph> {
    let n = caps.n();
    if let Some(cap) = cap {
        if n > cap {
            return Err(Error::SizeCapExceeded {
                operation: "exact generation",
                n,
                cap,
            });
        }
    }
    let mut rng = rng::stream(seed, Stream::Edges);
    let total = caps.total();
    let values = caps.values();
    let mut edges = Vec::new();
    for i in 0..n {
        let li = values[i];
        let m = poisson(&mut rng, LOOP_RATE_SCALE * li * li / total);
        if m > 0 {
            edges.push((i as u32, i as u32, m as u32));
        }
        for j in (i + 1)..n {
            let m = poisson(&mut rng, li * values[j] / total);
            if m > 0 {
                edges.push((i as u32, j as u32, m as u32));
            }
        }
    }
    Ok(MultiGraph::from_edges(n, edges))
}

/// [`generate_exact_with_cap`] with [`DEFAULT_EXACT_CAP`].
pub fn generate_exact(caps: &CapacitySequence, seed: u64) -> Result<MultiGraph> {
    generate_exact_with_cap(caps, seed, Some(DEFAULT_EXACT_CAP))
}

/// Linear-time generator.
///
/// Draws `M ~ Poisson(L/2)` edges with both endpoints i.i.d. from `q`, which
/// gives pair `{i, j}` a `Poisson(Λ_i Λ_j / L)` count and vertex `i` a
/// `Poisson(Λ_i² / (2L))` loop count; each vertex then receives an extra
/// `Poisson((LOOP_RATE_SCALE - 1/2) Λ_i² / L)` loops.
pub fn generate_fast(caps: &CapacitySequence, seed: u64) -> MultiGraph {
    let q = SelectionDistribution::new(caps);
    generate_fast_with(caps, &q, seed)
}

/// [`generate_fast`] reusing a prebuilt selection distribution for `caps`.
pub fn generate_fast_with(caps: &CapacitySequence, q: &SelectionDistribution, seed: u64) -> MultiGraph {
    let n = caps.n();
    debug_assert_eq!(q.len(), n);
    let mut rng = rng::stream(seed, Stream::Edges);
    let total = caps.total();
    let m = poisson(&mut rng, total / 2.0) as usize;
    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(m + m / 64 + 16);
    for _ in 0..m {
        let u = q.sample(&mut rng) as u32;
        let v = q.sample(&mut rng) as u32;
        pairs.push((u, v));
    }
    let topup_scale = (LOOP_RATE_SCALE - 0.5) / total;
    for (i, &li) in caps.values().iter().enumerate() {
        let rate = topup_scale * li * li;
        if rate > LOOP_TOPUP_FLOOR {
            for _ in 0..poisson(&mut rng, rate) {
                pairs.push((i as u32, i as u32));
            }
        }
    }
    MultiGraph::from_endpoint_pairs(n, &pairs)
}

/// Sum of the Poisson means over all unordered pairs and loops.
pub fn expected_edge_total(caps: &CapacitySequence) -> f64 {
    let total = caps.total();
    let sq: f64 = caps.values().iter().map(|v| v * v).sum();
    // Σ_{i<j} Λ_iΛ_j / L = (L² - ΣΛ²) / (2L)
    (total * total - sq) / (2.0 * total) + LOOP_RATE_SCALE * sq / total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::sample_capacities;

    #[test]
    fn exact_refuses_above_cap() {
        let caps = CapacitySequence::from_values(vec![1.0; 11], 2.5).unwrap();
        assert!(matches!(
            generate_exact_with_cap(&caps, 1, Some(10)),
            Err(Error::SizeCapExceeded { .. })
        ));
        assert!(generate_exact_with_cap(&caps, 1, None).is_ok());
    }

    #[test]
    fn both_generators_pass_audit() {
        let caps = sample_capacities(400, 2.4, 11).unwrap();
        let a = generate_exact(&caps, 3).unwrap();
        let b = generate_fast(&caps, 3);
        a.audit().unwrap();
        b.audit().unwrap();
        assert_eq!(a.n(), 400);
        assert_eq!(b.n(), 400);
    }

    #[test]
    fn generation_is_deterministic() {
        let caps = sample_capacities(2000, 2.5, 1).unwrap();
        assert_eq!(generate_fast(&caps, 9), generate_fast(&caps, 9));
        assert_ne!(generate_fast(&caps, 9), generate_fast(&caps, 10));
        let small = sample_capacities(100, 2.5, 1).unwrap();
        assert_eq!(generate_exact(&small, 4).unwrap(), generate_exact(&small, 4).unwrap());
    }

    #[test]
    fn single_vertex_loop_mean_is_one() {
        // N = 1, Λ = (1): loop count ~ Poisson(1).
        let caps = CapacitySequence::from_values(vec![1.0], 2.5).unwrap();
        let reps = 100_000;
        let mut sum = 0u64;
        for seed in 0..reps {
            sum += generate_exact(&caps, seed).unwrap().edge_total();
        }
        let mean = sum as f64 / reps as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean loop count {mean}");
    }

    #[test]
    fn two_vertex_pair_empty_probability() {
        // Λ = (1, 1): mult{0,1} ~ Poisson(1/2), P(0) = e^{-1/2}.
        let caps = CapacitySequence::from_values(vec![1.0, 1.0], 2.5).unwrap();
        let reps = 100_000u64;
        let zeros = (0..reps)
            .filter(|&s| generate_exact(&caps, s).unwrap().multiplicity(0, 1) == 0)
            .count() as f64;
        let p = (-0.5f64).exp();
        let se = (p * (1.0 - p) / reps as f64).sqrt();
        assert!((zeros / reps as f64 - p).abs() < 3.0 * se);
    }

    #[test]
    fn expected_edge_total_formula() {
        // L/2 + ΣΛ²/(2L) for the loop rate Λ²/L.
        let caps = CapacitySequence::from_values(vec![1.0, 2.0, 5.0], 2.5).unwrap();
        let expected = 8.0 / 2.0 + 30.0 / 16.0;
        assert!((expected_edge_total(&caps) - expected).abs() < 1e-12);
    }

    #[test]
    fn unit_capacity_degrees_are_poisson_one() {
        let caps = CapacitySequence::from_values(vec![1.0; 20_000], 2.5).unwrap();
        let g = generate_fast(&caps, 77);
        let n = g.n() as f64;
        let degrees: Vec<u64> = (0..g.n()).map(|v| g.degree(v).unwrap()).collect();
        let mean = degrees.iter().sum::<u64>() as f64 / n;
        let var = degrees.iter().map(|&d| (d as f64 - mean).powi(2)).sum::<f64>() / n;
        let p0 = degrees.iter().filter(|&&d| d == 0).count() as f64 / n;
        assert!((mean - 1.0).abs() < 0.03, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "variance {var}");
        assert!((p0 - (-1f64).exp()).abs() < 0.015, "P(0) {p0}");
    }
}
