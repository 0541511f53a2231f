//! Small statistical helpers shared by the tests and experiment checks.

use std::collections::BTreeMap;
use std::hash::Hash;

use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl ChiSquareTest {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value > significance
    }
}

fn survival(statistic: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .sf(statistic)
}

/// Pools adjacent cells (in key order) until each pooled cell has at least
/// `min_count` combined observations.
fn pooled_cells(a: &BTreeMap<i64, u64>, b: &BTreeMap<i64, u64>, min_count: u64) -> Vec<(u64, u64)> {
    let keys: Vec<i64> = a.keys().chain(b.keys()).copied().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let mut cells = Vec::new();
    let (mut ca, mut cb) = (0u64, 0u64);
    for k in keys {
        ca += a.get(&k).copied().unwrap_or(0);
        cb += b.get(&k).copied().unwrap_or(0);
        if ca + cb >= min_count {
            cells.push((ca, cb));
            ca = 0;
            cb = 0;
        }
    }
    if ca + cb > 0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += ca;
                last.1 += cb;
            }
            None => cells.push((ca, cb)),
        }
    }
    cells
}

/// Two-sample chi-square homogeneity test on integer-valued samples.
/// Adjacent values are pooled so each cell holds at least 10 observations.
pub fn chi_square_two_sample(a: &[i64], b: &[i64]) -> ChiSquareTest {
    let count = |xs: &[i64]| {
        let mut m = BTreeMap::new();
        for &x in xs {
            *m.entry(x).or_insert(0u64) += 1;
        }
        m
    };
    let cells = pooled_cells(&count(a), &count(b), 10);
    let na = a.len() as f64;
    let nb = b.len() as f64;
    let n = na + nb;
    let mut statistic = 0.0;
    for &(ca, cb) in &cells {
        let row = (ca + cb) as f64;
        let ea = row * na / n;
        let eb = row * nb / n;
        statistic += (ca as f64 - ea).powi(2) / ea + (cb as f64 - eb).powi(2) / eb;
    }
    let dof = cells.len().saturating_sub(1);
    ChiSquareTest {
        statistic,
        dof,
        p_value: survival(statistic, dof),
    }
}

/// Goodness of fit of integer samples against a probability mass function on
/// `0..`. Cells are pooled so each expected count is at least 5; the tail
/// beyond `max_value` is one cell.
pub fn chi_square_goodness_of_fit(samples: &[u64], pmf: impl Fn(u64) -> f64, max_value: u64) -> ChiSquareTest {
    let n = samples.len() as f64;
    let mut observed = vec![0u64; max_value as usize + 2];
    for &s in samples {
        observed[(s.min(max_value + 1)) as usize] += 1;
    }
    let mut probs: Vec<f64> = (0..=max_value).map(&pmf).collect();
    let head: f64 = probs.iter().sum();
    probs.push((1.0 - head).max(0.0));
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (obs, p) in observed.iter().zip(&probs) {
        o += *obs as f64;
        e += p * n;
        if e >= 5.0 {
            cells.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => cells.push((o, e)),
        }
    }
    let statistic: f64 = cells.iter().map(|&(o, e)| (o - e).powi(2) / e).sum();
    let dof = cells.len().saturating_sub(1);
    ChiSquareTest {
        statistic,
        dof,
        p_value: survival(statistic, dof),
    }
}

/// Total variation distance between the empirical laws of two samples.
pub fn total_variation<K: Ord + Eq + Hash + Clone>(a: &[K], b: &[K]) -> f64 {
    let mut diff: BTreeMap<K, f64> = BTreeMap::new();
    let wa = 1.0 / a.len() as f64;
    let wb = 1.0 / b.len() as f64;
    for k in a {
        *diff.entry(k.clone()).or_insert(0.0) += wa;
    }
    for k in b {
        *diff.entry(k.clone()).or_insert(0.0) -= wb;
    }
    0.5 * diff.values().map(|d| d.abs()).sum::<f64>()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Poisson mass `e^{-λ} λ^k / k!`, evaluated in log space.
pub fn poisson_pmf(lambda: f64, k: u64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let log = -lambda + k as f64 * lambda.ln() - statrs::function::gamma::ln_gamma(k as f64 + 1.0);
    log.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples_have_zero_tv_and_unit_p() {
        let a = vec![1i64, 2, 2, 3, 3, 3];
        assert!(total_variation(&a, &a).abs() < 1e-15);
        let t = chi_square_two_sample(&a.repeat(10), &a.repeat(10));
        assert!(t.p_value > 0.999);
    }

    #[test]
    fn disjoint_samples_have_unit_tv() {
        assert_eq!(total_variation(&[1, 1, 2], &[3, 4]), 1.0);
    }

    #[test]
    fn shifted_samples_are_rejected() {
        let a: Vec<i64> = (0..2000).map(|i| i % 10).collect();
        let b: Vec<i64> = (0..2000).map(|i| i % 10 + 2).collect();
        assert!(!chi_square_two_sample(&a, &b).passes(1e-3));
    }

    #[test]
    fn poisson_pmf_values() {
        assert!((poisson_pmf(0.5, 0) - (-0.5f64).exp()).abs() < 1e-15);
        assert!((poisson_pmf(2.0, 3) - 8.0 / 6.0 * (-2f64).exp()).abs() < 1e-14);
        let total: f64 = (0..60).map(|k| poisson_pmf(7.5, k)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
