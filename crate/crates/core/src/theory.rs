//! Limit predictions: the generating function of the mixed Poisson offspring
//! law `Poisson(Γ)`, the extinction probability of the corresponding
//! Galton–Watson process, the limiting giant-component fraction, and the
//! distance scale after the whole core is removed.

use serde::Serialize;

use crate::error::{check_tau, invalid, Error, Result};
use crate::structure::Ell;

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
// Gauss weights for the odd-indexed Kronrod nodes (7-point rule).
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod estimate and its difference from the embedded 7-point Gauss rule.
fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let center = f(mid);
    let mut kronrod = GK_WEIGHTS[7] * center;
    let mut gauss = GAUSS_WEIGHTS[3] * center;
    for i in 0..7 {
        let dx = half * GK_NODES[i];
        let pair = f(mid - dx) + f(mid + dx);
        kronrod += GK_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss–Kronrod integration on a finite interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    const MAX_INTERVALS: usize = 2000;
    let (whole, err) = gauss_kronrod(&f, a, b);
    let mut pieces = vec![(a, b, whole, err)];
    let mut total = whole;
    let mut total_err = err;
    while total_err > rel_tol * total.abs().max(f64::MIN_POSITIVE) {
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::Numerical {
                operation: "quadrature",
                reason: format!("error estimate {total_err:e} above tolerance after {MAX_INTERVALS} intervals"),
            });
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, value, e) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (left, el) = gauss_kronrod(&f, lo, mid);
        let (right, er) = gauss_kronrod(&f, mid, hi);
        total += left + right - value;
        total_err += el + er - e;
        pieces.push((lo, mid, left, el));
        pieces.push((mid, hi, right, er));
    }
    // Re-sum to shed the drift of incremental updates.
    Ok(pieces.iter().map(|p| p.2).sum())
}

const REL_TOL: f64 = 1e-11;

/// `E[e^{-tX}]` for `P(X > x) = x^{-a}` on `[1, ∞)`, i.e.
/// `∫_1^∞ a x^{-a-1} e^{-tx} dx`. The range is split at `c = max(1, 1/t)`:
/// `[1, c]` is integrated in `log x`, `[c, ∞)` after `x = c/u`.
pub fn pareto_laplace(t: f64, a: f64) -> Result<f64> {
    if !(t >= 0.0 && a > 0.0) {
        return Err(invalid("laplace", format!("need t >= 0 and a > 0, got t = {t}, a = {a}")));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let c = (1.0 / t).max(1.0);
    let body = if c > 1.0 {
        integrate(|y: f64| a * (-a * y).exp() * (-t * y.exp()).exp(), 0.0, c.ln(), REL_TOL)?
    } else {
        0.0
    };
    let tail = integrate(
        |u: f64| a * c.powf(-a) * u.powf(a - 1.0) * (-t * c / u).exp(),
        0.0,
        1.0,
        REL_TOL,
    )?;
    Ok(body + tail)
}

/// Generating function of `π* = Poisson(Γ)`: `E[exp(-Γ(1-s))]`.
pub fn pi_star_pgf(s: f64, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    if !(0.0..=1.0).contains(&s) {
        return Err(invalid("s", format!("{s} is outside [0, 1]")));
    }
    pareto_laplace(1.0 - s, tau - 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extinction {
    pub q: f64,
    /// Iterates `0, f(0), f(f(0)), ...` up to and including `q`.
    pub trace: Vec<f64>,
}

pub const MAX_FIXED_POINT_ITERATIONS: usize = 10_000;

/// Smallest fixed point of [`pi_star_pgf`], by iteration from 0 until
/// successive iterates differ by less than `tol`.
pub fn extinction_probability(tau: f64, tol: f64) -> Result<Extinction> {
    check_tau(tau)?;
    if !(tol > 0.0) {
        return Err(invalid("tol", "tolerance must be positive"));
    }
    let mut trace = vec![0.0];
    let mut s = 0.0;
    for _ in 0..MAX_FIXED_POINT_ITERATIONS {
        let next = pi_star_pgf(s, tau)?;
        trace.push(next);
        if (next - s).abs() < tol {
            return Ok(Extinction { q: next, trace });
        }
        s = next;
    }
    Err(Error::Numerical {
        operation: "extinction probability",
        reason: format!("no convergence in {MAX_FIXED_POINT_ITERATIONS} iterations"),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GiantPrediction {
    pub tau: f64,
    pub extinction_prob: f64,
    pub giant_fraction: f64,
    pub tolerance: f64,
}

/// `1 - E[q^D]` with `D ~ Poisson(Λ)`, i.e. `1 - E[exp(-Λ(1-q))]`.
pub fn giant_fraction_given_extinction(q: f64, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    if !(0.0..=1.0).contains(&q) {
        return Err(invalid("q", format!("{q} is outside [0, 1]")));
    }
    Ok(1.0 - pareto_laplace(1.0 - q, tau - 1.0)?)
}

pub fn giant_fraction(tau: f64, tol: f64) -> Result<GiantPrediction> {
    let ext = extinction_probability(tau, tol)?;
    Ok(GiantPrediction {
        tau,
        extinction_prob: ext.q,
        giant_fraction: giant_fraction_given_extinction(ext.q, tau)?,
        tolerance: tol,
    })
}

/// `log N / ((3-τ) ℓ(N))`, the distance scale once the whole core is gone.
pub fn core_removed_scale(n: u64, tau: f64) -> Result<f64> {
    core_removed_scale_with(n, tau, Ell::Default)
}

pub fn core_removed_scale_with(n: u64, tau: f64, ell: Ell) -> Result<f64> {
    check_tau(tau)?;
    if n < 3 {
        return Err(invalid("n", "need n >= 3"));
    }
    Ok((n as f64).ln() / ((3.0 - tau) * ell.eval(n)))
}
