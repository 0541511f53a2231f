//! The Pareto capacity law, its size-biased version, and the vertex
//! selection distribution `q(j) = Λ_j / L`.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};

use rand::Rng;

use crate::alias::AliasTable;
use crate::error::{check_tau, invalid, Error, Result};
use crate::rng::{self, Stream};

/// Inverse of the tail `P(Λ > x) = x^{-(τ-1)}` on `[1, ∞)`.
pub fn pareto_quantile(u: f64, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    if !(u > 0.0 && u <= 1.0) {
        return Err(invalid("u", format!("{u} is outside (0, 1]")));
    }
    Ok(u.powf(-1.0 / (tau - 1.0)))
}

/// `E[Λ] = (τ-1)/(τ-2)`.
pub fn mean_capacity(tau: f64) -> Result<f64> {
    check_tau(tau)?;
    Ok((tau - 1.0) / (tau - 2.0))
}

/// Tail of the size-biased capacity `Γ`: `P(Γ > x) = x^{-(τ-2)}`.
pub fn size_biased_tail(x: f64, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    if !(x >= 1.0) {
        return Err(invalid("x", format!("{x} is below the support minimum 1")));
    }
    Ok(x.powf(-(tau - 2.0)))
}

/// Inverse of [`size_biased_tail`].
pub fn size_biased_quantile(u: f64, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    if !(u > 0.0 && u <= 1.0) {
        return Err(invalid("u", format!("{u} is outside (0, 1]")));
    }
    Ok(u.powf(-1.0 / (tau - 2.0)))
}

/// Uniform variate on `(0, 1]`.
#[inline]
pub(crate) fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// The i.i.d. capacities of one graph together with their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacitySequence {
    values: Vec<f64>,
    total: f64,
    tau: f64,
}

impl CapacitySequence {
    /// Wraps explicit capacities. Every value must be finite and at least 1.
    pub fn from_values(values: Vec<f64>, tau: f64) -> Result<Self> {
        check_tau(tau)?;
        if values.is_empty() {
            return Err(invalid("values", "at least one capacity is required"));
        }
        if values.len() > u32::MAX as usize {
            return Err(invalid("values", "more than u32::MAX vertices"));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 1.0))
        {
            return Err(invalid("values", format!("capacity {v} at index {i} is not a finite value >= 1")));
        }
        let total = values.iter().sum();
        Ok(CapacitySequence { values, total, tau })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// `L_N`.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Index of the largest capacity, smallest index on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        best
    }

    pub fn max(&self) -> f64 {
        self.values[self.argmax()]
    }

    /// Writes the binary form: a 16-byte header (`b"NR"`, version `u16`,
    /// `N` as `u32`, `τ` as `f64`) and `N` little-endian `f64` values.
    pub fn write_binary<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = BufWriter::new(writer);
        w.write_all(&BINARY_MAGIC)?;
        w.write_all(&BINARY_VERSION.to_le_bytes())?;
        w.write_all(&(self.values.len() as u32).to_le_bytes())?;
        w.write_all(&self.tau.to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_binary<R: Read>(reader: R) -> Result<Self> {
        let mut r = BufReader::new(reader);
        let mut header = [0u8; 16];
        r.read_exact(&mut header)?;
        if header[0..2] != BINARY_MAGIC {
            return Err(format_err("bad magic"));
        }
        let version = u16::from_le_bytes([header[2], header[3]]);
        if version != BINARY_VERSION {
            return Err(format_err(format!("unsupported version {version}")));
        }
        let n = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
        let tau = f64::from_le_bytes(header[8..16].try_into().unwrap());
        let mut values = Vec::with_capacity(n);
        let mut buf = [0u8; 8];
        for _ in 0..n {
            r.read_exact(&mut buf)?;
            values.push(f64::from_le_bytes(buf));
        }
        if r.read(&mut buf)? != 0 {
            return Err(format_err("trailing bytes after the last capacity"));
        }
        CapacitySequence::from_values(values, tau)
    }

    /// One capacity per line, in shortest round-trip decimal form.
    pub fn write_text<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = BufWriter::new(writer);
        for v in &self.values {
            writeln!(w, "{v}")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_text<R: Read>(reader: R, tau: f64) -> Result<Self> {
        let mut values = Vec::new();
        for line in BufReader::new(reader).lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            values.push(
                line.parse::<f64>()
                    .map_err(|e| format_err(format!("`{line}`: {e}")))?,
            );
        }
        CapacitySequence::from_values(values, tau)
    }
}

const BINARY_MAGIC: [u8; 2] = *b"NR";
const BINARY_VERSION: u16 = 1;

fn format_err(reason: impl Into<String>) -> Error {
    Error::Format {
        format: "capacity file",
        reason: reason.into(),
    }
}

/// Draws `n` i.i.d. capacities from the `Capacities` stream of `seed`.
pub fn sample_capacities(n: usize, tau: f64, seed: u64) -> Result<CapacitySequence> {
    check_tau(tau)?;
    if n == 0 {
        return Err(invalid("n", "at least one vertex is required"));
    }
    let mut rng = rng::stream(seed, Stream::Capacities);
    let exponent = -1.0 / (tau - 1.0);
    let values = (0..n).map(|_| open_unit(&mut rng).powf(exponent)).collect();
    CapacitySequence::from_values(values, tau)
}

/// `q(j) = Λ_j / L` with an alias table for constant-time draws.
#[derive(Debug, Clone)]
pub struct SelectionDistribution {
    weights: Vec<f64>,
    table: AliasTable,
}

impl SelectionDistribution {
    pub fn new(caps: &CapacitySequence) -> Self {
        let total = caps.total();
        let weights = caps.values().iter().map(|v| v / total).collect();
        SelectionDistribution {
            weights,
            table: AliasTable::new(caps.values()),
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, j: usize) -> f64 {
        self.weights[j]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.table.sample(rng)
    }

    pub fn table(&self) -> &AliasTable {
        &self.table
    }
}

pub fn selection_distribution(caps: &CapacitySequence) -> SelectionDistribution {
    SelectionDistribution::new(caps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn quantile_examples() {
        assert_eq!(pareto_quantile(1.0, 2.5).unwrap(), 1.0);
        assert!((pareto_quantile(0.25, 2.5).unwrap() - 4f64.powf(2.0 / 3.0)).abs() < 1e-12);
        assert!((pareto_quantile(0.25, 2.5).unwrap() - 2.519842).abs() < 1e-6);
        assert!((pareto_quantile(0.01, 2.2).unwrap() - 46.4159).abs() < 1e-4);
    }

    #[test]
    fn quantile_rejects_bad_input() {
        assert!(pareto_quantile(0.0, 2.5).is_err());
        assert!(pareto_quantile(1.5, 2.5).is_err());
        assert!(pareto_quantile(-0.1, 2.5).is_err());
        assert!(pareto_quantile(0.5, 2.0).is_err());
        assert!(pareto_quantile(0.5, 3.0).is_err());
        assert!(pareto_quantile(f64::NAN, 2.5).is_err());
    }

    #[test]
    fn quantile_inverts_tail() {
        for &u in &[0.9, 0.3, 1e-3, 1e-9] {
            let x = pareto_quantile(u, 2.7).unwrap();
            assert!((x.powf(-1.7) - u).abs() < 1e-12 * u.max(1e-3));
        }
    }

    #[test]
    fn mean_examples() {
        assert!((mean_capacity(2.5).unwrap() - 3.0).abs() < 1e-12);
        assert!((mean_capacity(2.2).unwrap() - 6.0).abs() < 1e-12);
        assert!((mean_capacity(2.9).unwrap() - 19.0 / 9.0).abs() < 1e-12);
        assert!(mean_capacity(2.0).is_err());
    }

    #[test]
    fn size_biased_examples() {
        assert_eq!(size_biased_tail(1.0, 2.5).unwrap(), 1.0);
        assert!((size_biased_tail(4.0, 2.5).unwrap() - 0.5).abs() < 1e-12);
        assert!((size_biased_tail(100.0, 2.5).unwrap() - 0.1).abs() < 1e-12);
        assert!(size_biased_tail(0.5, 2.5).is_err());
    }

    #[test]
    fn size_biased_round_trip() {
        for &tau in &[2.1, 2.5, 2.9] {
            for &u in &[1.0, 0.5, 0.01, 1e-6] {
                let x = size_biased_quantile(u, tau).unwrap();
                assert!((x - u.powf(-1.0 / (tau - 2.0))).abs() <= 1e-12 * x);
                let back = size_biased_tail(x, tau).unwrap();
                assert!((back - u).abs() <= 1e-10 * u);
            }
        }
    }

    #[test]
    fn single_draw_sequence() {
        let caps = sample_capacities(1, 2.3, 99).unwrap();
        assert_eq!(caps.n(), 1);
        assert!(caps.get(0) >= 1.0);
        assert_eq!(caps.total(), caps.get(0));
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_capacities(1000, 2.5, 5).unwrap();
        let b = sample_capacities(1000, 2.5, 5).unwrap();
        let c = sample_capacities(1000, 2.5, 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn from_values_validates() {
        assert!(CapacitySequence::from_values(vec![], 2.5).is_err());
        assert!(CapacitySequence::from_values(vec![1.0, 0.9], 2.5).is_err());
        assert!(CapacitySequence::from_values(vec![1.0, f64::INFINITY], 2.5).is_err());
        assert!(CapacitySequence::from_values(vec![1.0, 2.0], 3.5).is_err());
    }

    #[test]
    fn argmax_breaks_ties_by_index() {
        let caps = CapacitySequence::from_values(vec![1.0, 5.0, 2.0, 5.0], 2.5).unwrap();
        assert_eq!(caps.argmax(), 1);
    }

    #[test]
    fn selection_normalizes() {
        let caps = CapacitySequence::from_values(vec![1.0, 1.0, 2.0], 2.5).unwrap();
        let q = selection_distribution(&caps);
        assert_eq!(q.weights(), &[0.25, 0.25, 0.5]);
        for j in 0..3 {
            assert!((q.table().mass(j) - q.weight(j)).abs() < 1e-15);
        }
    }

    #[test]
    fn selection_single_vertex() {
        let caps = CapacitySequence::from_values(vec![3.0], 2.5).unwrap();
        let q = selection_distribution(&caps);
        let mut rng = stream(0, Stream::Selection);
        assert!((0..100).all(|_| q.sample(&mut rng) == 0));
    }

    #[test]
    fn binary_round_trip_and_header_layout() {
        let caps = sample_capacities(17, 2.4, 1).unwrap();
        let mut buf = Vec::new();
        caps.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 17 * 8);
        assert_eq!(&buf[0..2], b"NR");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 17);
        assert_eq!(f64::from_le_bytes(buf[8..16].try_into().unwrap()), 2.4);
        let back = CapacitySequence::read_binary(&buf[..]).unwrap();
        assert_eq!(back, caps);
    }

    #[test]
    fn binary_rejects_corruption() {
        let caps = sample_capacities(3, 2.4, 1).unwrap();
        let mut buf = Vec::new();
        caps.write_binary(&mut buf).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(CapacitySequence::read_binary(&bad[..]).is_err());
        assert!(CapacitySequence::read_binary(&buf[..buf.len() - 1]).is_err());
        let mut long = buf.clone();
        long.push(0);
        assert!(CapacitySequence::read_binary(&long[..]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let caps = sample_capacities(25, 2.6, 8).unwrap();
        let mut buf = Vec::new();
        caps.write_text(&mut buf).unwrap();
        let back = CapacitySequence::read_text(&buf[..], 2.6).unwrap();
        assert_eq!(back, caps);
    }
}
