//! Undirected multigraph in compressed sparse row form.
//!
//! Each vertex row lists `(neighbor, multiplicity)` sorted by neighbor id. An
//! edge `{u, v}` with `u != v` appears in both rows with the same
//! multiplicity; a loop `{u, u}` appears once in row `u`.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    multiplicities: Vec<u32>,
    edge_total: u64,
}

#[inline]
fn pair_key(u: u32, v: u32) -> u64 {
    let (a, b) = if u <= v { (u, v) } else { (v, u) };
    ((a as u64) << 32) | b as u64
}

#[inline]
fn split_key(key: u64) -> (u32, u32) {
    ((key >> 32) as u32, key as u32)
}

impl MultiGraph {
    pub fn empty(n: usize) -> Self {
        MultiGraph {
            offsets: vec![0; n + 1],
            neighbors: Vec::new(),
            multiplicities: Vec::new(),
            edge_total: 0,
        }
    }

    /// Builds a graph from undirected edges given as `(u, v, multiplicity)`.
    /// Repeated pairs are merged by adding multiplicities; zero
    /// multiplicities are dropped. Panics on an endpoint `>= n`.
    pub fn from_edges<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32, u32)>,
    {
        let mut keyed: Vec<(u64, u32)> = edges
            .into_iter()
            .filter(|&(_, _, m)| m > 0)
            .map(|(u, v, m)| {
                assert!((u as usize) < n && (v as usize) < n, "edge ({u}, {v}) out of range for n = {n}");
                (pair_key(u, v), m)
            })
            .collect();
        keyed.sort_unstable_by_key(|&(k, _)| k);
        Self::from_sorted_keys(n, merge_runs(keyed))
    }

    /// Builds a graph from unit edges given as endpoint pairs.
    pub fn from_endpoint_pairs(n: usize, pairs: &[(u32, u32)]) -> Self {
        let mut keys: Vec<u64> = pairs
            .iter()
            .map(|&(u, v)| {
                assert!((u as usize) < n && (v as usize) < n);
                pair_key(u, v)
            })
            .collect();
        keys.sort_unstable();
        let mut merged: Vec<(u64, u32)> = Vec::with_capacity(keys.len());
        for k in keys {
            match merged.last_mut() {
                Some((last, m)) if *last == k => *m += 1,
                _ => merged.push((k, 1)),
            }
        }
        Self::from_sorted_keys(n, merged)
    }

    /// `edges` must be sorted by key with distinct keys.
    fn from_sorted_keys(n: usize, edges: Vec<(u64, u32)>) -> Self {
        let mut counts = vec![0usize; n + 1];
        let mut edge_total = 0u64;
        for &(k, m) in &edges {
            let (u, v) = split_key(k);
            counts[u as usize] += 1;
            if u != v {
                counts[v as usize] += 1;
            }
            edge_total += m as u64;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + counts[i];
        }
        let len = offsets[n];
        let mut neighbors = vec![0u32; len];
        let mut multiplicities = vec![0u32; len];
        let mut cursor: Vec<usize> = offsets[..n].to_vec();
        let mut push = |row: u32, nb: u32, m: u32| {
            let c = &mut cursor[row as usize];
            neighbors[*c] = nb;
            multiplicities[*c] = m;
            *c += 1;
        };
        // Three passes keep every row sorted: smaller neighbors, the loop, larger neighbors.
        for &(k, m) in &edges {
            let (u, v) = split_key(k);
            if u < v {
                push(v, u, m);
            }
        }
        for &(k, m) in &edges {
            let (u, v) = split_key(k);
            if u == v {
                push(u, u, m);
            }
        }
        for &(k, m) in &edges {
            let (u, v) = split_key(k);
            if u < v {
                push(u, v, m);
            }
        }
        MultiGraph {
            offsets,
            neighbors,
            multiplicities,
            edge_total,
        }
    }

    /// Assembles a graph from CSR arrays whose rows are already sorted and symmetric.
    pub(crate) fn from_csr(offsets: Vec<usize>, neighbors: Vec<u32>, multiplicities: Vec<u32>) -> Self {
        let mut half = 0u64;
        let mut loops = 0u64;
        for u in 0..offsets.len() - 1 {
            for k in offsets[u]..offsets[u + 1] {
                if neighbors[k] as usize == u {
                    loops += multiplicities[k] as u64;
                } else {
                    half += multiplicities[k] as u64;
                }
            }
        }
        MultiGraph {
            offsets,
            neighbors,
            multiplicities,
            edge_total: half / 2 + loops,
        }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Total number of edges counted with multiplicity; a loop counts once.
    pub fn edge_total(&self) -> u64 {
        self.edge_total
    }

    /// Number of distinct adjacent pairs (loops included).
    pub fn distinct_edge_count(&self) -> usize {
        (0..self.n())
            .map(|u| self.adjacent(u).iter().filter(|&&v| v as usize >= u).count())
            .sum()
    }

    /// Neighbor ids of `v`, sorted, one entry per distinct neighbor.
    #[inline]
    pub fn adjacent(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn multiplicities(&self, v: usize) -> &[u32] {
        &self.multiplicities[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn entries(&self, v: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.adjacent(v)
            .iter()
            .zip(self.multiplicities(v))
            .map(|(&u, &m)| (u as usize, m))
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u32 {
        match self.adjacent(u).binary_search(&(v as u32)) {
            Ok(pos) => self.multiplicities(u)[pos],
            Err(_) => 0,
        }
    }

    /// Sum of incident multiplicities, each loop counted twice.
    pub fn degree(&self, v: usize) -> Result<u64> {
        if v >= self.n() {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n() });
        }
        Ok(self
            .entries(v)
            .map(|(u, m)| if u == v { 2 * m as u64 } else { m as u64 })
            .sum())
    }

    /// Distinct edges `(u, v, m)` with `u <= v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.entries(u)
                .filter(move |&(v, _)| v >= u)
                .map(move |(v, m)| (u, v, m))
        })
    }

    /// Checks symmetry, positive multiplicities, sorted duplicate-free rows,
    /// and the edge total.
    pub fn audit(&self) -> std::result::Result<(), String> {
        let n = self.n();
        let mut half = 0u64;
        let mut loops = 0u64;
        for u in 0..n {
            let row = self.adjacent(u);
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("row {u} is not strictly increasing"));
            }
            for (v, m) in self.entries(u) {
                if v >= n {
                    return Err(format!("row {u} references vertex {v}"));
                }
                if m == 0 {
                    return Err(format!("zero multiplicity on ({u}, {v})"));
                }
                if v == u {
                    loops += m as u64;
                } else {
                    half += m as u64;
                    if self.multiplicity(v, u) != m {
                        return Err(format!("asymmetric entry ({u}, {v}, {m})"));
                    }
                }
            }
        }
        if !half.is_multiple_of(2) || half / 2 + loops != self.edge_total {
            return Err(format!(
                "edge total {} disagrees with adjacency ({} + {loops})",
                self.edge_total,
                half / 2
            ));
        }
        Ok(())
    }

    /// Writes the edge-list format: header line then `u v m` per adjacent pair.
    pub fn write_edge_list<W: Write>(&self, header: &GraphHeader, writer: W) -> Result<()> {
        let mut w = BufWriter::new(writer);
        writeln!(w, "NRGRAPH v1 N={} tau={} seed={}", self.n(), header.tau, header.seed)?;
        for (u, v, m) in self.edges() {
            writeln!(w, "{u} {v} {m}")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_edge_list<R: Read>(reader: R) -> Result<(GraphHeader, MultiGraph)> {
        let mut lines = BufReader::new(reader).lines();
        let first = lines.next().ok_or_else(|| edge_list_err("empty input"))??;
        let header = GraphHeader::parse(&first)?;
        let n = header.n;
        let mut edges = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                [u, v, m] => (u.parse::<u32>(), v.parse::<u32>(), m.parse::<u32>()),
                _ => return Err(edge_list_err(format!("line {}: expected `u v m`", lineno + 2))),
            };
            let (u, v, m) = match parsed {
                (Ok(u), Ok(v), Ok(m)) => (u, v, m),
                _ => return Err(edge_list_err(format!("line {}: non-integer field", lineno + 2))),
            };
            if u > v || v as usize >= n || m == 0 {
                return Err(edge_list_err(format!("line {}: invalid edge ({u}, {v}, {m})", lineno + 2)));
            }
            edges.push((u, v, m));
        }
        Ok((header, MultiGraph::from_edges(n, edges)))
    }
}

fn merge_runs(sorted: Vec<(u64, u32)>) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::with_capacity(sorted.len());
    for (k, m) in sorted {
        match out.last_mut() {
            Some((last, acc)) if *last == k => *acc += m,
            _ => out.push((k, m)),
        }
    }
    out
}

fn edge_list_err(reason: impl Into<String>) -> Error {
    Error::Format {
        format: "edge list",
        reason: reason.into(),
    }
}

/// Provenance line of an edge-list file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphHeader {
    pub n: usize,
    pub tau: f64,
    pub seed: u64,
}

impl GraphHeader {
    fn parse(line: &str) -> Result<Self> {
        let mut parts = line.split_whitespace();
        if parts.next() != Some("NRGRAPH") || parts.next() != Some("v1") {
            return Err(edge_list_err("header must start with `NRGRAPH v1`"));
        }
        let mut field = |name: &str| -> Result<&str> {
            parts
                .next()
                .and_then(|p| p.strip_prefix(name))
                .ok_or_else(|| edge_list_err(format!("header field `{name}` missing")))
        };
        let n = field("N=")?.parse().map_err(|_| edge_list_err("bad N"))?;
        let tau = field("tau=")?.parse().map_err(|_| edge_list_err("bad tau"))?;
        let seed = field("seed=")?.parse().map_err(|_| edge_list_err("bad seed"))?;
        Ok(GraphHeader { n, tau, seed })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn loops_count_twice_toward_degree() {
        let g = MultiGraph::from_edges(3, [(0, 0, 1), (1, 2, 3)]);
        assert_eq!(g.degree(0).unwrap(), 2);
        assert_eq!(g.degree(1).unwrap(), 3);
        assert_eq!(g.edge_total(), 4);
        assert!(g.degree(3).is_err());
    }

    #[test]
    fn isolated_vertex_has_degree_zero() {
        let g = MultiGraph::from_edges(2, [(1, 1, 2)]);
        assert_eq!(g.degree(0).unwrap(), 0);
        assert_eq!(g.degree(1).unwrap(), 4);
    }

    #[test]
    fn duplicate_pairs_merge() {
        let g = MultiGraph::from_endpoint_pairs(3, &[(0, 1), (1, 0), (2, 2), (0, 1)]);
        assert_eq!(g.multiplicity(0, 1), 3);
        assert_eq!(g.multiplicity(1, 0), 3);
        assert_eq!(g.multiplicity(2, 2), 1);
        assert_eq!(g.edge_total(), 4);
        assert_eq!(g.distinct_edge_count(), 2);
        g.audit().unwrap();
    }

    #[test]
    fn rows_are_sorted_with_loop_in_place() {
        let g = MultiGraph::from_edges(5, [(2, 4, 1), (0, 2, 1), (2, 2, 1), (1, 2, 2), (2, 3, 1)]);
        assert_eq!(g.adjacent(2), &[0, 1, 2, 3, 4]);
        g.audit().unwrap();
    }

    #[test]
    fn header_parse_errors() {
        assert!(MultiGraph::read_edge_list(&b"GRAPH v1 N=2 tau=2.5 seed=1\n"[..]).is_err());
        assert!(MultiGraph::read_edge_list(&b"NRGRAPH v1 N=2 tau=2.5\n"[..]).is_err());
        assert!(MultiGraph::read_edge_list(&b"NRGRAPH v1 N=2 tau=2.5 seed=1\n1 0 1\n"[..]).is_err());
        assert!(MultiGraph::read_edge_list(&b"NRGRAPH v1 N=2 tau=2.5 seed=1\n0 2 1\n"[..]).is_err());
        assert!(MultiGraph::read_edge_list(&b"NRGRAPH v1 N=2 tau=2.5 seed=1\n0 1\n"[..]).is_err());
    }

    #[test]
    fn edge_list_text_layout() {
        let g = MultiGraph::from_edges(3, [(1, 0, 2), (2, 2, 1)]);
        let header = GraphHeader { n: 3, tau: 2.5, seed: 42 };
        let mut buf = Vec::new();
        g.write_edge_list(&header, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "NRGRAPH v1 N=3 tau=2.5 seed=42\n0 1 2\n2 2 1\n"
        );
    }

    fn arb_edges() -> impl Strategy<Value = (usize, Vec<(u32, u32, u32)>)> {
        (1usize..20).prop_flat_map(|n| {
            let e = (0..n as u32, 0..n as u32, 1u32..4);
            (Just(n), proptest::collection::vec(e, 0..60))
        })
    }

    proptest! {
        #[test]
        fn construction_passes_audit((n, edges) in arb_edges()) {
            let g = MultiGraph::from_edges(n, edges.clone());
            prop_assert!(g.audit().is_ok());
            let expected: u64 = edges.iter().map(|e| e.2 as u64).sum();
            prop_assert_eq!(g.edge_total(), expected);
        }

        #[test]
        fn edge_list_round_trip((n, edges) in arb_edges(), tau in 2.01f64..2.99, seed: u64) {
            let g = MultiGraph::from_edges(n, edges);
            let header = GraphHeader { n, tau, seed };
            let mut buf = Vec::new();
            g.write_edge_list(&header, &mut buf).unwrap();
            let (h2, g2) = MultiGraph::read_edge_list(&buf[..]).unwrap();
            prop_assert_eq!(h2, header);
            prop_assert_eq!(g2, g);
        }
    }
}
