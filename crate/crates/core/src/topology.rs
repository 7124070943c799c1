//! Qubit connectivity graphs.
//!
//! A [`ConnectivityGraph`] is the 0/1 coupling matrix of the device stored as
//! an undirected edge list plus a derived adjacency map. Graphs come from the
//! edge-list text format ([`ConnectivityGraph::from_edge_list`]) or from the
//! built-in families: heavy-hex, ring, chain, complete and edgeless.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Row count of the 127-qubit Eagle heavy-hex layout.
pub const EAGLE_ROWS: usize = 7;
/// Unit cells per row of the 127-qubit Eagle heavy-hex layout.
pub const EAGLE_CELLS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityGraph {
    n_qubits: usize,
    /// Normalised `(lo, hi)` pairs in insertion order.
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl ConnectivityGraph {
    /// Builds a graph, rejecting self-loops, duplicates and out-of-range endpoints.
    pub fn new(n_qubits: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::validation("graph must have at least one qubit"));
        }
        let mut g = ConnectivityGraph {
            n_qubits,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); n_qubits],
        };
        let mut seen = HashSet::new();
        for (a, b) in edges {
            g.check_edge(a, b)?;
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(Error::validation(format!("duplicate edge ({a}, {b})")));
            }
            g.push_edge(key);
        }
        Ok(g)
    }

    fn check_edge(&self, a: usize, b: usize) -> Result<()> {
        if a == b {
            return Err(Error::validation(format!("self-loop on qubit {a}")));
        }
        if a >= self.n_qubits || b >= self.n_qubits {
            return Err(Error::validation(format!(
                "edge ({a}, {b}) out of range for {} qubits",
                self.n_qubits
            )));
        }
        Ok(())
    }

    fn push_edge(&mut self, (a, b): (usize, usize)) {
        self.edges.push((a, b));
        self.adjacency[a].push(b);
        self.adjacency[b].push(a);
    }

    /// Parses the edge-list text format.
    ///
    /// ```text
    /// # optional comments
    /// qubits 5
    /// 0 1
    /// 1 2
    /// ```
    ///
    /// Without a `qubits N` header the qubit count is one more than the
    /// largest index seen.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut declared: Option<usize> = None;
        let mut pairs = Vec::new();
        let mut seen_edge = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields[0] == "qubits" {
                if declared.is_some() || seen_edge {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "`qubits` header must appear once, before any edge".into(),
                    });
                }
                let n = match fields.as_slice() {
                    [_, n] => n.parse::<usize>().ok(),
                    _ => None,
                };
                declared = Some(n.ok_or_else(|| Error::Parse {
                    line: line_no,
                    message: format!("expected `qubits N`, got `{line}`"),
                })?);
                continue;
            }
            let parsed = match fields.as_slice() {
                [a, b] => a.parse::<usize>().ok().zip(b.parse::<usize>().ok()),
                _ => None,
            };
            let (a, b) = parsed.ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("expected two non-negative integers, got `{line}`"),
            })?;
            seen_edge = true;
            pairs.push((line_no, a, b));
        }

        let inferred = pairs
            .iter()
            .map(|&(_, a, b)| a.max(b) + 1)
            .max()
            .unwrap_or(0);
        let n_qubits = declared.unwrap_or(inferred);
        if n_qubits == 0 {
            return Err(Error::validation("edge list declares no qubits"));
        }
        let mut g = ConnectivityGraph {
            n_qubits,
            edges: Vec::with_capacity(pairs.len()),
            adjacency: vec![Vec::new(); n_qubits],
        };
        let mut seen = HashSet::new();
        for (line_no, a, b) in pairs {
            g.check_edge(a, b)
                .map_err(|e| Error::validation(format!("line {line_no}: {e}")))?;
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(Error::validation(format!(
                    "line {line_no}: duplicate edge ({a}, {b})"
                )));
            }
            g.push_edge(key);
        }
        Ok(g)
    }

    /// Serialises to the edge-list format, always with a `qubits` header.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("qubits {}\n", self.n_qubits);
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, qubit: usize) -> &[usize] {
        &self.adjacency[qubit]
    }

    pub fn degree(&self, qubit: usize) -> usize {
        self.adjacency[qubit].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// ξ = 2M/L.
    pub fn mean_degree(&self) -> f64 {
        (2 * self.edges.len()) as f64 / self.n_qubits as f64
    }

    /// Edge set as sorted normalised pairs, for order-insensitive comparison.
    pub fn edge_set(&self) -> Vec<(usize, usize)> {
        let mut e = self.edges.clone();
        e.sort_unstable();
        e
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n_qubits];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n_qubits
    }

    /// Relabels qubit `j` as `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n_qubits {
            return Err(Error::validation(
                "permutation length differs from qubit count",
            ));
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::validation("not a permutation"));
            }
        }
        ConnectivityGraph::new(
            self.n_qubits,
            self.edges.iter().map(|&(a, b)| (perm[a], perm[b])),
        )
    }
}

/// Heavy-hexagon lattice in the IBM Eagle numbering style.
///
/// `rows` rows of "row qubits" are joined by rows of degree-2 bridge qubits.
/// Each full row holds `4 * cells + 3` qubits. Bridges below an even row sit
/// on columns `0, 4, 8, ...`; below an odd row on columns `2, 6, 10, ...`.
/// In the first and last row, end columns touched by no bridge are dropped.
/// Qubits are numbered row by row, each bridge row following the row above it.
///
/// `heavy_hex(7, 3)` is the 127-qubit, 144-coupler Eagle layout.
pub fn heavy_hex(rows: usize, cells: usize) -> Result<ConnectivityGraph> {
    if rows == 0 || cells == 0 {
        return Err(Error::validation(
            "heavy_hex needs rows >= 1 and cells >= 1",
        ));
    }
    let width = 4 * cells + 3;
    let bridge_cols = |upper_row: usize| -> Vec<usize> {
        let offset = if upper_row.is_multiple_of(2) { 0 } else { 2 };
        (offset..width).step_by(4).collect()
    };

    // Which columns exist in each row.
    let mut row_cols: Vec<Vec<usize>> = vec![(0..width).collect(); rows];
    if rows > 1 {
        let keep_touched = |cols: &mut Vec<usize>, touched: &[usize]| {
            let first = *cols.first().unwrap();
            let last = *cols.last().unwrap();
            cols.retain(|&c| (c != first && c != last) || touched.contains(&c));
        };
        keep_touched(&mut row_cols[0], &bridge_cols(0));
        keep_touched(&mut row_cols[rows - 1], &bridge_cols(rows - 2));
    }

    let mut n = 0usize;
    let mut edges = Vec::new();
    let mut pending_bridges: Vec<(usize, usize)> = Vec::new(); // (bridge qubit, column)
    for (r, cols) in row_cols.iter().enumerate() {
        let mut this_row = vec![None; width];
        for &c in cols {
            this_row[c] = Some(n);
            if c > 0 {
                if let Some(left) = this_row[c - 1] {
                    edges.push((left, n));
                }
            }
            n += 1;
        }
        for &(b, c) in &pending_bridges {
            let below = this_row[c].expect("bridge column present in lower row");
            edges.push((b, below));
        }
        pending_bridges.clear();
        if r + 1 < rows {
            for c in bridge_cols(r) {
                let above = this_row[c].expect("bridge column present in upper row");
                edges.push((above, n));
                pending_bridges.push((n, c));
                n += 1;
            }
        }
    }
    ConnectivityGraph::new(n, edges)
}

/// The canonical 127-qubit heavy-hex device graph.
pub fn heavy_hex_eagle() -> ConnectivityGraph {
    heavy_hex(EAGLE_ROWS, EAGLE_CELLS).expect("canonical dimensions are valid")
}

pub fn ring(n: usize) -> Result<ConnectivityGraph> {
    if n < 3 {
        return Err(Error::validation(format!("ring needs n >= 3, got {n}")));
    }
    ConnectivityGraph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
}

pub fn chain(n: usize) -> Result<ConnectivityGraph> {
    ConnectivityGraph::new(n, (1..n).map(|i| (i - 1, i)))
}

pub fn complete(n: usize) -> Result<ConnectivityGraph> {
    ConnectivityGraph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
}

/// `n` uncoupled qubits.
pub fn edgeless(n: usize) -> Result<ConnectivityGraph> {
    ConnectivityGraph::new(n, std::iter::empty())
}

/// Resolves a built-in descriptor such as `heavy-hex`, `heavy-hex:7x3`,
/// `ring:12`, `chain:4`, `complete:5` or `edgeless:3`.
pub fn builtin(descriptor: &str) -> Result<ConnectivityGraph> {
    let (name, args) = match descriptor.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (descriptor, None),
    };
    let size = |args: Option<&str>| -> Result<usize> {
        args.ok_or_else(|| {
            Error::Usage(format!("topology `{name}` needs a size, e.g. `{name}:12`"))
        })?
        .parse::<usize>()
        .map_err(|_| Error::Usage(format!("bad size in topology `{descriptor}`")))
    };
    match name {
        "heavy-hex" | "eagle" => match args {
            None => Ok(heavy_hex_eagle()),
            Some(a) => {
                let (r, c) = a
                    .split_once(['x', ','])
                    .and_then(|(r, c)| Some((r.parse().ok()?, c.parse().ok()?)))
                    .ok_or_else(|| {
                        Error::Usage(format!(
                            "heavy-hex expects `heavy-hex:ROWSxCELLS`, got `{a}`"
                        ))
                    })?;
                heavy_hex(r, c)
            }
        },
        "ring" => ring(size(args)?),
        "chain" => chain(size(args)?),
        "complete" => complete(size(args)?),
        "edgeless" => edgeless(size(args)?),
        _ => Err(Error::Usage(format!("unknown topology `{descriptor}`"))),
    }
}
