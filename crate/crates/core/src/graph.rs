//! Weighted undirected graphs, their Laplacians, and benchmark generators.
//!
//! Edge weights are conductances (`w_e > 0`); resistances are always derived
//! as `r_e = 1/w_e` on demand. Edges carry stable ids `0..m`, and every edge
//! is visible from both endpoints through the adjacency lists.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use core::fmt::Write as _;

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Errors from graph construction and Laplacian operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("edge {u}-{v} has non-positive weight {weight}")]
    NonPositiveWeight { u: usize, v: usize, weight: f64 },
    #[error("grid must have at least 2 vertices, got {rows}x{cols}")]
    GridTooSmall { rows: usize, cols: usize },
    #[error("attachment k={k} must satisfy 1 <= k < n={n}")]
    BadAttachment { n: usize, k: usize },
    #[error("weight range [{lo}, {hi}) must satisfy 0 < lo < hi")]
    BadWeightRange { lo: f64, hi: f64 },
    #[error("vector length {got} does not match vertex count {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("demand vector is zero")]
    ZeroDemand,
}

/// Errors from parsing the plain-text edge-list format.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: expected {expected} fields, got {got}")]
    FieldCount {
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("line {line}: invalid number '{token}'")]
    InvalidNumber { line: usize, token: String },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
    #[error("expected {expected} edge lines, found {got}")]
    EdgeCount { expected: usize, got: usize },
    #[error("missing header line")]
    MissingHeader,
}

/// Undirected simple graph with strictly positive conductance weights.
///
/// Immutable after construction; cheap to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    /// Endpoint table, canonicalized `u < v`, indexed by edge id.
    edges: Vec<(u32, u32)>,
    weights: Vec<f64>,
    /// Per-vertex list of `(neighbor, edge id)`.
    adj: Vec<Vec<(u32, u32)>>,
}

impl Graph {
    /// Build a graph from an edge list, validating simplicity and weights.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut g = Graph {
            n,
            edges: Vec::new(),
            weights: Vec::new(),
            adj: vec![Vec::new(); n],
        };
        let mut seen = BTreeSet::new();
        for (u, v, w) in edges {
            g.push_edge_checked(u, v, w, &mut seen)?;
        }
        Ok(g)
    }

    fn push_edge_checked(
        &mut self,
        u: usize,
        v: usize,
        w: f64,
        seen: &mut BTreeSet<(u32, u32)>,
    ) -> Result<(), GraphError> {
        let n = self.n;
        if u >= n {
            return Err(GraphError::VertexOutOfRange { vertex: u, n });
        }
        if v >= n {
            return Err(GraphError::VertexOutOfRange { vertex: v, n });
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if w <= 0.0 || !w.is_finite() {
            return Err(GraphError::NonPositiveWeight { u, v, weight: w });
        }
        let key = (u.min(v) as u32, u.max(v) as u32);
        if !seen.insert(key) {
            return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
        }
        let id = self.edges.len() as u32;
        self.edges.push(key);
        self.weights.push(w);
        self.adj[u].push((v as u32, id));
        self.adj[v].push((u as u32, id));
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonicalized endpoints `(u, v)` with `u < v` of edge `e`.
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        let (u, v) = self.edges[e];
        (u as usize, v as usize)
    }

    pub fn weight(&self, e: usize) -> f64 {
        self.weights[e]
    }

    /// Resistance `1/w_e` of edge `e`.
    pub fn resistance(&self, e: usize) -> f64 {
        1.0 / self.weights[e]
    }

    /// Neighbors of `u` as `(neighbor, edge id)` pairs, in insertion order.
    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj[u].iter().map(|&(v, e)| (v as usize, e as usize))
    }

    /// Iterate over all edges as `(edge id, u, v, weight)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        self.edges
            .iter()
            .zip(&self.weights)
            .enumerate()
            .map(|(e, (&(u, v), &w))| (e, u as usize, v as usize, w))
    }

    /// Weighted degree of `u` (the Laplacian diagonal entry).
    pub fn weighted_degree(&self, u: usize) -> f64 {
        self.adj[u]
            .iter()
            .map(|&(_, e)| self.weights[e as usize])
            .sum()
    }

    /// Apply the Laplacian: `(Lx)_u = sum_{v ~ u} w_uv (x_u - x_v)`.
    pub fn laplacian_apply(&self, x: &[f64]) -> Result<Vec<f64>, GraphError> {
        let mut out = vec![0.0; self.n];
        self.laplacian_apply_into(x, &mut out)?;
        Ok(out)
    }

    /// Allocation-free variant of [`laplacian_apply`](Self::laplacian_apply).
    pub fn laplacian_apply_into(&self, x: &[f64], out: &mut [f64]) -> Result<(), GraphError> {
        if x.len() != self.n {
            return Err(GraphError::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        if out.len() != self.n {
            return Err(GraphError::DimensionMismatch {
                expected: self.n,
                got: out.len(),
            });
        }
        out.fill(0.0);
        for (&(u, v), &w) in self.edges.iter().zip(&self.weights) {
            let (u, v) = (u as usize, v as usize);
            let d = w * (x[u] - x[v]);
            out[u] += d;
            out[v] -= d;
        }
        Ok(())
    }

    /// Relative residual `||b - Lx||_2 / ||b||_2`. Rejects `b = 0`.
    pub fn relative_residual(&self, b: &[f64], x: &[f64]) -> Result<f64, GraphError> {
        if b.len() != self.n {
            return Err(GraphError::DimensionMismatch {
                expected: self.n,
                got: b.len(),
            });
        }
        let lx = self.laplacian_apply(x)?;
        let mut num = 0.0;
        let mut den = 0.0;
        for (bi, lxi) in b.iter().zip(&lx) {
            num += (bi - lxi) * (bi - lxi);
            den += bi * bi;
        }
        if den == 0.0 {
            return Err(GraphError::ZeroDemand);
        }
        Ok((num / den).sqrt())
    }

    /// Laplacian quadratic form `x^T L x = sum_e w_e (x_u - x_v)^2`.
    pub fn quadratic_form(&self, x: &[f64]) -> Result<f64, GraphError> {
        if x.len() != self.n {
            return Err(GraphError::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut q = 0.0;
        for (&(u, v), &w) in self.edges.iter().zip(&self.weights) {
            let d = x[u as usize] - x[v as usize];
            q += w * d * d;
        }
        Ok(q)
    }

    /// Breadth-first reachability of all vertices from vertex 0.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let mut seen = vec![false; self.n];
        let mut queue = alloc::collections::VecDeque::new();
        seen[0] = true;
        queue.push_back(0usize);
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adj[u] {
                let v = v as usize;
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    /// Copy of this graph with fresh i.i.d. uniform weights in `[lo, hi)`.
    ///
    /// Topology and edge ids are preserved; both adjacency entries of an edge
    /// see the same new weight. Deterministic for a fixed `rng_seed`.
    pub fn randomize_weights(&self, lo: f64, hi: f64, rng_seed: u64) -> Result<Self, GraphError> {
        if !(lo > 0.0 && hi > lo) {
            return Err(GraphError::BadWeightRange { lo, hi });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let mut g = self.clone();
        for w in &mut g.weights {
            *w = rng.random_range(lo..hi);
        }
        Ok(g)
    }

    /// Serialize as the plain-text edge list: `n m` header, then `u v w` per
    /// edge in edge-id order. Weights print in shortest round-trip form.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n, self.edges.len());
        for (&(u, v), w) in self.edges.iter().zip(&self.weights) {
            let _ = writeln!(s, "{} {} {}", u, v, w);
        }
        s
    }

    /// Parse the edge-list format written by [`to_edge_list`](Self::to_edge_list).
    ///
    /// Errors carry 1-based line numbers. Blank lines are not allowed between
    /// records; trailing newline is optional.
    pub fn from_edge_list(text: &str) -> Result<Self, ParseError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(ParseError::MissingHeader)?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(ParseError::FieldCount {
                line: 1,
                expected: 2,
                got: fields.len(),
            });
        }
        let n = parse_num::<usize>(fields[0], 1)?;
        let m = parse_num::<usize>(fields[1], 1)?;
        let mut g = Graph {
            n,
            edges: Vec::with_capacity(m),
            weights: Vec::with_capacity(m),
            adj: vec![Vec::new(); n],
        };
        let mut seen = BTreeSet::new();
        let mut count = 0usize;
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.trim().is_empty() && count == m {
                continue; // trailing blank line
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(ParseError::FieldCount {
                    line: lineno,
                    expected: 3,
                    got: fields.len(),
                });
            }
            let u = parse_num::<usize>(fields[0], lineno)?;
            let v = parse_num::<usize>(fields[1], lineno)?;
            let w = parse_num::<f64>(fields[2], lineno)?;
            g.push_edge_checked(u, v, w, &mut seen)
                .map_err(|source| ParseError::Graph {
                    line: lineno,
                    source,
                })?;
            count += 1;
        }
        if count != m {
            return Err(ParseError::EdgeCount {
                expected: m,
                got: count,
            });
        }
        Ok(g)
    }
}

fn parse_num<T: core::str::FromStr>(token: &str, line: usize) -> Result<T, ParseError> {
    token.parse().map_err(|_| ParseError::InvalidNumber {
        line,
        token: token.into(),
    })
}

/// Rectangular `k x l` grid with unit weights, vertices indexed row-major.
///
/// `n = k*l`, `m = k(l-1) + l(k-1)`; degenerate `1 x c` grids are paths.
pub fn grid_graph(rows: usize, cols: usize) -> Result<Graph, GraphError> {
    if rows * cols < 2 {
        return Err(GraphError::GridTooSmall { rows, cols });
    }
    let idx = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::with_capacity(rows * (cols - 1) + cols * (rows - 1));
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((idx(r, c), idx(r, c + 1), 1.0));
            }
            if r + 1 < rows {
                edges.push((idx(r, c), idx(r + 1, c), 1.0));
            }
        }
    }
    Graph::from_edges(rows * cols, edges)
}

/// Barabási–Albert preferential-attachment graph with attachment `k`.
///
/// The seed is a complete graph on `k` vertices; each later vertex attaches
/// to `k` distinct existing vertices drawn with probability proportional to
/// current degree. Unit weights; `m = k(k-1)/2 + k(n-k)`. Deterministic for
/// a fixed `rng_seed`.
pub fn barabasi_albert(n: usize, k: usize, rng_seed: u64) -> Result<Graph, GraphError> {
    if k < 1 || k >= n {
        return Err(GraphError::BadAttachment { n, k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut edges = Vec::with_capacity(k * (k - 1) / 2 + k * (n - k));
    // Each endpoint occurrence gives a vertex one lottery ticket, so uniform
    // draws from this list are degree-proportional.
    let mut tickets: Vec<u32> = Vec::with_capacity(2 * (k * (k - 1) / 2 + k * (n - k)));
    for u in 0..k {
        for v in (u + 1)..k {
            edges.push((u, v, 1.0));
            tickets.push(u as u32);
            tickets.push(v as u32);
        }
    }
    let mut picked: Vec<u32> = Vec::with_capacity(k);
    for v in k..n {
        picked.clear();
        while picked.len() < k {
            let t = tickets[rng.random_range(0..tickets.len())];
            if !picked.contains(&t) {
                picked.push(t);
            }
        }
        for &u in &picked {
            edges.push((u as usize, v, 1.0));
            tickets.push(u);
            tickets.push(v as u32);
        }
    }
    Graph::from_edges(n, edges)
}

/// Demand vector `b`: prescribed current out of each node. Entries must sum
/// to zero (within `1e-9 * ||b||_1`) so the system `Lx = b` is consistent.
#[derive(Debug, Clone, PartialEq)]
pub struct Demand(Vec<f64>);

/// Error from constructing an unbalanced demand vector.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("demand entries sum to {sum}, exceeding 1e-9 * l1-norm ({l1})")]
pub struct UnbalancedDemand {
    pub sum: f64,
    pub l1: f64,
}

impl Demand {
    pub fn new(b: Vec<f64>) -> Result<Self, UnbalancedDemand> {
        let sum: f64 = b.iter().sum();
        let l1: f64 = b.iter().map(|x| x.abs()).sum();
        if sum.abs() > 1e-9 * l1 {
            return Err(UnbalancedDemand { sum, l1 });
        }
        Ok(Demand(b))
    }

    /// Unit source/sink pair: `+1` at `source`, `-1` at `sink`.
    pub fn pair(n: usize, source: usize, sink: usize) -> Self {
        let mut b = vec![0.0; n];
        b[source] = 1.0;
        b[sink] = -1.0;
        Demand(b)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl core::ops::Deref for Demand {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}
