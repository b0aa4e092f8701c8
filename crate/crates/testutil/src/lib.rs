//! Independent oracles and instance generators for testing the solver crate.
//!
//! Everything here deliberately avoids the code paths under test: the dense
//! solve is plain Gaussian elimination, tree-path oracles walk parent
//! pointers one step at a time, and shortest paths come from Bellman-Ford.

use kosz_core::graph::Graph;
use kosz_core::spanning_tree::SpanningTree;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense Laplacian of `g` as row-major `n x n`.
pub fn dense_laplacian(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.vertex_count();
    let mut a = vec![vec![0.0; n]; n];
    for (_, u, v, w) in g.edges() {
        a[u][u] += w;
        a[v][v] += w;
        a[u][v] -= w;
        a[v][u] -= w;
    }
    a
}

/// Solve a dense linear system by Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        assert!(a[col][col].abs() > 1e-300, "singular matrix");
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in (row + 1)..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    x
}

/// Mean-zero pseudoinverse solution of `Lx = b` for connected `g`.
///
/// Uses the rank-one completion `(L + J/n) x = b`, whose unique solution is
/// the mean-zero solution of the singular system when `b` is balanced.
pub fn pinv_solve(g: &Graph, b: &[f64]) -> Vec<f64> {
    let n = g.vertex_count();
    let mut a = dense_laplacian(g);
    for row in a.iter_mut() {
        for entry in row.iter_mut() {
            *entry += 1.0 / n as f64;
        }
    }
    let mut x = dense_solve(a, b.to_vec());
    let mean = x.iter().sum::<f64>() / n as f64;
    for xi in &mut x {
        *xi -= mean;
    }
    x
}

/// Bellman-Ford distances from `root` with edge length `w` (the spanning
/// tree construction metric).
pub fn bellman_ford(g: &Graph, root: usize) -> Vec<f64> {
    let n = g.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    dist[root] = 0.0;
    for _ in 0..n {
        let mut changed = false;
        for (_, u, v, w) in g.edges() {
            if dist[u] + w < dist[v] {
                dist[v] = dist[u] + w;
                changed = true;
            }
            if dist[v] + w < dist[u] {
                dist[u] = dist[v] + w;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

/// LCA by walking parent pointers up one step at a time.
pub fn naive_lca(t: &SpanningTree, mut u: usize, mut v: usize) -> usize {
    while t.depth(u) > t.depth(v) {
        u = t.parent(u);
    }
    while t.depth(v) > t.depth(u) {
        v = t.parent(v);
    }
    while u != v {
        u = t.parent(u);
        v = t.parent(v);
    }
    u
}

/// Weight sum along the tree path `u..v`, walking edges one at a time.
pub fn naive_path_weight(g: &Graph, t: &SpanningTree, u: usize, v: usize) -> f64 {
    let a = naive_lca(t, u, v);
    let mut total = 0.0;
    let mut x = u;
    while x != a {
        total += g.weight(t.parent_edge(x).unwrap());
        x = t.parent(x);
    }
    let mut x = v;
    while x != a {
        total += g.weight(t.parent_edge(x).unwrap());
        x = t.parent(x);
    }
    total
}

/// Resistance sum along the tree path `u..v`, walking edges one at a time.
pub fn naive_path_resistance(g: &Graph, t: &SpanningTree, u: usize, v: usize) -> f64 {
    let a = naive_lca(t, u, v);
    let mut total = 0.0;
    let mut x = u;
    while x != a {
        total += g.resistance(t.parent_edge(x).unwrap());
        x = t.parent(x);
    }
    let mut x = v;
    while x != a {
        total += g.resistance(t.parent_edge(x).unwrap());
        x = t.parent(x);
    }
    total
}

/// Random connected simple graph: a random attachment tree plus up to
/// `extra` additional random non-tree edges, optionally with random weights
/// in `[1, 8)`.
pub fn random_connected_graph(n: usize, extra: usize, weighted: bool, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut present = std::collections::HashSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        present.insert((u.min(v), u.max(v)));
        edges.push((u, v, 1.0));
    }
    for _ in 0..extra {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if present.insert(key) {
            edges.push((key.0, key.1, 1.0));
        }
    }
    if weighted {
        for e in &mut edges {
            e.2 = rng.random_range(1.0..8.0);
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Random spanning tree of a shape chosen by `shape % 3`: shallow random
/// attachment, a path, or a star-ish two-level tree.
pub fn random_tree_graph(n: usize, shape: u64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    match shape % 3 {
        0 => {
            for v in 1..n {
                let u = rng.random_range(0..v);
                edges.push((u, v, rng.random_range(1.0..8.0)));
            }
        }
        1 => {
            for v in 1..n {
                edges.push((v - 1, v, rng.random_range(1.0..8.0)));
            }
        }
        _ => {
            for v in 1..n {
                let u = if v < 3 {
                    0
                } else {
                    rng.random_range(1..3.min(v))
                };
                edges.push((u, v, rng.random_range(1.0..8.0)));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Balanced random demand with entries in `[-1, 1]`, exactly mean-shifted.
pub fn random_demand(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mean = b.iter().sum::<f64>() / n as f64;
    for x in &mut b {
        *x -= mean;
    }
    b
}
