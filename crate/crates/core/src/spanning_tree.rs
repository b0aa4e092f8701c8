//! Spanning-tree construction, stretch, and LCA queries.
//!
//! Kruskal and Dijkstra measure edge length as the weight `w_e` itself, the
//! same quantity the stretch definition sums, so "minimum weight" and
//! "minimum distance" carry their literal meaning. The star-decomposition
//! tree works in resistance space `r_e = 1/w_e`, the metric the solver's
//! convergence theory lives in. The stretch of an edge follows the
//! weight-based definition
//! `st(uv) = (sum of w over the tree path u..v) / w_uv`; tree edges have
//! stretch exactly 1.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;

use core::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

/// Errors from spanning-tree construction and stretch computation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TreeError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph is empty")]
    Empty,
    #[error("tree does not span the graph: {0}")]
    NotSpanning(&'static str),
    #[error("expected the {rows}x{cols} grid graph ({reason})")]
    GridMismatch {
        rows: usize,
        cols: usize,
        reason: &'static str,
    },
    #[error("grid must have at least 2 vertices, got {rows}x{cols}")]
    GridTooSmall { rows: usize, cols: usize },
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
}

/// Rooted spanning tree with per-vertex parent pointers, hop and resistive
/// depths, a parents-first traversal order, and an O(1) LCA index.
#[derive(Debug, Clone)]
pub struct SpanningTree {
    root: u32,
    parent: Vec<u32>,
    /// Graph edge id of the parent edge; `u32::MAX` at the root.
    parent_edge: Vec<u32>,
    /// Resistance of the parent edge; 0 at the root.
    parent_resistance: Vec<f64>,
    depth: Vec<u32>,
    /// Resistive distance to the root.
    rdepth: Vec<f64>,
    /// Weight sum along the root path (stretch prefix sums).
    wdepth: Vec<f64>,
    /// BFS order from the root: parents precede children.
    order: Vec<u32>,
    // Euler tour + sparse table for O(1) LCA queries.
    euler: Vec<u32>,
    euler_first: Vec<u32>,
    sparse: Vec<Vec<u32>>,
}

const NO_EDGE: u32 = u32::MAX;

impl SpanningTree {
    /// Assemble a rooted tree from `n-1` edge ids of `g`.
    fn from_tree_edges(g: &Graph, tree_edges: &[usize], root: usize) -> Result<Self, TreeError> {
        let n = g.vertex_count();
        if n == 0 {
            return Err(TreeError::Empty);
        }
        if root >= n {
            return Err(TreeError::VertexOutOfRange { vertex: root, n });
        }
        if tree_edges.len() != n - 1 {
            return Err(TreeError::NotSpanning("edge count is not n-1"));
        }
        let mut adj: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
        for &e in tree_edges {
            let (u, v) = g.endpoints(e);
            adj[u].push((v as u32, e as u32));
            adj[v].push((u as u32, e as u32));
        }

        let mut parent = vec![u32::MAX; n];
        let mut parent_edge = vec![NO_EDGE; n];
        let mut parent_resistance = vec![0.0; n];
        let mut depth = vec![0u32; n];
        let mut rdepth = vec![0.0; n];
        let mut wdepth = vec![0.0; n];
        let mut order = Vec::with_capacity(n);

        parent[root] = root as u32;
        order.push(root as u32);
        let mut head = 0;
        while head < order.len() {
            let u = order[head] as usize;
            head += 1;
            for &(v, e) in &adj[u] {
                let v = v as usize;
                if parent[v] == u32::MAX {
                    parent[v] = u as u32;
                    parent_edge[v] = e;
                    parent_resistance[v] = g.resistance(e as usize);
                    depth[v] = depth[u] + 1;
                    rdepth[v] = rdepth[u] + parent_resistance[v];
                    wdepth[v] = wdepth[u] + g.weight(e as usize);
                    order.push(v as u32);
                }
            }
        }
        if order.len() != n {
            return Err(TreeError::NotSpanning(
                "tree edges do not reach every vertex",
            ));
        }

        // Children in BFS order so the Euler tour is deterministic.
        let mut children: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &v in order.iter().skip(1) {
            children[parent[v as usize] as usize].push(v);
        }
        let mut euler = Vec::with_capacity(2 * n - 1);
        let mut euler_first = vec![u32::MAX; n];
        let mut stack: Vec<(u32, u32)> = vec![(root as u32, 0)];
        euler_first[root] = 0;
        euler.push(root as u32);
        while let Some(&mut (v, ref mut ci)) = stack.last_mut() {
            let v = v as usize;
            if (*ci as usize) < children[v].len() {
                let c = children[v][*ci as usize];
                *ci += 1;
                stack.push((c, 0));
                euler_first[c as usize] = euler.len() as u32;
                euler.push(c);
            } else {
                stack.pop();
                if let Some(&(p, _)) = stack.last() {
                    euler.push(p);
                }
            }
        }

        let sparse = build_sparse(&euler, &depth);

        Ok(SpanningTree {
            root: root as u32,
            parent,
            parent_edge,
            parent_resistance,
            depth,
            rdepth,
            wdepth,
            order,
            euler,
            euler_first,
            sparse,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root as usize
    }

    pub fn parent(&self, v: usize) -> usize {
        self.parent[v] as usize
    }

    /// Parent arrays for serialization; `parents()[root] == root`.
    pub fn parents(&self) -> &[u32] {
        &self.parent
    }

    /// Graph edge id of `v`'s parent edge; `None` at the root.
    pub fn parent_edge(&self, v: usize) -> Option<usize> {
        (self.parent_edge[v] != NO_EDGE).then(|| self.parent_edge[v] as usize)
    }

    pub fn parent_resistance(&self, v: usize) -> f64 {
        self.parent_resistance[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v] as usize
    }

    /// Resistive distance from `v` to the root.
    pub fn rdepth(&self, v: usize) -> f64 {
        self.rdepth[v]
    }

    /// Traversal order from the root; parents precede children.
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    /// True if graph edge `e` (with endpoints `u`, `v`) is a tree edge.
    pub fn contains_edge(&self, e: usize, u: usize, v: usize) -> bool {
        self.parent_edge[u] == e as u32 || self.parent_edge[v] == e as u32
    }

    /// Lowest common ancestor of `u` and `v` under this tree's root.
    pub fn lca(&self, u: usize, v: usize) -> usize {
        if u == v {
            return u;
        }
        let a = self.euler_first[u] as usize;
        let b = self.euler_first[v] as usize;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let len = hi - lo + 1;
        let j = usize::BITS as usize - 1 - (len.leading_zeros() as usize);
        let p1 = self.argmin(j, lo);
        let p2 = self.argmin(j, hi + 1 - (1 << j));
        let (v1, v2) = (self.euler[p1] as usize, self.euler[p2] as usize);
        if self.depth[v1] <= self.depth[v2] {
            v1
        } else {
            v2
        }
    }

    fn argmin(&self, level: usize, i: usize) -> usize {
        if level == 0 {
            i
        } else {
            self.sparse[level - 1][i] as usize
        }
    }

    /// Resistance sum along the tree path `u..v` (closed form via LCA).
    pub fn path_resistance(&self, u: usize, v: usize) -> f64 {
        let a = self.lca(u, v);
        self.rdepth[u] + self.rdepth[v] - 2.0 * self.rdepth[a]
    }

    /// Weight sum along the tree path `u..v`.
    pub fn path_weight(&self, u: usize, v: usize) -> f64 {
        let a = self.lca(u, v);
        self.wdepth[u] + self.wdepth[v] - 2.0 * self.wdepth[a]
    }

    /// Check that this tree was built over `g` (edge ids and endpoints line up).
    pub fn spans(&self, g: &Graph) -> bool {
        if self.parent.len() != g.vertex_count() {
            return false;
        }
        for v in 0..self.parent.len() {
            if v == self.root as usize {
                continue;
            }
            let e = self.parent_edge[v] as usize;
            if e >= g.edge_count() {
                return false;
            }
            let (a, b) = g.endpoints(e);
            let p = self.parent[v] as usize;
            if !((a == v && b == p) || (a == p && b == v)) {
                return false;
            }
        }
        true
    }
}

/// Sparse table over the Euler tour: `rows[j-1][i]` is the position of the
/// minimum-depth vertex in `euler[i .. i + 2^j)`.
fn build_sparse(euler: &[u32], depth: &[u32]) -> Vec<Vec<u32>> {
    let len = euler.len();
    let levels = if len <= 1 {
        0
    } else {
        usize::BITS as usize - 1 - (len.leading_zeros() as usize)
    };
    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(levels);
    for j in 1..=levels {
        let half = 1usize << (j - 1);
        let width = len + 1 - (1 << j);
        let mut row = Vec::with_capacity(width);
        for i in 0..width {
            let a = if j == 1 { i } else { rows[j - 2][i] as usize };
            let b = if j == 1 {
                i + half
            } else {
                rows[j - 2][i + half] as usize
            };
            row.push(if depth[euler[a] as usize] <= depth[euler[b] as usize] {
                a as u32
            } else {
                b as u32
            });
        }
        rows.push(row);
    }
    rows
}

/// Minimum-weight spanning tree via Kruskal with union-find (union by
/// size, path compression). Ties broken by edge id. Rooted at 0.
pub fn kruskal_st(g: &Graph) -> Result<SpanningTree, TreeError> {
    if !g.is_connected() {
        return Err(TreeError::Disconnected);
    }
    let mut ids: Vec<u32> = (0..g.edge_count() as u32).collect();
    ids.sort_unstable_by(|&a, &b| {
        g.weight(a as usize)
            .partial_cmp(&g.weight(b as usize))
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    let n = g.vertex_count();
    let mut uf = UnionFind::new(n);
    let mut tree = Vec::with_capacity(n - 1);
    for &e in &ids {
        let (u, v) = g.endpoints(e as usize);
        if uf.unite(u, v) {
            tree.push(e as usize);
            if tree.len() == n - 1 {
                break;
            }
        }
    }
    SpanningTree::from_tree_edges(g, &tree, 0)
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn root(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            // halving compression
            let gp = self.parent[self.parent[x] as usize];
            self.parent[x] = gp;
            x = gp as usize;
        }
        x
    }

    fn unite(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.root(x), self.root(y));
        if rx == ry {
            return false;
        }
        let (big, small) = if self.size[rx] >= self.size[ry] {
            (rx, ry)
        } else {
            (ry, rx)
        };
        self.parent[small] = big as u32;
        self.size[big] += self.size[small];
        true
    }
}

#[derive(Copy, Clone)]
struct HeapItem {
    dist: f64,
    vertex: u32,
}

// Min-heap by distance, vertex id as tie-break.
impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapItem {}

/// Minimum-distance spanning tree: shortest paths from `root` with edge
/// length `w_e`, via Dijkstra with a binary heap.
pub fn dijkstra_st(g: &Graph, root: usize) -> Result<SpanningTree, TreeError> {
    let n = g.vertex_count();
    if root >= n {
        return Err(TreeError::VertexOutOfRange { vertex: root, n });
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut pred_edge = vec![NO_EDGE; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[root] = 0.0;
    heap.push(HeapItem {
        dist: 0.0,
        vertex: root as u32,
    });
    while let Some(HeapItem { dist: d, vertex: u }) = heap.pop() {
        let u = u as usize;
        if done[u] {
            continue;
        }
        done[u] = true;
        for (v, e) in g.neighbors(u) {
            let nd = d + g.weight(e);
            if nd < dist[v] {
                dist[v] = nd;
                pred_edge[v] = e as u32;
                heap.push(HeapItem {
                    dist: nd,
                    vertex: v as u32,
                });
            }
        }
    }
    if done.iter().any(|&x| !x) {
        return Err(TreeError::Disconnected);
    }
    let tree: Vec<usize> = (0..n)
        .filter(|&v| v != root)
        .map(|v| pred_edge[v] as usize)
        .collect();
    SpanningTree::from_tree_edges(g, &tree, root)
}

/// Tunable radii of the star-decomposition tree, as fractions of the
/// component radius: the central ball radius is sampled from
/// `[ball_lo, ball_hi)`, cone widths from `[0, cone_hi)`.
#[derive(Debug, Clone, Copy)]
pub struct StarDecompParams {
    pub ball_lo: f64,
    pub ball_hi: f64,
    pub cone_hi: f64,
}

impl Default for StarDecompParams {
    fn default() -> Self {
        StarDecompParams {
            ball_lo: 1.0 / 3.0,
            ball_hi: 2.0 / 3.0,
            cone_hi: 1.0 / 3.0,
        }
    }
}

/// Low-stretch spanning tree by recursive star decomposition (Elkin et al.):
/// grow a central ball around the component's center, carve the remainder
/// into cones around anchor vertices on the ball's shell, connect each cone
/// to the assigned region by a single bridge edge, and recurse on every
/// part. A cone admits a vertex only if routing it through the anchor adds
/// at most the sampled cone width over its direct distance from the center,
/// so cones stay thin where the graph offers many alternative routes.
/// Radii are sampled from `rng_seed`; rooted at 0.
pub fn elkin_st(g: &Graph, rng_seed: u64) -> Result<SpanningTree, TreeError> {
    elkin_st_with_params(g, rng_seed, StarDecompParams::default())
}

pub fn elkin_st_with_params(
    g: &Graph,
    rng_seed: u64,
    params: StarDecompParams,
) -> Result<SpanningTree, TreeError> {
    if !g.is_connected() {
        return Err(TreeError::Disconnected);
    }
    let n = g.vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut tree_edges: Vec<usize> = Vec::with_capacity(n - 1);

    // Epoch markers avoid clearing per-vertex state between components.
    let mut in_comp = vec![0u32; n];
    let mut assigned = vec![false; n];
    let mut dist = vec![f64::INFINITY; n];
    let mut epoch = 0u32;

    let mut work: Vec<(Vec<u32>, u32)> = vec![((0..n as u32).collect(), 0)];
    while let Some((comp, center)) = work.pop() {
        if comp.len() <= 1 {
            continue;
        }
        if comp.len() == 2 {
            let (a, b) = (comp[0] as usize, comp[1] as usize);
            let e = g
                .neighbors(a)
                .find(|&(v, _)| v == b)
                .map(|(_, e)| e)
                .expect("star decomposition parts stay connected");
            tree_edges.push(e);
            continue;
        }

        epoch += 1;
        for &v in &comp {
            in_comp[v as usize] = epoch;
            assigned[v as usize] = false;
            dist[v as usize] = f64::INFINITY;
        }

        // Full Dijkstra over the component to learn its radius.
        let mut heap = BinaryHeap::new();
        dist[center as usize] = 0.0;
        heap.push(HeapItem {
            dist: 0.0,
            vertex: center,
        });
        let mut radius = 0.0f64;
        while let Some(HeapItem { dist: d, vertex: u }) = heap.pop() {
            let u = u as usize;
            if d > dist[u] {
                continue;
            }
            radius = radius.max(d);
            for (v, e) in g.neighbors(u) {
                if in_comp[v] != epoch {
                    continue;
                }
                let nd = d + g.resistance(e);
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(HeapItem {
                        dist: nd,
                        vertex: v as u32,
                    });
                }
            }
        }

        let cone_hi = params.cone_hi * radius;
        let r0 = rng.random_range(params.ball_lo * radius..params.ball_hi * radius);
        let mut ball: Vec<u32> = Vec::new();
        for &v in &comp {
            if dist[v as usize] <= r0 {
                assigned[v as usize] = true;
                ball.push(v);
            }
        }
        let mut parts: Vec<(Vec<u32>, u32)> = Vec::new();
        let mut remaining = comp.len() - ball.len();

        // Anchor candidates: unassigned vertices adjacent to the assigned
        // region, with the edge that will bridge them in.
        let mut queue: Vec<(u32, u32)> = Vec::new();
        for &v in &ball {
            for (w, e) in g.neighbors(v as usize) {
                if in_comp[w] == epoch && !assigned[w] {
                    queue.push((w as u32, e as u32));
                }
            }
        }
        parts.push((ball, center));

        let mut qi = 0;
        while remaining > 0 {
            let (anchor, bridge) = loop {
                if qi < queue.len() {
                    let (x, e) = queue[qi];
                    qi += 1;
                    if !assigned[x as usize] {
                        break (x, e);
                    }
                } else {
                    // Remaining region only touches already-carved parts;
                    // bridge from any assigned vertex to keep the tree valid.
                    let mut found = None;
                    'scan: for &v in &comp {
                        if assigned[v as usize] {
                            continue;
                        }
                        for (w, e) in g.neighbors(v as usize) {
                            if in_comp[w] == epoch && assigned[w] {
                                found = Some((v, e as u32));
                                break 'scan;
                            }
                        }
                    }
                    break found.expect("component stays connected");
                }
            };

            let width = rng.random_range(0.0..cone_hi);
            let mut cone: Vec<u32> = Vec::new();
            let mut cone_dist = BinaryHeap::new();
            // Distances from the anchor live in a local map; `dist` keeps the
            // center distances the cone condition needs.
            let mut local = alloc::collections::BTreeMap::new();
            local.insert(anchor, 0.0f64);
            cone_dist.push(HeapItem {
                dist: 0.0,
                vertex: anchor,
            });
            let detour_base = dist[anchor as usize];
            while let Some(HeapItem { dist: d, vertex: u }) = cone_dist.pop() {
                if assigned[u as usize] {
                    continue;
                }
                if local.get(&u).is_some_and(|&best| d > best) {
                    continue;
                }
                assigned[u as usize] = true;
                cone.push(u);
                remaining -= 1;
                for (v, e) in g.neighbors(u as usize) {
                    if in_comp[v] != epoch || assigned[v] {
                        continue;
                    }
                    let nd = d + g.resistance(e);
                    // cone condition: going through the anchor may exceed the
                    // direct center distance by at most the cone width
                    if nd + detour_base - dist[v] <= width
                        && local.get(&(v as u32)).is_none_or(|&best| nd < best)
                    {
                        local.insert(v as u32, nd);
                        cone_dist.push(HeapItem {
                            dist: nd,
                            vertex: v as u32,
                        });
                    }
                }
            }
            tree_edges.push(bridge as usize);
            for &v in &cone {
                for (w, e) in g.neighbors(v as usize) {
                    if in_comp[w] == epoch && !assigned[w] {
                        queue.push((w as u32, e as u32));
                    }
                }
            }
            parts.push((cone, anchor));
        }
        work.extend(parts);
    }
    SpanningTree::from_tree_edges(g, &tree_edges, 0)
}

/// The grid spanning tree: split the `rows x cols` grid into four quadrants
/// at `⌈rows/2⌉` and `⌈cols/2⌉`, recurse, and join the four quadrant corners
/// around the grid center with three edges forming a U that opens upward.
/// Degenerate `1 x c` and `r x 1` grids become paths. `g` must be the
/// matching grid graph (any weights). Rooted at 0.
pub fn special_grid_st(g: &Graph, rows: usize, cols: usize) -> Result<SpanningTree, TreeError> {
    if rows * cols < 2 {
        return Err(TreeError::GridTooSmall { rows, cols });
    }
    if g.vertex_count() != rows * cols {
        return Err(TreeError::GridMismatch {
            rows,
            cols,
            reason: "vertex count",
        });
    }
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(rows * cols - 1);
    u_shape_tree(0, 0, rows, cols, cols, &mut pairs);
    let mut tree = Vec::with_capacity(pairs.len());
    for (u, v) in pairs {
        let e = g
            .neighbors(u)
            .find(|&(w, _)| w == v)
            .map(|(_, e)| e)
            .ok_or(TreeError::GridMismatch {
                rows,
                cols,
                reason: "missing grid edge",
            })?;
        tree.push(e);
    }
    SpanningTree::from_tree_edges(g, &tree, 0)
}

fn u_shape_tree(
    r0: usize,
    c0: usize,
    rows: usize,
    cols: usize,
    total_cols: usize,
    out: &mut Vec<(usize, usize)>,
) {
    let idx = |r: usize, c: usize| r * total_cols + c;
    if rows == 1 {
        for c in 0..cols - 1 {
            out.push((idx(r0, c0 + c), idx(r0, c0 + c + 1)));
        }
        return;
    }
    if cols == 1 {
        for r in 0..rows - 1 {
            out.push((idx(r0 + r, c0), idx(r0 + r + 1, c0)));
        }
        return;
    }
    let rs = rows.div_ceil(2);
    let cs = cols.div_ceil(2);
    u_shape_tree(r0, c0, rs, cs, total_cols, out);
    u_shape_tree(r0, c0 + cs, rs, cols - cs, total_cols, out);
    u_shape_tree(r0 + rs, c0, rows - rs, cs, total_cols, out);
    u_shape_tree(r0 + rs, c0 + cs, rows - rs, cols - cs, total_cols, out);
    // U around the center: left and right vertical connectors plus the
    // bottom rung; the top stays open.
    let (rt, rb) = (r0 + rs - 1, r0 + rs);
    let (cl, cr) = (c0 + cs - 1, c0 + cs);
    out.push((idx(rt, cl), idx(rb, cl)));
    out.push((idx(rb, cl), idx(rb, cr)));
    out.push((idx(rt, cr), idx(rb, cr)));
}

/// Per-edge stretch, total `st(T)` and average `st(T)/m`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StretchReport {
    pub per_edge: Vec<f64>,
    pub total: f64,
    pub average: f64,
}

/// Stretch of every edge of `g` w.r.t. `t`, from weight-depth prefix sums
/// split at the LCA. Tree edges contribute exactly 1.
pub fn stretch(g: &Graph, t: &SpanningTree) -> Result<StretchReport, TreeError> {
    if !t.spans(g) {
        return Err(TreeError::NotSpanning("tree was not built over this graph"));
    }
    let m = g.edge_count();
    let mut per_edge = Vec::with_capacity(m);
    let mut total = 0.0;
    for (e, u, v, w) in g.edges() {
        let st = if t.contains_edge(e, u, v) {
            1.0
        } else {
            t.path_weight(u, v) / w
        };
        per_edge.push(st);
        total += st;
    }
    Ok(StretchReport {
        per_edge,
        total,
        average: total / m as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{barabasi_albert, grid_graph, Graph};

    fn assert_valid_st(g: &Graph, t: &SpanningTree) {
        let n = g.vertex_count();
        assert_eq!(t.vertex_count(), n);
        assert!(t.spans(g));
        // every vertex reaches the root in < n steps, depths consistent
        for v in 0..n {
            let mut steps = 0;
            let mut x = v;
            while x != t.root() {
                let p = t.parent(x);
                assert_eq!(t.depth(x), t.depth(p) + 1);
                let r = g.resistance(t.parent_edge(x).unwrap());
                assert!((t.rdepth(x) - (t.rdepth(p) + r)).abs() < 1e-12);
                x = p;
                steps += 1;
                assert!(steps < n);
            }
        }
        // order is topological from the root
        let mut seen = vec![false; n];
        assert_eq!(t.order()[0] as usize, t.root());
        for &v in t.order() {
            let v = v as usize;
            assert!(v == t.root() || seen[t.parent(v)]);
            seen[v] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn kruskal_prefers_low_weight() {
        let g = Graph::from_edges(3, [(0, 1, 2.0), (1, 2, 2.0), (0, 2, 1.0)]).unwrap();
        let t = kruskal_st(&g).unwrap();
        assert_valid_st(&g, &t);
        // weights 1.0 and 2.0 (first id) win; edge 1-2 stays off-tree
        assert!(t.contains_edge(2, 0, 2));
        assert!(t.contains_edge(0, 0, 1));
        assert!(!t.contains_edge(1, 1, 2));
    }

    #[test]
    fn kruskal_on_tree_is_identity() {
        let g = Graph::from_edges(4, [(0, 1, 1.0), (1, 2, 3.0), (1, 3, 0.5)]).unwrap();
        let t = kruskal_st(&g).unwrap();
        assert_valid_st(&g, &t);
        for (e, u, v, _) in g.edges() {
            assert!(t.contains_edge(e, u, v));
        }
    }

    #[test]
    fn kruskal_unweighted_is_some_valid_st() {
        let g = grid_graph(5, 7).unwrap();
        let t = kruskal_st(&g).unwrap();
        assert_valid_st(&g, &t);
    }

    #[test]
    fn disconnected_inputs_rejected() {
        let g = Graph::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(matches!(kruskal_st(&g), Err(TreeError::Disconnected)));
        assert!(matches!(dijkstra_st(&g, 0), Err(TreeError::Disconnected)));
        assert!(matches!(elkin_st(&g, 1), Err(TreeError::Disconnected)));
    }

    #[test]
    fn dijkstra_star_and_triangle() {
        // star with center 0
        let g = Graph::from_edges(5, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (0, 4, 1.0)]).unwrap();
        let t = dijkstra_st(&g, 0).unwrap();
        assert_valid_st(&g, &t);
        for v in 1..5 {
            assert_eq!(t.parent(v), 0);
        }

        let g = Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let t = dijkstra_st(&g, 0).unwrap();
        assert_eq!(t.parent(1), 0);
        assert_eq!(t.parent(2), 0);
    }

    #[test]
    fn elkin_tree_input_is_identity() {
        let g =
            Graph::from_edges(5, [(0, 1, 1.0), (1, 2, 2.0), (1, 3, 1.0), (3, 4, 0.25)]).unwrap();
        let t = elkin_st(&g, 7).unwrap();
        assert_valid_st(&g, &t);
        for (e, u, v, _) in g.edges() {
            assert!(t.contains_edge(e, u, v));
        }
    }

    #[test]
    fn elkin_valid_on_benchmark_families() {
        let g = grid_graph(13, 9).unwrap();
        for seed in 0..4 {
            let t = elkin_st(&g, seed).unwrap();
            assert_valid_st(&g, &t);
        }
        let g = barabasi_albert(300, 3, 5)
            .unwrap()
            .randomize_weights(1.0, 8.0, 6)
            .unwrap();
        let t = elkin_st(&g, 11).unwrap();
        assert_valid_st(&g, &t);
    }

    #[test]
    fn special_grid_base_cases() {
        let g = grid_graph(1, 5).unwrap();
        let t = special_grid_st(&g, 1, 5).unwrap();
        assert_valid_st(&g, &t);
        for (e, u, v, _) in g.edges() {
            assert!(t.contains_edge(e, u, v));
        }
    }

    #[test]
    fn special_grid_2x2_is_a_u() {
        let g = grid_graph(2, 2).unwrap();
        let t = special_grid_st(&g, 2, 2).unwrap();
        assert_valid_st(&g, &t);
        let rep = stretch(&g, &t).unwrap();
        // off-tree edge 0-1 (top) goes around the other three edges
        let top = g.edges().find(|&(_, u, v, _)| (u, v) == (0, 1)).unwrap().0;
        assert!(!t.contains_edge(top, 0, 1));
        assert_eq!(rep.per_edge[top], 3.0);
        assert_eq!(rep.total, 6.0);
        assert_eq!(rep.average, 1.5);
    }

    #[test]
    fn special_grid_valid_on_odd_shapes() {
        for (r, c) in [(3, 3), (4, 4), (5, 8), (7, 3), (2, 9), (16, 16)] {
            let g = grid_graph(r, c).unwrap();
            let t = special_grid_st(&g, r, c).unwrap();
            assert_valid_st(&g, &t);
        }
    }

    #[test]
    fn special_grid_needs_matching_graph() {
        let g = grid_graph(3, 3).unwrap();
        assert!(matches!(
            special_grid_st(&g, 2, 2),
            Err(TreeError::GridMismatch { .. })
        ));
        assert!(matches!(
            special_grid_st(&g, 1, 1),
            Err(TreeError::GridTooSmall { .. })
        ));
    }

    #[test]
    fn stretch_k3() {
        let g = Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let t = SpanningTree::from_tree_edges(&g, &[0, 1], 0).unwrap();
        let rep = stretch(&g, &t).unwrap();
        assert_eq!(rep.per_edge, vec![1.0, 1.0, 2.0]);
        assert_eq!(rep.total, 4.0);
        assert!((rep.average - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn stretch_tree_edges_are_one() {
        let g = grid_graph(6, 5)
            .unwrap()
            .randomize_weights(1.0, 8.0, 3)
            .unwrap();
        let t = kruskal_st(&g).unwrap();
        let rep = stretch(&g, &t).unwrap();
        let mut tree_edges = 0;
        for (e, u, v, _) in g.edges() {
            if t.contains_edge(e, u, v) {
                assert_eq!(rep.per_edge[e], 1.0);
                tree_edges += 1;
            } else {
                assert!(rep.per_edge[e] > 0.0 && rep.per_edge[e].is_finite());
            }
        }
        assert_eq!(tree_edges, g.vertex_count() - 1);
    }

    #[test]
    fn unweighted_stretch_at_least_one_per_edge() {
        let g = grid_graph(6, 5).unwrap();
        for t in [kruskal_st(&g).unwrap(), dijkstra_st(&g, 0).unwrap()] {
            let rep = stretch(&g, &t).unwrap();
            for &s in &rep.per_edge {
                assert!(s >= 1.0);
            }
            assert!(rep.total >= g.edge_count() as f64);
        }
    }

    #[test]
    fn stretch_rejects_foreign_tree() {
        let g = grid_graph(3, 3).unwrap();
        let h = grid_graph(2, 2).unwrap();
        let t = special_grid_st(&h, 2, 2).unwrap();
        assert!(matches!(stretch(&g, &t), Err(TreeError::NotSpanning(_))));
    }

    #[test]
    fn lca_basics() {
        let g = grid_graph(1, 3).unwrap();
        let t = SpanningTree::from_tree_edges(&g, &[0, 1], 0).unwrap();
        assert_eq!(t.lca(1, 2), 1);
        assert_eq!(t.lca(2, 2), 2);
        assert_eq!(t.lca(2, 0), 0);

        let g = grid_graph(4, 4).unwrap();
        let t = special_grid_st(&g, 4, 4).unwrap();
        for v in 0..16 {
            assert_eq!(t.lca(v, v), v);
            assert_eq!(t.lca(v, t.root()), t.root());
        }
    }

    #[test]
    fn path_resistance_closed_form() {
        let g = Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let t = SpanningTree::from_tree_edges(&g, &[0, 1], 0).unwrap();
        assert!((t.path_resistance(0, 2) - 2.0).abs() < 1e-15);
        assert!((t.path_resistance(1, 2) - 1.0).abs() < 1e-15);
        assert_eq!(t.path_resistance(1, 1), 0.0);
    }
}
