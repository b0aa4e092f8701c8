//! Flows on spanning-tree edges with root-path queries and updates.
//!
//! Flow values live on tree edges, oriented child -> parent positive. The
//! two operations are `update(u, a)` (add `a` to every edge on the path from
//! `u` to the root) and `query(u)` (the potential drop `sum f(e) r_e` along
//! that path). Two interchangeable implementations are provided:
//!
//! * [`NaiveFlow`] stores the flow directly on the tree and walks parent
//!   pointers: O(depth) per operation, O(n) space. Pair operations shortcut
//!   through the LCA so only the `u..v` path is touched.
//! * [`LogFlow`] is a balanced vertex-separator decomposition with
//!   per-level resistive offsets: O(log n) worst case per operation,
//!   O(n log n) space. The recursion is unrolled into flat per-vertex entry
//!   arrays, so queries are a sparse-dense dot product and updates a
//!   sparse-dense addition.

use alloc::vec;
use alloc::vec::Vec;

use crate::spanning_tree::SpanningTree;

/// Root-path flow contract shared by [`NaiveFlow`] and [`LogFlow`].
///
/// A fresh instance represents the all-zero flow. Operations take `&mut self`
/// because implementations keep operation counters.
pub trait TreeFlow {
    /// Add `alpha` to the flow of every edge on the path `u -> root`.
    fn update(&mut self, u: usize, alpha: f64);

    /// Potential drop `sum f(e) r_e` along the path `u -> root`.
    fn query(&mut self, u: usize) -> f64;

    /// Add `alpha` along the tree path `u -> v` (`alpha` flows from `u`
    /// toward `v`); the segment above the LCA cancels.
    fn update_pair(&mut self, u: usize, v: usize, alpha: f64) {
        self.update(u, alpha);
        self.update(v, -alpha);
    }

    /// Potential drop from `u` to `v`: `query(u) - query(v)`.
    fn query_pair(&mut self, u: usize, v: usize) -> f64 {
        self.query(u) - self.query(v)
    }

    /// `sum r_e` over the tree path `u..v`, probed with a unit flow:
    /// `update_pair(+1)`, measure, `update_pair(-1)`. The delta against the
    /// pre-probe drop tolerates arbitrary ambient flow, and the flow state
    /// is restored on return.
    fn tree_path_resistance(&mut self, u: usize, v: usize) -> f64 {
        let before = self.query_pair(u, v);
        self.update_pair(u, v, 1.0);
        let after = self.query_pair(u, v);
        self.update_pair(u, v, -1.0);
        after - before
    }

    /// Potentials induced by the current flow, relative to the root
    /// (`x[root] = 0`, no mean shift).
    fn potentials(&mut self) -> Vec<f64>;

    /// Current flow on the parent edge of `v` (0 at the root).
    fn parent_edge_flow(&mut self, v: usize) -> f64;

    /// Structure touches so far (naive: parent steps; log: entry visits).
    fn tree_ops(&self) -> u64;

    /// Floating-point operations spent inside the structure so far.
    fn flops(&self) -> u64;
}

/// Direct implementation: the flow vector indexed by child vertex.
pub struct NaiveFlow<'t> {
    tree: &'t SpanningTree,
    /// Flow on the parent edge of each vertex; unused at the root.
    flow: Vec<f64>,
    tree_ops: u64,
    flops: u64,
}

impl<'t> NaiveFlow<'t> {
    pub fn new(tree: &'t SpanningTree) -> Self {
        NaiveFlow {
            tree,
            flow: vec![0.0; tree.vertex_count()],
            tree_ops: 0,
            flops: 0,
        }
    }
}

impl TreeFlow for NaiveFlow<'_> {
    fn update(&mut self, u: usize, alpha: f64) {
        let root = self.tree.root();
        let mut x = u;
        while x != root {
            self.flow[x] += alpha;
            self.tree_ops += 1;
            self.flops += 1;
            x = self.tree.parent(x);
        }
    }

    fn query(&mut self, u: usize) -> f64 {
        let root = self.tree.root();
        let mut acc = 0.0;
        let mut x = u;
        while x != root {
            acc += self.flow[x] * self.tree.parent_resistance(x);
            self.tree_ops += 1;
            self.flops += 2;
            x = self.tree.parent(x);
        }
        acc
    }

    // Only the u..v path is touched; the shared segment above the LCA would
    // receive +alpha and -alpha anyway.
    fn update_pair(&mut self, u: usize, v: usize, alpha: f64) {
        let a = self.tree.lca(u, v);
        let mut x = u;
        while x != a {
            self.flow[x] += alpha;
            self.tree_ops += 1;
            self.flops += 1;
            x = self.tree.parent(x);
        }
        let mut x = v;
        while x != a {
            self.flow[x] -= alpha;
            self.tree_ops += 1;
            self.flops += 1;
            x = self.tree.parent(x);
        }
    }

    fn query_pair(&mut self, u: usize, v: usize) -> f64 {
        let a = self.tree.lca(u, v);
        let mut acc = 0.0;
        let mut x = u;
        while x != a {
            acc += self.flow[x] * self.tree.parent_resistance(x);
            self.tree_ops += 1;
            self.flops += 2;
            x = self.tree.parent(x);
        }
        let mut x = v;
        while x != a {
            acc -= self.flow[x] * self.tree.parent_resistance(x);
            self.tree_ops += 1;
            self.flops += 2;
            x = self.tree.parent(x);
        }
        acc
    }

    fn potentials(&mut self) -> Vec<f64> {
        let n = self.tree.vertex_count();
        let mut x = vec![0.0; n];
        for &v in &self.tree.order()[1..] {
            let v = v as usize;
            let p = self.tree.parent(v);
            // flow child->parent positive means the child sits at the higher
            // potential
            x[v] = x[p] + self.flow[v] * self.tree.parent_resistance(v);
        }
        self.tree_ops += n as u64;
        self.flops += 2 * n as u64;
        x
    }

    fn parent_edge_flow(&mut self, v: usize) -> f64 {
        self.flow[v]
    }

    fn tree_ops(&self) -> u64 {
        self.tree_ops
    }

    fn flops(&self) -> u64 {
        self.flops
    }
}

/// One precomputed (vertex, level) interaction with a decomposition node.
#[derive(Debug, Clone, Copy)]
struct Entry {
    /// Decomposition node id; high bit set when the vertex lies on the
    /// separator side of that node.
    node_and_side: u32,
    /// Separator side: full piece resistance; root side: resistance overlap
    /// of the vertex's local root path with the piece.
    coef: f64,
}

const SIDE_BIT: u32 = 1 << 31;

/// Separator-decomposition flow structure.
///
/// The tree is split recursively at a centroid-like separator `d` into a
/// root-side part and a separator-side part; the path `d -> local root` is
/// the node's "piece". Per node, two scalars evolve: `ext`, flow added
/// uniformly along the whole piece by separator-side updates, and `drop`,
/// the current potential drop of the piece contributed by updates recorded
/// deeper in the root side. Every vertex stores one precomputed entry per
/// decomposition level, so both operations touch O(log n) entries.
pub struct LogFlow<'t> {
    tree: &'t SpanningTree,
    offsets: Vec<u32>,
    entries: Vec<Entry>,
    ext: Vec<f64>,
    drop: Vec<f64>,
    tree_ops: u64,
    flops: u64,
}

impl<'t> LogFlow<'t> {
    pub fn new(tree: &'t SpanningTree) -> Self {
        let n = tree.vertex_count();
        // (vertex, entry) pairs, later counting-sorted by vertex.
        let mut raw: Vec<(u32, Entry)> = Vec::new();
        let mut node_count = 0u32;

        // Scratch, epoch-marked so components never need clearing.
        let mut epoch = 0u32;
        let mut mark = vec![0u32; n];
        let mut inactive = vec![0u32; n];
        let mut size = vec![0u32; n];
        let mut max_child = vec![0u32; n];
        let mut label = vec![0u32; n]; // head of the sub-d subtree, or UP
        const UP: u32 = u32::MAX;

        let mut pos = vec![0u32; n];
        for (i, &v) in tree.order().iter().enumerate() {
            pos[v as usize] = i as u32;
        }

        // (vertices, local root, inactive vertices): inactive ones are former
        // separators whose root path is already fully covered by ancestor
        // pieces; they stay for structure but stop generating entries.
        let mut work: Vec<(Vec<u32>, u32, Vec<u32>)> =
            vec![((0..n as u32).collect(), tree.root() as u32, Vec::new())];

        while let Some((mut verts, root, dead)) = work.pop() {
            let nc = verts.len();
            if nc <= 1 {
                continue;
            }
            epoch += 1;
            for &v in &verts {
                let v = v as usize;
                mark[v] = epoch;
                size[v] = 1;
                max_child[v] = 0;
            }
            for &v in &dead {
                inactive[v as usize] = epoch;
            }
            verts.sort_unstable_by_key(|&v| pos[v as usize]);

            // Subtree sizes within the component (children before parents).
            for &v in verts.iter().rev() {
                let v = v as usize;
                if v == root as usize {
                    continue;
                }
                let p = tree.parent(v);
                debug_assert_eq!(mark[p], epoch);
                size[p] += size[v];
                max_child[p] = max_child[p].max(size[v]);
            }

            // Separator: the centroid (2-vertex components take the leaf so
            // the piece is the single edge).
            let d = if nc == 2 {
                verts.iter().copied().find(|&v| v != root).unwrap()
            } else {
                let mut best = root;
                let mut best_score = u32::MAX;
                for &v in &verts {
                    let v_ = v as usize;
                    let score = max_child[v_].max(nc as u32 - size[v_]);
                    if score < best_score || (score == best_score && v < best) {
                        best = v;
                        best_score = score;
                    }
                }
                best
            };
            let d_ = d as usize;

            // Label each vertex with the head of its subtree hanging below d
            // (or UP). Heads appear in traversal order.
            let mut heads: Vec<u32> = Vec::new();
            for &v in &verts {
                let v_ = v as usize;
                if v == d || v == root {
                    label[v_] = UP;
                    continue;
                }
                let p = tree.parent(v_);
                label[v_] = if p == d_ {
                    heads.push(v);
                    v
                } else {
                    label[p]
                };
            }

            // Separator side: greedily take whole head subtrees until about a
            // quarter of the component moved; both sides then shrink
            // geometrically.
            let target = (nc as u32 - 1).div_ceil(4);
            let mut chosen = 0usize;
            let mut moved = 0u32;
            while chosen < heads.len() && moved < target {
                moved += size[heads[chosen] as usize];
                chosen += 1;
            }
            // Membership checks are done; reuse `mark` with a fresh epoch to
            // flag the chosen heads.
            epoch += 1;
            let chosen_epoch = epoch;
            for &h in &heads[..chosen] {
                mark[h as usize] = chosen_epoch;
            }

            let piece = d != root;
            let node = if piece {
                node_count += 1;
                node_count - 1
            } else {
                0
            };
            let path_r = if piece {
                tree.rdepth(d_) - tree.rdepth(root as usize)
            } else {
                0.0
            };

            let mut t1: Vec<u32> = Vec::new();
            let mut t2: Vec<u32> = Vec::new();
            let mut t1_dead: Vec<u32> = Vec::new();
            let mut t2_dead: Vec<u32> = Vec::new();
            for &v in &verts {
                let v_ = v as usize;
                let side2 = v == d || (label[v_] != UP && mark[label[v_] as usize] == chosen_epoch);
                let was_dead = inactive[v_] == epoch - 1;
                if side2 {
                    t2.push(v);
                    if was_dead && v != d {
                        t2_dead.push(v);
                    }
                } else {
                    t1.push(v);
                    if was_dead {
                        t1_dead.push(v);
                    }
                }
                if !piece || was_dead || v == root {
                    continue;
                }
                if side2 {
                    raw.push((
                        v,
                        Entry {
                            node_and_side: node | SIDE_BIT,
                            coef: path_r,
                        },
                    ));
                } else {
                    let a = tree.lca(v_, d_);
                    let coef = tree.rdepth(a) - tree.rdepth(root as usize);
                    if coef > 0.0 {
                        raw.push((
                            v,
                            Entry {
                                node_and_side: node,
                                coef,
                            },
                        ));
                    }
                }
            }
            if d == root {
                t1.push(d);
            } else if heads.len() > chosen {
                // unchosen subtrees still hang from d on the root side
                t1.push(d);
                t1_dead.push(d);
            }
            work.push((t1, root, t1_dead));
            work.push((t2, d, t2_dead));
        }

        // Counting sort of entries by vertex.
        let mut counts = vec![0u32; n + 1];
        for &(v, _) in &raw {
            counts[v as usize + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let offsets = counts.clone();
        let mut entries = vec![
            Entry {
                node_and_side: 0,
                coef: 0.0
            };
            raw.len()
        ];
        let mut cursor = counts;
        for &(v, e) in &raw {
            entries[cursor[v as usize] as usize] = e;
            cursor[v as usize] += 1;
        }

        LogFlow {
            tree,
            offsets,
            entries,
            ext: vec![0.0; node_count as usize],
            drop: vec![0.0; node_count as usize],
            tree_ops: 0,
            flops: 0,
        }
    }

    fn entries_of(&self, u: usize) -> core::ops::Range<usize> {
        self.offsets[u] as usize..self.offsets[u + 1] as usize
    }
}

impl TreeFlow for LogFlow<'_> {
    fn update(&mut self, u: usize, alpha: f64) {
        let range = self.entries_of(u);
        self.tree_ops += range.len() as u64;
        for e in &self.entries[range] {
            let node = (e.node_and_side & !SIDE_BIT) as usize;
            if e.node_and_side & SIDE_BIT != 0 {
                self.ext[node] += alpha;
                self.flops += 1;
            } else {
                self.drop[node] += alpha * e.coef;
                self.flops += 2;
            }
        }
    }

    fn query(&mut self, u: usize) -> f64 {
        let range = self.entries_of(u);
        self.tree_ops += range.len() as u64;
        self.flops += 2 * range.len() as u64;
        let mut acc = 0.0;
        for e in &self.entries[range] {
            let node = (e.node_and_side & !SIDE_BIT) as usize;
            acc += self.ext[node] * e.coef;
            if e.node_and_side & SIDE_BIT != 0 {
                acc += self.drop[node];
            }
        }
        acc
    }

    fn potentials(&mut self) -> Vec<f64> {
        (0..self.tree.vertex_count())
            .map(|v| self.query(v))
            .collect()
    }

    fn parent_edge_flow(&mut self, v: usize) -> f64 {
        if v == self.tree.root() {
            return 0.0;
        }
        let p = self.tree.parent(v);
        (self.query(v) - self.query(p)) / self.tree.parent_resistance(v)
    }

    fn tree_ops(&self) -> u64 {
        self.tree_ops
    }

    fn flops(&self) -> u64 {
        self.flops
    }
}
