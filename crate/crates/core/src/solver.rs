//! The cycle-repair electrical-flow solver.
//!
//! Starting from the unique flow with demand `b` supported on a spanning
//! tree, repeatedly sample a basis cycle (an off-tree edge plus the tree
//! path between its endpoints) and cancel its potential drop by moving flow
//! around it. Once the drops are small, the tree potentials induced by the
//! flow approximately solve `Lx = b`.
//!
//! Each repair is an orthogonal projection in the resistance inner product,
//! so the flow energy `sum_e f_e^2 r_e` never increases.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Demand, Graph};
use crate::spanning_tree::{
    dijkstra_st, elkin_st, kruskal_st, special_grid_st, SpanningTree, TreeError,
};
use crate::tree_flow::{LogFlow, NaiveFlow, TreeFlow};

/// Errors from the solvers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("demand length {got} does not match vertex count {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("demand vector is zero")]
    ZeroDemand,
    #[error("demand entries sum to {0}, system is inconsistent")]
    UnbalancedDemand(f64),
    #[error("spanning tree construction failed: {0}")]
    Tree(#[from] TreeError),
    #[error("cycle selector is empty (the graph is a tree)")]
    NoCycles,
    #[error("residual diverged: {residual} from initial {initial}")]
    Diverged { residual: f64, initial: f64 },
}

/// Which spanning tree the solver builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum TreeKind {
    Kruskal,
    Dijkstra { root: usize },
    Elkin,
    SpecialGrid { rows: usize, cols: usize },
}

impl TreeKind {
    pub fn build(self, g: &Graph, rng_seed: u64) -> Result<SpanningTree, TreeError> {
        match self {
            TreeKind::Kruskal => kruskal_st(g),
            TreeKind::Dijkstra { root } => dijkstra_st(g, root),
            TreeKind::Elkin => elkin_st(g, rng_seed),
            TreeKind::SpecialGrid { rows, cols } => special_grid_st(g, rows, cols),
        }
    }
}

/// Cycle sampling strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum CycleSelection {
    Uniform,
    /// Weight each basis cycle by its resistance stretch
    /// `(r_e + sum r over the tree path) / r_e`.
    #[default]
    Weighted,
}

/// Tree-flow implementation choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum FlowStructure {
    Naive,
    #[default]
    Log,
}

/// Solver configuration.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolverConfig {
    pub tree: TreeKind,
    pub selection: CycleSelection,
    pub flow: FlowStructure,
    /// Relative-residual target; a repair loop stops once reached.
    pub tolerance: f64,
    pub max_iterations: u64,
    /// Residual check cadence in repairs; `None` means every `m` repairs.
    pub residual_check_interval: Option<u64>,
    pub rng_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tree: TreeKind::Kruskal,
            selection: CycleSelection::Weighted,
            flow: FlowStructure::Log,
            tolerance: 1e-4,
            max_iterations: 100_000_000,
            residual_check_interval: None,
            rng_seed: 1,
        }
    }
}

/// Software operation counters: instrumented floating-point operations and
/// tree-structure touches (a machine-independent memory-access proxy).
/// `seconds` is wall time, filled in by callers that measure it.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Counters {
    pub flops: u64,
    pub tree_ops: u64,
    pub seconds: f64,
}

/// Outcome of a solve.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolverResult {
    /// Mean-zero potential vector.
    pub x: Vec<f64>,
    /// Number of cycle repairs (for CG: iterations).
    pub iterations: u64,
    /// `(iteration, relative residual)` at every checkpoint.
    pub residual_history: Vec<(u64, f64)>,
    pub counters: Counters,
    pub converged: bool,
}

/// An off-tree edge together with its basis cycle's resistance and sampling
/// weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffTreeEdge {
    pub edge_id: usize,
    pub u: usize,
    pub v: usize,
    pub resistance: f64,
    /// `r_e` plus the tree-path resistance between the endpoints.
    pub cycle_resistance: f64,
    pub sampling_weight: f64,
}

/// Roulette-wheel sampler over the off-tree edges.
#[derive(Debug, Clone)]
pub struct CycleSelector {
    edges: Vec<OffTreeEdge>,
    /// Strictly increasing prefix sums of the sampling weights.
    prefix: Vec<f64>,
    total: f64,
    uniform: bool,
}

impl CycleSelector {
    /// Initialize cycle weights by probing each off-tree edge's tree-path
    /// resistance through the flow structure. The flow may hold arbitrary
    /// state; it is restored before returning.
    pub fn init<F: TreeFlow>(
        g: &Graph,
        t: &SpanningTree,
        flow: &mut F,
        strategy: CycleSelection,
    ) -> Self {
        let mut edges = Vec::with_capacity(g.edge_count() + 1 - g.vertex_count());
        let mut prefix = Vec::with_capacity(edges.capacity());
        let mut total = 0.0;
        for (e, u, v, w) in g.edges() {
            if t.contains_edge(e, u, v) {
                continue;
            }
            let resistance = 1.0 / w;
            let cycle_resistance = resistance + flow.tree_path_resistance(u, v);
            let sampling_weight = match strategy {
                CycleSelection::Uniform => 1.0,
                CycleSelection::Weighted => cycle_resistance / resistance,
            };
            total += sampling_weight;
            edges.push(OffTreeEdge {
                edge_id: e,
                u,
                v,
                resistance,
                cycle_resistance,
                sampling_weight,
            });
            prefix.push(total);
        }
        CycleSelector {
            edges,
            prefix,
            total,
            uniform: strategy == CycleSelection::Uniform,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[OffTreeEdge] {
        &self.edges
    }

    /// Draw a basis cycle: O(1) uniform, O(log m) by prefix-sum bisection.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> &OffTreeEdge {
        assert!(!self.edges.is_empty(), "selector is empty");
        let i = if self.uniform {
            rng.random_range(0..self.edges.len())
        } else {
            let x = rng.random_range(0.0..self.total);
            self.prefix
                .partition_point(|&p| p <= x)
                .min(self.edges.len() - 1)
        };
        &self.edges[i]
    }
}

/// Route the demand `b` through the tree: in reverse topological order every
/// vertex pushes its accumulated demand across its parent edge, yielding the
/// unique flow with demand `b` that is nonzero only on tree edges.
pub fn initial_tree_flow<F: TreeFlow>(
    t: &SpanningTree,
    b: &[f64],
    flow: &mut F,
) -> Result<(), SolverError> {
    let n = t.vertex_count();
    if b.len() != n {
        return Err(SolverError::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let sum: f64 = b.iter().sum();
    let l1: f64 = b.iter().map(|x| x.abs()).sum();
    if sum.abs() > 1e-9 * l1 {
        return Err(SolverError::UnbalancedDemand(sum));
    }
    let mut acc = b.to_vec();
    for &v in t.order().iter().rev() {
        let v = v as usize;
        if v == t.root() {
            continue;
        }
        let a = acc[v];
        if a != 0.0 {
            // push the surplus across the parent edge
            flow.update_pair(v, t.parent(v), a);
            acc[t.parent(v)] += a;
        }
    }
    Ok(())
}

/// Cancel the potential drop around the basis cycle of `e`: with the cycle
/// oriented through `e` from `u` to `v` and back along the tree, the drop is
/// `f_e r_e - query_pair(u, v)`; subtracting `drop / cycle_resistance` units
/// of circulating flow zeroes it.
pub fn repair_cycle<F: TreeFlow>(flow: &mut F, off_tree_flow: &mut [f64], e: &OffTreeEdge) {
    let drop = off_tree_flow[e.edge_id] * e.resistance - flow.query_pair(e.u, e.v);
    let alpha = drop / e.cycle_resistance;
    off_tree_flow[e.edge_id] -= alpha;
    flow.update_pair(e.u, e.v, alpha);
}

/// Potentials induced by the tree flow, shifted to mean zero.
pub fn extract_potentials<F: TreeFlow>(t: &SpanningTree, flow: &mut F) -> Vec<f64> {
    let mut x = flow.potentials();
    let mean = x.iter().sum::<f64>() / t.vertex_count() as f64;
    for xi in &mut x {
        *xi -= mean;
    }
    x
}

/// Solve `Lx = b` with the cycle-repair solver.
///
/// Builds the configured spanning tree, initializes the tree flow and the
/// cycle selector, then loops sample/repair. Every
/// `residual_check_interval` repairs the potentials are extracted and the
/// relative residual recorded; the loop stops at `tolerance` or
/// `max_iterations`.
pub fn kosz_solve(g: &Graph, b: &Demand, cfg: &SolverConfig) -> Result<SolverResult, SolverError> {
    validate_system(g, b)?;
    let t = cfg.tree.build(g, cfg.rng_seed)?;
    match cfg.flow {
        FlowStructure::Naive => run_repair_loop(g, &t, b, cfg, NaiveFlow::new(&t)),
        FlowStructure::Log => run_repair_loop(g, &t, b, cfg, LogFlow::new(&t)),
    }
}

pub(crate) fn validate_system(g: &Graph, b: &Demand) -> Result<(), SolverError> {
    let n = g.vertex_count();
    if b.len() != n {
        return Err(SolverError::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    if b.is_zero() {
        return Err(SolverError::ZeroDemand);
    }
    if !g.is_connected() {
        return Err(SolverError::Disconnected);
    }
    Ok(())
}

fn run_repair_loop<F: TreeFlow>(
    g: &Graph,
    t: &SpanningTree,
    b: &Demand,
    cfg: &SolverConfig,
    mut flow: F,
) -> Result<SolverResult, SolverError> {
    let (n, m) = (g.vertex_count() as u64, g.edge_count() as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut site_flops = 0u64;

    // Selector probes while the flow is still zero, then the initial flow.
    let selector = CycleSelector::init(g, t, &mut flow, cfg.selection);
    site_flops += 3 * selector.len() as u64; // cycle resistance + weight + prefix
    initial_tree_flow(t, b.as_slice(), &mut flow)?;
    site_flops += n;

    let mut off_tree_flow = vec![0.0; g.edge_count()];
    let interval = cfg.residual_check_interval.unwrap_or(m).max(1);

    let mut history: Vec<(u64, f64)> = Vec::new();
    let residual_cost = 4 * m + 8 * n; // SpMV + norms + mean shift
    let mut x = extract_potentials(t, &mut flow);
    let mut residual = g
        .relative_residual(b.as_slice(), &x)
        .expect("validated demand");
    site_flops += residual_cost;
    history.push((0, residual));

    let mut iterations = 0u64;
    let mut converged = residual <= cfg.tolerance;
    if !converged && !selector.is_empty() {
        while iterations < cfg.max_iterations {
            let e = selector.sample(&mut rng);
            repair_cycle(&mut flow, &mut off_tree_flow, e);
            site_flops += 5;
            iterations += 1;
            if iterations.is_multiple_of(interval) || iterations == cfg.max_iterations {
                x = extract_potentials(t, &mut flow);
                residual = g
                    .relative_residual(b.as_slice(), &x)
                    .expect("validated demand");
                site_flops += residual_cost;
                history.push((iterations, residual));
                if residual <= cfg.tolerance {
                    converged = true;
                    break;
                }
            }
        }
    }

    Ok(SolverResult {
        x,
        iterations,
        residual_history: history,
        counters: Counters {
            flops: site_flops + flow.flops(),
            tree_ops: flow.tree_ops(),
            seconds: 0.0,
        },
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{grid_graph, Graph};
    use crate::tree_flow::NaiveFlow;

    fn k3() -> Graph {
        Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    #[test]
    fn initial_flow_on_path() {
        let g = grid_graph(1, 3).unwrap();
        let t = kruskal_st(&g).unwrap();
        let mut flow = NaiveFlow::new(&t);
        initial_tree_flow(&t, &[1.0, 0.0, -1.0], &mut flow).unwrap();
        assert!((flow.parent_edge_flow(1) + 1.0).abs() < 1e-15);
        assert!((flow.parent_edge_flow(2) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn initial_flow_on_star() {
        // center 0 is the root; +1 at leaf 1, -1 at leaf 3
        let g = Graph::from_edges(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
        let t = kruskal_st(&g).unwrap();
        let mut flow = NaiveFlow::new(&t);
        initial_tree_flow(&t, &[0.0, 1.0, 0.0, -1.0], &mut flow).unwrap();
        assert!((flow.parent_edge_flow(1) - 1.0).abs() < 1e-15);
        assert!(flow.parent_edge_flow(2).abs() < 1e-15);
        assert!((flow.parent_edge_flow(3) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn initial_flow_rejects_unbalanced() {
        let g = grid_graph(1, 3).unwrap();
        let t = kruskal_st(&g).unwrap();
        let mut flow = NaiveFlow::new(&t);
        assert!(matches!(
            initial_tree_flow(&t, &[1.0, 0.0, 0.0], &mut flow),
            Err(SolverError::UnbalancedDemand(_))
        ));
        let mut flow = NaiveFlow::new(&t);
        initial_tree_flow(&t, &[0.0, 0.0, 0.0], &mut flow).unwrap();
        assert_eq!(flow.query(2), 0.0);
    }

    #[test]
    fn selector_weights_on_k3() {
        let g = k3();
        let t = kruskal_st(&g).unwrap();
        let mut flow = NaiveFlow::new(&t);
        let sel = CycleSelector::init(&g, &t, &mut flow, CycleSelection::Weighted);
        assert_eq!(sel.len(), 1);
        let e = &sel.edges()[0];
        assert_eq!((e.u, e.v), (0, 2));
        assert!((e.cycle_resistance - 3.0).abs() < 1e-12);
        assert!((e.sampling_weight - 3.0).abs() < 1e-12);

        let sel = CycleSelector::init(&g, &t, &mut flow, CycleSelection::Uniform);
        assert_eq!(sel.edges()[0].sampling_weight, 1.0);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..32 {
            assert_eq!(sel.sample(&mut rng).edge_id, 2);
        }
    }

    #[test]
    fn selector_empty_on_tree() {
        let g = grid_graph(1, 4).unwrap();
        let t = kruskal_st(&g).unwrap();
        let mut flow = NaiveFlow::new(&t);
        let sel = CycleSelector::init(&g, &t, &mut flow, CycleSelection::Weighted);
        assert!(sel.is_empty());
    }

    #[test]
    fn sampling_frequencies() {
        // weights (1, 3): second edge drawn with probability 3/4
        let g = Graph::from_edges(
            4,
            [
                (0, 1, 1.0),
                (1, 2, 1.0),
                (2, 3, 1.0),
                (0, 2, 1.0),
                (0, 3, 0.5),
            ],
        )
        .unwrap();
        let t = kruskal_st(&g).unwrap();
        let mut flow = NaiveFlow::new(&t);
        let mut sel = CycleSelector::init(&g, &t, &mut flow, CycleSelection::Weighted);
        // overwrite weights to the synthetic (1, 3) pair
        sel.edges[0].sampling_weight = 1.0;
        sel.edges[1].sampling_weight = 3.0;
        sel.prefix = vec![1.0, 4.0];
        sel.total = 4.0;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut second = 0u32;
        for _ in 0..100_000 {
            if sel.sample(&mut rng).edge_id == sel.edges[1].edge_id {
                second += 1;
            }
        }
        let freq = second as f64 / 100_000.0;
        assert!((freq - 0.75).abs() < 0.01, "got {freq}");
    }

    #[test]
    fn uniform_sampling_frequencies() {
        let g = grid_graph(2, 3).unwrap(); // m = 7, off-tree = 2 ... need 4: use 3x3
        let g = if g.edge_count() - g.vertex_count() + 1 >= 4 {
            g
        } else {
            grid_graph(3, 3).unwrap()
        };
        let t = kruskal_st(&g).unwrap();
        let mut flow = NaiveFlow::new(&t);
        let sel = CycleSelector::init(&g, &t, &mut flow, CycleSelection::Uniform);
        assert_eq!(sel.len(), 4);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut counts = [0u32; 4];
        for _ in 0..100_000 {
            let id = sel.sample(&mut rng).edge_id;
            let idx = sel.edges().iter().position(|e| e.edge_id == id).unwrap();
            counts[idx] += 1;
        }
        for c in counts {
            let freq = c as f64 / 100_000.0;
            assert!((freq - 0.25).abs() < 0.01, "got {freq}");
        }
    }

    #[test]
    fn repair_k3_solves_in_one_step() {
        let g = k3();
        let t = kruskal_st(&g).unwrap();
        let mut flow = NaiveFlow::new(&t);
        let sel = CycleSelector::init(&g, &t, &mut flow, CycleSelection::Weighted);
        initial_tree_flow(&t, &[1.0, 0.0, -1.0], &mut flow).unwrap();
        let mut off = vec![0.0; 3];
        let e = sel.edges()[0];
        repair_cycle(&mut flow, &mut off, &e);
        assert!(
            (off[e.edge_id] - 2.0 / 3.0).abs() < 1e-12,
            "2/3 of a unit moves onto 0-2"
        );
        assert!((flow.parent_edge_flow(1) + 1.0 / 3.0).abs() < 1e-12);
        assert!((flow.parent_edge_flow(2) + 1.0 / 3.0).abs() < 1e-12);
        // the repaired cycle's drop vanishes
        let drop = off[e.edge_id] * e.resistance - flow.query_pair(e.u, e.v);
        assert!(drop.abs() <= 1e-12 * e.cycle_resistance);
        // potentials now solve the system exactly
        let x = extract_potentials(&t, &mut flow);
        for (got, want) in x.iter().zip([1.0 / 3.0, 0.0, -1.0 / 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        // repairing an already-zero cycle is a no-op
        let before = off[e.edge_id];
        repair_cycle(&mut flow, &mut off, &e);
        assert!((off[e.edge_id] - before).abs() <= 1e-15);
    }

    #[test]
    fn extract_zero_flow_is_zero() {
        let g = grid_graph(1, 3).unwrap();
        let t = kruskal_st(&g).unwrap();
        let mut flow = NaiveFlow::new(&t);
        assert_eq!(extract_potentials(&t, &mut flow), vec![0.0; 3]);
    }

    #[test]
    fn extract_path_flow() {
        let g = grid_graph(1, 3).unwrap();
        let t = kruskal_st(&g).unwrap();
        let mut flow = NaiveFlow::new(&t);
        initial_tree_flow(&t, &[1.0, 0.0, -1.0], &mut flow).unwrap();
        let x = extract_potentials(&t, &mut flow);
        for (got, want) in x.iter().zip([1.0, 0.0, -1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let lx = g.laplacian_apply(&x).unwrap();
        for (got, want) in lx.iter().zip([1.0, 0.0, -1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn solve_tree_graph_is_exact_at_zero_iterations() {
        let g = Graph::from_edges(5, [(0, 1, 2.0), (1, 2, 1.0), (1, 3, 4.0), (3, 4, 1.0)]).unwrap();
        let b = Demand::pair(5, 0, 4);
        let r = kosz_solve(&g, &b, &SolverConfig::default()).unwrap();
        assert_eq!(r.iterations, 0);
        assert!(r.converged);
        assert!(r.residual_history[0].1 <= 1e-12);
    }

    #[test]
    fn solve_k3() {
        let g = k3();
        let b = Demand::new(vec![1.0, 0.0, -1.0]).unwrap();
        let cfg = SolverConfig {
            tolerance: 1e-8,
            ..SolverConfig::default()
        };
        let r = kosz_solve(&g, &b, &cfg).unwrap();
        assert!(r.converged);
        assert!(r.iterations <= 16);
        for (got, want) in r.x.iter().zip([1.0 / 3.0, 0.0, -1.0 / 3.0]) {
            assert!((got - want).abs() < 1e-6);
        }
    }

    #[test]
    fn solve_rejects_bad_inputs() {
        let g = Graph::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let b = Demand::pair(4, 0, 1);
        assert!(matches!(
            kosz_solve(&g, &b, &SolverConfig::default()),
            Err(SolverError::Disconnected)
        ));

        let g = k3();
        let b = Demand::new(vec![0.0; 3]).unwrap();
        assert!(matches!(
            kosz_solve(&g, &b, &SolverConfig::default()),
            Err(SolverError::ZeroDemand)
        ));
        let b = Demand::pair(4, 0, 3);
        assert!(matches!(
            kosz_solve(&g, &b, &SolverConfig::default()),
            Err(SolverError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn determinism_bit_for_bit() {
        let g = grid_graph(6, 6)
            .unwrap()
            .randomize_weights(1.0, 8.0, 4)
            .unwrap();
        let b = Demand::pair(36, 0, 35);
        let cfg = SolverConfig {
            tree: TreeKind::SpecialGrid { rows: 6, cols: 6 },
            rng_seed: 33,
            ..SolverConfig::default()
        };
        let r1 = kosz_solve(&g, &b, &cfg).unwrap();
        let r2 = kosz_solve(&g, &b, &cfg).unwrap();
        assert_eq!(r1.iterations, r2.iterations);
        assert_eq!(r1.residual_history.len(), r2.residual_history.len());
        for (a, b) in r1.residual_history.iter().zip(&r2.residual_history) {
            assert_eq!(a.0, b.0);
            assert_eq!(a.1.to_bits(), b.1.to_bits());
        }
        for (a, b) in r1.x.iter().zip(&r2.x) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
