//! Solver behavior against the dense pseudoinverse oracle, plus the flow
//! conservation and energy invariants on materialized edge flows.

use kosz_core::cg::{cg_solve, CGConfig};
use kosz_core::graph::{Demand, Graph};
use kosz_core::solver::{
    extract_potentials, initial_tree_flow, kosz_solve, repair_cycle, CycleSelection, CycleSelector,
    FlowStructure, SolverConfig, TreeKind,
};
use kosz_core::spanning_tree::kruskal_st;
use kosz_core::tree_flow::{NaiveFlow, TreeFlow};
use kosz_testutil::{pinv_solve, random_connected_graph, random_demand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Net outflow at every vertex from all materialized edge flows.
fn net_outflow(
    g: &Graph,
    flow: &mut dyn TreeFlow,
    t: &kosz_core::SpanningTree,
    off: &[f64],
) -> Vec<f64> {
    let n = g.vertex_count();
    let mut out = vec![0.0; n];
    for v in 0..n {
        if v != t.root() {
            let f = flow.parent_edge_flow(v);
            out[v] += f;
            out[t.parent(v)] -= f;
        }
    }
    for (e, u, v, _) in g.edges() {
        if !t.contains_edge(e, u, v) {
            // off-tree flow oriented u -> v
            out[u] += off[e];
            out[v] -= off[e];
        }
    }
    out
}

fn flow_energy(
    g: &Graph,
    flow: &mut dyn TreeFlow,
    t: &kosz_core::SpanningTree,
    off: &[f64],
) -> f64 {
    let mut energy = 0.0;
    for v in 0..g.vertex_count() {
        if v != t.root() {
            let f = flow.parent_edge_flow(v);
            energy += f * f * t.parent_resistance(v);
        }
    }
    for (e, u, v, w) in g.edges() {
        if !t.contains_edge(e, u, v) {
            energy += off[e] * off[e] / w;
        }
    }
    energy
}

#[test]
fn kosz_matches_pseudoinverse_on_random_graphs() {
    for seed in 0..40u64 {
        let n = 8 + (seed as usize * 5) % 57;
        let g = random_connected_graph(n, 2 * n, seed % 2 == 0, seed);
        let b = random_demand(n, seed ^ 0xABCD);
        let demand = Demand::new(b.clone()).unwrap();
        let x_star = pinv_solve(&g, &b);
        let cfg = SolverConfig {
            tolerance: 1e-8,
            selection: if seed % 3 == 0 {
                CycleSelection::Uniform
            } else {
                CycleSelection::Weighted
            },
            flow: if seed % 2 == 0 {
                FlowStructure::Log
            } else {
                FlowStructure::Naive
            },
            rng_seed: seed,
            ..SolverConfig::default()
        };
        let r = kosz_solve(&g, &demand, &cfg).unwrap();
        assert!(r.converged, "seed {seed} did not converge");
        assert!(g.relative_residual(&b, &r.x).unwrap() <= 1e-8);
        let mut diff = 0.0;
        for (a, c) in r.x.iter().zip(&x_star) {
            diff += (a - c) * (a - c);
        }
        let rel = diff.sqrt() / norm(&x_star);
        assert!(rel <= 1e-5, "seed {seed}: solution error {rel}");
    }
}

#[test]
fn conservation_and_energy_decrease_during_solve() {
    for seed in 0..10u64 {
        let n = 12 + (seed as usize * 3) % 20;
        let g = random_connected_graph(n, 2 * n, true, 77 + seed);
        let b = random_demand(n, seed);
        let t = kruskal_st(&g).unwrap();
        let mut flow = NaiveFlow::new(&t);
        let sel = CycleSelector::init(&g, &t, &mut flow, CycleSelection::Weighted);
        initial_tree_flow(&t, &b, &mut flow).unwrap();
        let mut off = vec![0.0; g.edge_count()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let out = net_outflow(&g, &mut flow, &t, &off);
        for (o, want) in out.iter().zip(&b) {
            assert!((o - want).abs() <= 1e-9, "initial flow violates demand");
        }
        let mut energy = flow_energy(&g, &mut flow, &t, &off);
        for _ in 0..300 {
            let e = *sel.sample(&mut rng);
            repair_cycle(&mut flow, &mut off, &e);

            // the repaired cycle's drop is zeroed
            let drop = off[e.edge_id] * e.resistance - flow.query_pair(e.u, e.v);
            let fmax = (0..n)
                .map(|v| flow.parent_edge_flow(v).abs())
                .chain(off.iter().map(|f| f.abs()))
                .fold(0.0, f64::max);
            assert!(drop.abs() <= 1e-12 * e.cycle_resistance * fmax.max(1.0));

            // conservation survives every repair
            let out = net_outflow(&g, &mut flow, &t, &off);
            for (o, want) in out.iter().zip(&b) {
                assert!((o - want).abs() <= 1e-9);
            }

            // energy is monotonically nonincreasing
            let next = flow_energy(&g, &mut flow, &t, &off);
            assert!(next <= energy + 1e-12 * energy.max(1.0));
            energy = next;
        }
    }
}

#[test]
fn small_cycle_drops_mean_small_residual() {
    // drive all basis-cycle drops below eps, then check the residual is of
    // the same order against the oracle solution
    let g = random_connected_graph(24, 30, true, 5);
    let b = random_demand(24, 6);
    let t = kruskal_st(&g).unwrap();
    let mut flow = NaiveFlow::new(&t);
    let sel = CycleSelector::init(&g, &t, &mut flow, CycleSelection::Weighted);
    initial_tree_flow(&t, &b, &mut flow).unwrap();
    let mut off = vec![0.0; g.edge_count()];
    // sweep all cycles repeatedly (Gauss-Seidel style) until drops are tiny
    for _ in 0..2000 {
        for e in sel.edges() {
            repair_cycle(&mut flow, &mut off, e);
        }
    }
    let worst_drop = sel
        .edges()
        .iter()
        .map(|e| (off[e.edge_id] * e.resistance - flow.query_pair(e.u, e.v)).abs())
        .fold(0.0, f64::max);
    assert!(worst_drop < 1e-10);
    let x = extract_potentials(&t, &mut flow);
    assert!(g.relative_residual(&b, &x).unwrap() < 1e-8);
    let x_star = pinv_solve(&g, &b);
    let mut diff = 0.0;
    for (a, c) in x.iter().zip(&x_star) {
        diff += (a - c) * (a - c);
    }
    assert!(diff.sqrt() / norm(&x_star) < 1e-8);
}

#[test]
fn residual_history_trends_down() {
    let g = random_connected_graph(48, 120, true, 21);
    let b = Demand::new(random_demand(48, 22)).unwrap();
    let cfg = SolverConfig {
        tolerance: 1e-6,
        rng_seed: 4,
        ..SolverConfig::default()
    };
    let r = kosz_solve(&g, &b, &cfg).unwrap();
    assert!(r.converged);
    // least-squares slope of log-residual vs iteration is negative
    let pts: Vec<(f64, f64)> = r
        .residual_history
        .iter()
        .map(|&(it, res)| (it as f64, res.max(1e-300).ln()))
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    assert!(slope < 0.0, "slope {slope}");
}

#[test]
fn cg_error_energy_norm_is_monotone() {
    // the A-seminorm of the error never grows, iteration by iteration
    for seed in 0..10u64 {
        let n = 10 + (seed as usize * 6) % 50;
        let g = random_connected_graph(n, 2 * n, true, 300 + seed);
        let b = random_demand(n, seed);
        let x_star = pinv_solve(&g, &b);
        let demand = Demand::new(b).unwrap();
        // run CG step by step by capping iterations
        let mut previous = f64::INFINITY;
        for cap in 1..=n as u64 {
            let cfg = CGConfig {
                tolerance: 1e-16,
                max_iterations: Some(cap),
            };
            let r = match cg_solve(&g, &demand, &cfg) {
                Ok(r) => r,
                Err(_) => break,
            };
            let e: Vec<f64> = r.x.iter().zip(&x_star).map(|(a, c)| a - c).collect();
            let a_norm = g.quadratic_form(&e).unwrap();
            assert!(
                a_norm <= previous + 1e-10 * previous.max(1.0),
                "seed {seed} cap {cap}: {a_norm} > {previous}"
            );
            previous = a_norm;
            if r.converged {
                break;
            }
        }
    }
}

#[test]
fn cg_finite_termination_on_small_graphs() {
    for seed in 0..20u64 {
        let n = 6 + (seed as usize) % 27;
        let g = random_connected_graph(n, n, seed % 2 == 0, 600 + seed);
        let b = Demand::new(random_demand(n, seed)).unwrap();
        let cfg = CGConfig {
            tolerance: 1e-10,
            max_iterations: Some(n as u64),
        };
        let r = cg_solve(&g, &b, &cfg).unwrap();
        assert!(
            r.converged,
            "seed {seed}: CG should reach 1e-10 within n = {n} iterations, history {:?}",
            r.residual_history.last()
        );
    }
}

#[test]
fn kosz_on_trees_with_both_flows() {
    for flow in [FlowStructure::Naive, FlowStructure::Log] {
        let g = random_connected_graph(30, 0, true, 8);
        let b = Demand::new(random_demand(30, 9)).unwrap();
        let cfg = SolverConfig {
            flow,
            ..SolverConfig::default()
        };
        let r = kosz_solve(&g, &b, &cfg).unwrap();
        assert_eq!(r.iterations, 0);
        assert!(r.residual_history[0].1 <= 1e-12);
    }
}

#[test]
fn dijkstra_and_elkin_trees_also_solve() {
    let g = random_connected_graph(40, 80, true, 31);
    let b = Demand::new(random_demand(40, 32)).unwrap();
    for tree in [
        TreeKind::Dijkstra { root: 0 },
        TreeKind::Elkin,
        TreeKind::Kruskal,
    ] {
        let cfg = SolverConfig {
            tree,
            tolerance: 1e-7,
            rng_seed: 2,
            ..SolverConfig::default()
        };
        let r = kosz_solve(&g, &b, &cfg).unwrap();
        assert!(r.converged, "{tree:?}");
        assert!(g.relative_residual(&b, &r.x).unwrap() <= 1e-7);
    }
}
