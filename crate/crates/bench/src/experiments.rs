//! The benchmark experiments: single solves, the stretch table, convergence
//! curves, the scaling study with power-law fits, and the smoothing study.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use kosz_core::cg::{cg_solve, CGConfig};
use kosz_core::fit::{fit_power_law, FitResult};
use kosz_core::graph::{barabasi_albert, grid_graph, Demand, Graph};
use kosz_core::smoothing::{add_noise, dft2_magnitude, hf_energy_ratio, richardson_step};
use kosz_core::solver::{kosz_solve, CycleSelection, SolverConfig, SolverResult, TreeKind};
use kosz_core::spanning_tree::{stretch, SpanningTree};

use crate::output::CsvRow;
use crate::{BenchError, Result};

/// Which benchmark graph to build.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFamily {
    Grid {
        rows: usize,
        cols: usize,
    },
    /// Square grids sized by the scaling study's `--sizes` list.
    GridAuto,
    Ba {
        n: usize,
        k: usize,
    },
    /// Barabási-Albert with `n` from the `--sizes` list.
    BaAuto {
        k: usize,
    },
    File {
        path: String,
    },
}

/// Graph construction request: family, optional uniform `[1, 8)` weights,
/// and the seeds that make it reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub family: GraphFamily,
    pub weighted: bool,
    /// Seed for the random weights.
    pub wseed: u64,
    /// Seed for randomized generators (Barabási-Albert attachment).
    pub gseed: u64,
}

impl GraphSpec {
    pub fn build(&self) -> Result<Graph> {
        let g = match &self.family {
            GraphFamily::Grid { rows, cols } => grid_graph(*rows, *cols)?,
            GraphFamily::Ba { n, k } => barabasi_albert(*n, *k, self.gseed)?,
            GraphFamily::File { path } => crate::io::read_graph(path)?,
            GraphFamily::GridAuto | GraphFamily::BaAuto { .. } => {
                return Err(BenchError::Usage(
                    "sized graph family requires --sizes (scaling only)".into(),
                ))
            }
        };
        if self.weighted {
            Ok(g.randomize_weights(1.0, 8.0, self.wseed)?)
        } else {
            Ok(g)
        }
    }

    /// Grid dimensions, when this spec is a grid.
    pub fn grid_dims(&self) -> Option<(usize, usize)> {
        match self.family {
            GraphFamily::Grid { rows, cols } => Some((rows, cols)),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        let base = match &self.family {
            GraphFamily::Grid { rows, cols } => format!("grid:{rows}x{cols}"),
            GraphFamily::GridAuto => "grid".into(),
            GraphFamily::Ba { n, k } => format!("ba:{n}:{k}"),
            GraphFamily::BaAuto { k } => format!("ba:{k}"),
            GraphFamily::File { path } => format!("file:{path}"),
        };
        if self.weighted {
            format!("{base}:w{}", self.wseed)
        } else {
            base
        }
    }
}

/// CLI-level spanning tree choice; `Special` resolves against the graph's
/// grid dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeChoice {
    Kruskal,
    Dijkstra,
    Elkin,
    Special,
}

impl TreeChoice {
    pub const ALL: [TreeChoice; 4] = [
        TreeChoice::Kruskal,
        TreeChoice::Dijkstra,
        TreeChoice::Elkin,
        TreeChoice::Special,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TreeChoice::Kruskal => "kruskal",
            TreeChoice::Dijkstra => "dijkstra",
            TreeChoice::Elkin => "elkin",
            TreeChoice::Special => "special",
        }
    }

    /// Resolve to a solver [`TreeKind`]; the grid tree demands a grid graph.
    pub fn resolve(self, spec: &GraphSpec, root: usize) -> Result<TreeKind> {
        Ok(match self {
            TreeChoice::Kruskal => TreeKind::Kruskal,
            TreeChoice::Dijkstra => TreeKind::Dijkstra { root },
            TreeChoice::Elkin => TreeKind::Elkin,
            TreeChoice::Special => {
                let (rows, cols) = spec.grid_dims().ok_or_else(|| {
                    BenchError::Usage("the special spanning tree requires a grid graph".into())
                })?;
                TreeKind::SpecialGrid { rows, cols }
            }
        })
    }
}

fn build_tree(g: &Graph, kind: TreeKind, seed: u64) -> Result<SpanningTree> {
    Ok(kind.build(g, seed)?)
}

// ---------------------------------------------------------------------------
// solve

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub graph: GraphSpec,
    pub solver: SolverChoice,
    pub kosz: SolverConfig,
    pub cg: CGConfig,
    /// Demand: +1 at `source`, -1 at `sink` (defaults 0 and n-1).
    pub source: Option<usize>,
    pub sink: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    Kosz,
    Cg,
}

/// Build the demand for a solve-style run.
pub fn default_demand(g: &Graph, source: Option<usize>, sink: Option<usize>) -> Result<Demand> {
    let n = g.vertex_count();
    let s = source.unwrap_or(0);
    let t = sink.unwrap_or(n - 1);
    if s >= n || t >= n || s == t {
        return Err(BenchError::Usage(format!(
            "demand pair ({s}, {t}) invalid for {n} vertices"
        )));
    }
    Ok(Demand::pair(n, s, t))
}

/// Run one solve and fill in the wall time.
pub fn run_solve(cfg: &SolveConfig) -> Result<SolverResult> {
    let g = cfg.graph.build()?;
    let b = default_demand(&g, cfg.source, cfg.sink)?;
    let started = Instant::now();
    let mut result = match cfg.solver {
        SolverChoice::Kosz => kosz_solve(&g, &b, &cfg.kosz)?,
        SolverChoice::Cg => cg_solve(&g, &b, &cfg.cg)?,
    };
    result.counters.seconds = started.elapsed().as_secs_f64();
    Ok(result)
}

/// Residual history as CSV rows (the JSON form carries the full result).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ResidualRow {
    pub iteration: u64,
    pub residual: f64,
}

impl CsvRow for ResidualRow {
    fn header() -> &'static str {
        "iteration,residual"
    }
    fn record(&self) -> String {
        format!("{},{}", self.iteration, self.residual)
    }
}

// ---------------------------------------------------------------------------
// stretch

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StretchConfig {
    pub graph: GraphSpec,
    pub trees: Vec<TreeChoice>,
    pub root: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StretchRow {
    pub graph: String,
    pub tree: String,
    pub n: usize,
    pub m: usize,
    pub total_stretch: f64,
    pub average_stretch: f64,
}

impl CsvRow for StretchRow {
    fn header() -> &'static str {
        "graph,tree,n,m,total_stretch,average_stretch"
    }
    fn record(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.graph, self.tree, self.n, self.m, self.total_stretch, self.average_stretch
        )
    }
}

/// Average stretch per requested tree on one graph.
pub fn run_stretch(cfg: &StretchConfig) -> Result<Vec<StretchRow>> {
    let g = cfg.graph.build()?;
    let mut rows = Vec::new();
    for &choice in &cfg.trees {
        let kind = choice.resolve(&cfg.graph, cfg.root)?;
        let t = build_tree(&g, kind, cfg.seed)?;
        let rep = stretch(&g, &t)?;
        rows.push(StretchRow {
            graph: cfg.graph.label(),
            tree: choice.name().into(),
            n: g.vertex_count(),
            m: g.edge_count(),
            total_stretch: rep.total,
            average_stretch: rep.average,
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// convergence

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceConfig {
    pub graph: GraphSpec,
    pub trees: Vec<TreeChoice>,
    pub selections: Vec<CycleSelection>,
    pub root: usize,
    pub solver: SolverConfig,
    pub source: Option<usize>,
    pub sink: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub tree: String,
    pub selection: String,
    pub iteration: u64,
    pub residual: f64,
}

impl CsvRow for ConvergenceRow {
    fn header() -> &'static str {
        "tree,selection,iteration,residual"
    }
    fn record(&self) -> String {
        format!(
            "{},{},{},{}",
            self.tree, self.selection, self.iteration, self.residual
        )
    }
}

fn selection_name(s: CycleSelection) -> &'static str {
    match s {
        CycleSelection::Uniform => "uniform",
        CycleSelection::Weighted => "weighted",
    }
}

/// One residual series per (tree, selection) combination.
pub fn run_convergence(cfg: &ConvergenceConfig) -> Result<Vec<ConvergenceRow>> {
    let g = cfg.graph.build()?;
    let b = default_demand(&g, cfg.source, cfg.sink)?;
    let mut rows = Vec::new();
    for &choice in &cfg.trees {
        let kind = choice.resolve(&cfg.graph, cfg.root)?;
        for &selection in &cfg.selections {
            let solver = SolverConfig {
                tree: kind,
                selection,
                ..cfg.solver.clone()
            };
            let result = kosz_solve(&g, &b, &solver)?;
            for (iteration, residual) in result.residual_history {
                rows.push(ConvergenceRow {
                    tree: choice.name().into(),
                    selection: selection_name(selection).into(),
                    iteration,
                    residual,
                });
            }
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// scaling

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub graph: GraphSpec,
    /// Grid side lengths (or Barabási-Albert vertex counts).
    pub sizes: Vec<usize>,
    pub trials: u32,
    pub tree: TreeChoice,
    pub root: usize,
    pub solver: SolverConfig,
    pub cg: CGConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingRow {
    pub solver: String,
    pub n: usize,
    pub trials: u32,
    pub iterations_mean: f64,
    pub iterations_std: f64,
    pub flops_mean: f64,
    pub flops_std: f64,
    pub tree_ops_mean: f64,
    pub tree_ops_std: f64,
    pub seconds_mean: f64,
    pub seconds_std: f64,
}

impl CsvRow for ScalingRow {
    fn header() -> &'static str {
        "solver,n,trials,iterations_mean,iterations_std,flops_mean,flops_std,\
         tree_ops_mean,tree_ops_std,seconds_mean,seconds_std"
    }
    fn record(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.solver,
            self.n,
            self.trials,
            self.iterations_mean,
            self.iterations_std,
            self.flops_mean,
            self.flops_std,
            self.tree_ops_mean,
            self.tree_ops_std,
            self.seconds_mean,
            self.seconds_std
        )
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Counters at convergence for both solvers over a size sweep; `trials`
/// repetitions per point with shifted seeds, population mean/stddev.
pub fn run_scaling(cfg: &ScalingConfig) -> Result<Vec<ScalingRow>> {
    let mut rows = Vec::new();
    for &size in &cfg.sizes {
        let family = match cfg.graph.family {
            GraphFamily::GridAuto | GraphFamily::Grid { .. } => GraphFamily::Grid {
                rows: size,
                cols: size,
            },
            GraphFamily::BaAuto { k } | GraphFamily::Ba { k, .. } => GraphFamily::Ba { n: size, k },
            GraphFamily::File { .. } => {
                return Err(BenchError::Usage(
                    "scaling needs a generated graph family".into(),
                ))
            }
        };
        let n = match family {
            GraphFamily::Grid { .. } => size * size,
            _ => size,
        };
        let mut samples: [Vec<[f64; 4]>; 2] = [Vec::new(), Vec::new()];
        for trial in 0..cfg.trials {
            let spec = GraphSpec {
                family: family.clone(),
                weighted: cfg.graph.weighted,
                wseed: cfg.graph.wseed + trial as u64,
                gseed: cfg.graph.gseed + trial as u64,
            };
            let g = spec.build()?;
            let b = default_demand(&g, None, None)?;
            let kind = cfg.tree.resolve(&spec, cfg.root)?;
            let solver = SolverConfig {
                tree: kind,
                rng_seed: cfg.solver.rng_seed + trial as u64,
                ..cfg.solver.clone()
            };

            let started = Instant::now();
            let kosz = kosz_solve(&g, &b, &solver)?;
            let kosz_secs = started.elapsed().as_secs_f64();
            if !kosz.converged {
                return Err(BenchError::Runtime(format!(
                    "cycle-repair solver did not converge at n = {}",
                    g.vertex_count()
                )));
            }
            samples[0].push([
                kosz.iterations as f64,
                kosz.counters.flops as f64,
                kosz.counters.tree_ops as f64,
                kosz_secs,
            ]);

            let started = Instant::now();
            let cg = cg_solve(&g, &b, &cfg.cg)?;
            let cg_secs = started.elapsed().as_secs_f64();
            if !cg.converged {
                return Err(BenchError::Runtime(format!(
                    "CG did not converge at n = {}",
                    g.vertex_count()
                )));
            }
            samples[1].push([
                cg.iterations as f64,
                cg.counters.flops as f64,
                cg.counters.tree_ops as f64,
                cg_secs,
            ]);
        }
        for (solver, data) in ["kosz", "cg"].iter().zip(&samples) {
            let col = |i: usize| data.iter().map(|s| s[i]).collect::<Vec<_>>();
            let (it_m, it_s) = mean_std(&col(0));
            let (fl_m, fl_s) = mean_std(&col(1));
            let (to_m, to_s) = mean_std(&col(2));
            let (se_m, se_s) = mean_std(&col(3));
            rows.push(ScalingRow {
                solver: solver.to_string(),
                n,
                trials: cfg.trials,
                iterations_mean: it_m,
                iterations_std: it_s,
                flops_mean: fl_m,
                flops_std: fl_s,
                tree_ops_mean: to_m,
                tree_ops_std: to_s,
                seconds_mean: se_m,
                seconds_std: se_s,
            });
        }
    }
    rows.sort_by(|a, b| a.solver.cmp(&b.solver).then(a.n.cmp(&b.n)));
    Ok(rows)
}

/// Fit `a n^b + c` through a solver's mean flop counts. Refuses fewer than
/// three sizes (rows still carry the data).
pub fn fit_scaling_flops(rows: &[ScalingRow], solver: &str) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.solver == solver)
        .map(|r| (r.n as f64, r.flops_mean))
        .collect();
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    fit_power_law(&xs, &ys).map_err(|e| BenchError::Runtime(e.to_string()))
}

// ---------------------------------------------------------------------------
// smoothing

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingConfig {
    pub graph: GraphSpec,
    pub tree: TreeChoice,
    pub solver: SolverConfig,
    /// Solver iteration counts; one panel each. 0 means the initial error.
    pub counts: Vec<u64>,
    /// Seed for the ground-truth potentials.
    pub truth_seed: u64,
    /// Seed for the injected noise.
    pub noise_seed: u64,
}

pub const SMOOTHING_COUNTS: [u64; 6] = [0, 1, 10, 100, 1000, 10000];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmoothingRow {
    pub iterations: u64,
    /// `error` (spatial field), `spectrum` (DC-centered magnitudes), or
    /// `hf-ratio` (scalar summary at cutoff 1/2, row = col = 0).
    pub kind: String,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

impl CsvRow for SmoothingRow {
    fn header() -> &'static str {
        "iterations,kind,row,col,value"
    }
    fn record(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.iterations, self.kind, self.row, self.col, self.value
        )
    }
}

/// Error fields and spectra after one Richardson step at each iteration
/// count. The ground truth `x` is uniform in `[-1, 1]`, mean-shifted, with
/// `b = Lx`; the start vector adds unit uniform noise.
pub fn run_smoothing(cfg: &SmoothingConfig) -> Result<Vec<SmoothingRow>> {
    let (rows_dim, cols_dim) = cfg
        .graph
        .grid_dims()
        .ok_or_else(|| BenchError::Usage("smoothing requires a grid graph".into()))?;
    let g = cfg.graph.build()?;
    let n = g.vertex_count();

    let zero = vec![0.0; n];
    let mut x_true = add_noise(&zero, cfg.truth_seed);
    let mean = x_true.iter().sum::<f64>() / n as f64;
    for v in &mut x_true {
        *v -= mean;
    }
    let b = Demand::new(g.laplacian_apply(&x_true)?).expect("Laplacian image is balanced");
    let x0 = add_noise(&x_true, cfg.noise_seed);

    let kind = cfg.tree.resolve(&cfg.graph, 0)?;
    let solver = SolverConfig {
        tree: kind,
        ..cfg.solver.clone()
    };

    let mut out = Vec::new();
    for &count in &cfg.counts {
        let x1 = if count == 0 {
            x0.clone()
        } else {
            richardson_step(&g, &b, &x0, &solver, count)?
        };
        let error: Vec<f64> = x1.iter().zip(&x_true).map(|(a, b)| a - b).collect();
        let spectrum = dft2_magnitude(&error, rows_dim, cols_dim)
            .map_err(|e| BenchError::Runtime(e.to_string()))?;
        let hf = hf_energy_ratio(&spectrum, 0.5).map_err(|e| BenchError::Runtime(e.to_string()))?;
        for r in 0..rows_dim {
            for c in 0..cols_dim {
                out.push(SmoothingRow {
                    iterations: count,
                    kind: "error".into(),
                    row: r,
                    col: c,
                    value: error[r * cols_dim + c],
                });
            }
        }
        for r in 0..rows_dim {
            for c in 0..cols_dim {
                out.push(SmoothingRow {
                    iterations: count,
                    kind: "spectrum".into(),
                    row: r,
                    col: c,
                    value: spectrum.magnitudes[r * cols_dim + c],
                });
            }
        }
        out.push(SmoothingRow {
            iterations: count,
            kind: "hf-ratio".into(),
            row: 0,
            col: 0,
            value: hf,
        });
    }
    Ok(out)
}
