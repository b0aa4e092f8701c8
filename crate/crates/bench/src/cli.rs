//! Command-line interface. Exit codes: 0 success, 1 usage error, 2 runtime
//! error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use kosz_core::cg::CGConfig;
use kosz_core::solver::{CycleSelection, FlowStructure, SolverConfig, TreeKind};

use crate::experiments::{
    self, ConvergenceConfig, GraphFamily, GraphSpec, ResidualRow, ScalingConfig, SmoothingConfig,
    SolveConfig, SolverChoice, StretchConfig, TreeChoice, SMOOTHING_COUNTS,
};
use crate::output::{emit, render, to_json, OutputFormat};
use crate::{BenchError, Result};

#[derive(Parser, Debug)]
#[command(
    name = "kosz",
    about = "Electrical-flow Laplacian solver benchmarks",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one system and emit the solver result.
    Solve(SolveArgs),
    /// Average stretch of the spanning trees on one graph.
    Stretch(StretchArgs),
    /// Residual history per (tree, selection) combination.
    Convergence(ConvergenceArgs),
    /// Counters at convergence over a size sweep, for both solvers.
    Scaling(ScalingArgs),
    /// Smoothing study: error fields and spectra per iteration count.
    Smoothing(SmoothingArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Graph: grid:KxL | ba:N:K | file:PATH (scaling: grid | ba:K).
    #[arg(long)]
    graph: String,
    /// Draw uniform random weights in [1, 8).
    #[arg(long)]
    weighted: bool,
    /// Seed for the random weights.
    #[arg(long, default_value_t = 7)]
    wseed: u64,
    /// Seed for randomized generators (Barabasi-Albert).
    #[arg(long, default_value_t = 42)]
    gseed: u64,
    /// Seed for solver randomness (cycle sampling, star decomposition).
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TreeArg {
    Kruskal,
    Dijkstra,
    Elkin,
    Special,
}

impl From<TreeArg> for TreeChoice {
    fn from(t: TreeArg) -> Self {
        match t {
            TreeArg::Kruskal => TreeChoice::Kruskal,
            TreeArg::Dijkstra => TreeChoice::Dijkstra,
            TreeArg::Elkin => TreeChoice::Elkin,
            TreeArg::Special => TreeChoice::Special,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SelectionArg {
    Uniform,
    Weighted,
}

impl From<SelectionArg> for CycleSelection {
    fn from(s: SelectionArg) -> Self {
        match s {
            SelectionArg::Uniform => CycleSelection::Uniform,
            SelectionArg::Weighted => CycleSelection::Weighted,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FlowArg {
    Naive,
    Log,
}

impl From<FlowArg> for FlowStructure {
    fn from(f: FlowArg) -> Self {
        match f {
            FlowArg::Naive => FlowStructure::Naive,
            FlowArg::Log => FlowStructure::Log,
        }
    }
}

#[derive(Args, Debug)]
struct SolverArgs {
    /// Spanning tree for the cycle-repair solver.
    #[arg(long, value_enum, default_value_t = TreeArg::Kruskal)]
    tree: TreeArg,
    /// Cycle selection strategy.
    #[arg(long, value_enum, default_value_t = SelectionArg::Weighted)]
    selection: SelectionArg,
    /// Tree-flow structure.
    #[arg(long, value_enum, default_value_t = FlowArg::Log)]
    flow: FlowArg,
    /// Relative residual target.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Iteration cap.
    #[arg(long, default_value_t = 100_000_000)]
    max_iter: u64,
    /// Residual check cadence in repairs (default: every m repairs).
    #[arg(long)]
    interval: Option<u64>,
    /// Root vertex for the Dijkstra tree.
    #[arg(long, default_value_t = 0)]
    root: usize,
}

impl SolverArgs {
    fn solver_config(&self, seed: u64) -> SolverConfig {
        SolverConfig {
            tree: TreeKind::Kruskal, // resolved per graph later
            selection: self.selection.into(),
            flow: self.flow.into(),
            tolerance: self.tol,
            max_iterations: self.max_iter,
            residual_check_interval: self.interval,
            rng_seed: seed,
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Which solver to run.
    #[arg(long = "solver", value_enum, default_value_t = SolverChoiceArg::Kosz)]
    which: SolverChoiceArg,
    /// Demand source vertex (+1); default 0.
    #[arg(long)]
    source: Option<usize>,
    /// Demand sink vertex (-1); default n-1.
    #[arg(long)]
    sink: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SolverChoiceArg {
    Kosz,
    Cg,
}

#[derive(Args, Debug)]
struct StretchArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Trees to measure; defaults to all four on grids, the first three
    /// elsewhere.
    #[arg(long, value_enum, value_delimiter = ',')]
    tree: Vec<TreeArg>,
    /// Root vertex for the Dijkstra tree.
    #[arg(long, default_value_t = 0)]
    root: usize,
}

#[derive(Args, Debug)]
struct ConvergenceArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Trees to run (comma-separated).
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [TreeArg::Kruskal])]
    tree: Vec<TreeArg>,
    /// Selections to run (comma-separated).
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [SelectionArg::Weighted])]
    selection: Vec<SelectionArg>,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, default_value_t = 100_000_000)]
    max_iter: u64,
    #[arg(long)]
    interval: Option<u64>,
    #[arg(long, value_enum, default_value_t = FlowArg::Log)]
    flow: FlowArg,
    #[arg(long, default_value_t = 0)]
    root: usize,
    #[arg(long)]
    source: Option<usize>,
    #[arg(long)]
    sink: Option<usize>,
}

#[derive(Args, Debug)]
struct ScalingArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Comma-separated grid side lengths (or BA vertex counts); the default
    /// steps by sqrt(2) so log-log fits get evenly spaced abscissae.
    #[arg(long, value_delimiter = ',', default_values_t = [50, 71, 100, 141, 200])]
    sizes: Vec<usize>,
    /// Trials per size, with shifted seeds.
    #[arg(long, default_value_t = 3)]
    trials: u32,
}

#[derive(Args, Debug)]
struct SmoothingArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Seed for the ground-truth potentials.
    #[arg(long, default_value_t = 100)]
    truth_seed: u64,
    /// Seed for the injected noise.
    #[arg(long, default_value_t = 200)]
    noise_seed: u64,
}

fn parse_graph_spec(text: &str, common: &CommonArgs, sized: bool) -> Result<GraphSpec> {
    let family = parse_family(text, sized)?;
    Ok(GraphSpec {
        family,
        weighted: common.weighted,
        wseed: common.wseed,
        gseed: common.gseed,
    })
}

fn parse_family(text: &str, sized: bool) -> Result<GraphFamily> {
    let usage = |msg: &str| BenchError::Usage(format!("--graph '{text}': {msg}"));
    let mut parts = text.splitn(2, ':');
    let kind = parts.next().unwrap_or_default();
    let rest = parts.next();
    match (kind, rest) {
        ("grid", None) if sized => Ok(GraphFamily::GridAuto),
        ("grid", Some(dims)) => {
            let (k, l) = dims
                .split_once('x')
                .ok_or_else(|| usage("expected grid:KxL"))?;
            let rows = k.parse().map_err(|_| usage("bad row count"))?;
            let cols = l.parse().map_err(|_| usage("bad column count"))?;
            Ok(GraphFamily::Grid { rows, cols })
        }
        ("ba", Some(rest)) => match rest.split_once(':') {
            Some((n, k)) => Ok(GraphFamily::Ba {
                n: n.parse().map_err(|_| usage("bad vertex count"))?,
                k: k.parse().map_err(|_| usage("bad attachment"))?,
            }),
            None if sized => Ok(GraphFamily::BaAuto {
                k: rest.parse().map_err(|_| usage("bad attachment"))?,
            }),
            None => Err(usage("expected ba:N:K")),
        },
        ("file", Some(path)) => Ok(GraphFamily::File { path: path.into() }),
        _ => Err(usage("expected grid:KxL, ba:N:K or file:PATH")),
    }
}

fn default_trees(spec: &GraphSpec, requested: &[TreeArg]) -> Vec<TreeChoice> {
    if !requested.is_empty() {
        return requested.iter().map(|&t| t.into()).collect();
    }
    let mut trees = vec![TreeChoice::Kruskal, TreeChoice::Dijkstra, TreeChoice::Elkin];
    if spec.grid_dims().is_some() {
        trees.push(TreeChoice::Special);
    }
    trees
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(args) => {
            let spec = parse_graph_spec(&args.common.graph, &args.common, false)?;
            let mut kosz = args.solver.solver_config(args.common.seed);
            kosz.tree = TreeChoice::from(args.solver.tree).resolve(&spec, args.solver.root)?;
            let cfg = SolveConfig {
                graph: spec,
                solver: match args.which {
                    SolverChoiceArg::Kosz => SolverChoice::Kosz,
                    SolverChoiceArg::Cg => SolverChoice::Cg,
                },
                kosz,
                cg: CGConfig {
                    tolerance: args.solver.tol,
                    max_iterations: Some(args.solver.max_iter),
                },
                source: args.source,
                sink: args.sink,
            };
            let result = experiments::run_solve(&cfg)?;
            let format = args.common.format.map_or(OutputFormat::Json, Into::into);
            let payload = match format {
                OutputFormat::Json => to_json(&cfg, std::slice::from_ref(&result))?,
                OutputFormat::Csv => {
                    let rows: Vec<ResidualRow> = result
                        .residual_history
                        .iter()
                        .map(|&(iteration, residual)| ResidualRow {
                            iteration,
                            residual,
                        })
                        .collect();
                    render(&cfg, &rows, OutputFormat::Csv)?
                }
            };
            emit(&payload, args.common.out.as_deref())
        }
        Command::Stretch(args) => {
            let spec = parse_graph_spec(&args.common.graph, &args.common, false)?;
            let cfg = StretchConfig {
                trees: default_trees(&spec, &args.tree),
                graph: spec,
                root: args.root,
                seed: args.common.seed,
            };
            let rows = experiments::run_stretch(&cfg)?;
            let format = args.common.format.map_or(OutputFormat::Csv, Into::into);
            emit(&render(&cfg, &rows, format)?, args.common.out.as_deref())
        }
        Command::Convergence(args) => {
            let spec = parse_graph_spec(&args.common.graph, &args.common, false)?;
            let cfg = ConvergenceConfig {
                graph: spec,
                trees: args.tree.iter().map(|&t| t.into()).collect(),
                selections: args.selection.iter().map(|&s| s.into()).collect(),
                root: args.root,
                solver: SolverConfig {
                    tolerance: args.tol,
                    max_iterations: args.max_iter,
                    residual_check_interval: args.interval,
                    flow: args.flow.into(),
                    rng_seed: args.common.seed,
                    ..SolverConfig::default()
                },
                source: args.source,
                sink: args.sink,
            };
            let rows = experiments::run_convergence(&cfg)?;
            let format = args.common.format.map_or(OutputFormat::Csv, Into::into);
            emit(&render(&cfg, &rows, format)?, args.common.out.as_deref())
        }
        Command::Scaling(args) => {
            let spec = parse_graph_spec(&args.common.graph, &args.common, true)?;
            let cfg = ScalingConfig {
                graph: spec,
                sizes: args.sizes.clone(),
                trials: args.trials,
                tree: args.solver.tree.into(),
                root: args.solver.root,
                solver: args.solver.solver_config(args.common.seed),
                cg: CGConfig {
                    tolerance: args.solver.tol,
                    max_iterations: None,
                },
            };
            let rows = experiments::run_scaling(&cfg)?;
            let format = args.common.format.map_or(OutputFormat::Csv, Into::into);
            emit(&render(&cfg, &rows, format)?, args.common.out.as_deref())
        }
        Command::Smoothing(args) => {
            let spec = parse_graph_spec(&args.common.graph, &args.common, false)?;
            let cfg = SmoothingConfig {
                graph: spec,
                tree: args.solver.tree.into(),
                solver: args.solver.solver_config(args.common.seed),
                counts: SMOOTHING_COUNTS.to_vec(),
                truth_seed: args.truth_seed,
                noise_seed: args.noise_seed,
            };
            let rows = experiments::run_smoothing(&cfg)?;
            let format = args.common.format.map_or(OutputFormat::Csv, Into::into);
            emit(&render(&cfg, &rows, format)?, args.common.out.as_deref())
        }
    }
}

/// Parse and run; returns the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not errors
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let _ = e.print();
            return 1;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
