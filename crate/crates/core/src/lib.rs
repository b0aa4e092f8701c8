//! Electrical-flow solver for graph Laplacian systems.
//!
//! A Laplacian system `Lx = b` on a weighted graph is equivalent to finding
//! an electrical flow: edges are resistors with conductance `w_e`, the
//! right-hand side `b` prescribes the current injected at each node, and the
//! node potentials of the flow solve the system. The KOSZ solver (Kelner,
//! Orecchia, Sidford, Zhu) exploits this view: start from the unique flow
//! supported on a spanning tree, then repeatedly pick a basis cycle and move
//! flow around it until every cycle's potential drop vanishes.
//!
//! The crate provides the building blocks and the solver itself:
//!
//! * [`graph`] — weighted undirected graphs, Laplacian operators and the
//!   grid / Barabási–Albert benchmark generators;
//! * [`spanning_tree`] — Kruskal, Dijkstra, star-decomposition and grid
//!   spanning trees, plus stretch computation and LCA queries;
//! * [`tree_flow`] — flows on tree edges with root-path query/update, in a
//!   direct O(n) variant and an O(log n) separator-decomposition variant;
//! * [`solver`] — the cycle-repair solver with uniform or stretch-weighted
//!   cycle selection;
//! * [`cg`] — unpreconditioned conjugate gradient as the comparison solver;
//! * [`smoothing`] — Richardson smoothing with 2D frequency analysis;
//! * [`fit`] — power-law curve fitting for scaling studies.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the default `std`
//! feature just switches float math to the platform intrinsics.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cg;
pub mod fit;
pub mod graph;
pub mod smoothing;
pub mod solver;
pub mod spanning_tree;
pub mod tree_flow;

pub use graph::{Demand, Graph};
pub use solver::{kosz_solve, SolverConfig, SolverResult};
pub use spanning_tree::SpanningTree;
