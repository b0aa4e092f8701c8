//! Benchmark harness and CLI around `kosz-core`: graph file I/O, the
//! stretch / convergence / scaling / smoothing experiments, and CSV/JSON
//! emission.

pub mod cli;
pub mod experiments;
pub mod io;
pub mod output;

/// Harness errors, split by exit code: usage errors exit 1, runtime errors
/// exit 2.
#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl BenchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Usage(_) => 1,
            BenchError::Runtime(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;

impl From<kosz_core::graph::GraphError> for BenchError {
    fn from(e: kosz_core::graph::GraphError) -> Self {
        BenchError::Runtime(e.to_string())
    }
}

impl From<kosz_core::spanning_tree::TreeError> for BenchError {
    fn from(e: kosz_core::spanning_tree::TreeError) -> Self {
        BenchError::Runtime(e.to_string())
    }
}

impl From<kosz_core::solver::SolverError> for BenchError {
    fn from(e: kosz_core::solver::SolverError) -> Self {
        BenchError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for BenchError {
    fn from(e: std::io::Error) -> Self {
        BenchError::Runtime(e.to_string())
    }
}
