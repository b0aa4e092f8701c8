//! Graph file I/O in the plain-text edge-list format
//! (`n m` header, then `u v w` per line, 0-based indices).

use std::fs;
use std::path::Path;

use kosz_core::graph::Graph;

use crate::{BenchError, Result};

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let text = fs::read_to_string(&path)?;
    Graph::from_edge_list(&text)
        .map_err(|e| BenchError::Runtime(format!("{}: {e}", path.as_ref().display())))
}

pub fn write_graph(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(&path, g.to_edge_list())?;
    Ok(())
}
