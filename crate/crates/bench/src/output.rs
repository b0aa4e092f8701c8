//! Machine-readable emission: CSV (header + one record per measurement) and
//! JSON (one top-level object with `config` and `rows`). Numbers print in
//! shortest round-trip form, so identical runs yield identical bytes.

use serde::Serialize;

use crate::{BenchError, Result};

/// Output format selector shared by all subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// A typed CSV record.
pub trait CsvRow {
    fn header() -> &'static str;
    fn record(&self) -> String;
}

pub fn to_csv<T: CsvRow>(rows: &[T]) -> String {
    let mut s = String::from(T::header());
    s.push('\n');
    for r in rows {
        s.push_str(&r.record());
        s.push('\n');
    }
    s
}

pub fn to_json<C: Serialize, T: Serialize>(config: &C, rows: &[T]) -> Result<String> {
    #[derive(Serialize)]
    struct Payload<'a, C: Serialize, T: Serialize> {
        config: &'a C,
        rows: &'a [T],
    }
    serde_json::to_string_pretty(&Payload { config, rows })
        .map_err(|e| BenchError::Runtime(e.to_string()))
}

/// Render rows in the chosen format.
pub fn render<C: Serialize, T: CsvRow + Serialize>(
    config: &C,
    rows: &[T],
    format: OutputFormat,
) -> Result<String> {
    match format {
        OutputFormat::Csv => Ok(to_csv(rows)),
        OutputFormat::Json => to_json(config, rows),
    }
}

/// Write to `path`, or stdout when `path` is `None`.
pub fn emit(payload: &str, path: Option<&std::path::Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, payload)?,
        None => print!("{payload}"),
    }
    Ok(())
}
