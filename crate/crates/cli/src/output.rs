//! CSV emission with a provenance comment.
//!
//! The first line is `# qshutter <version> command=<name>` followed by every
//! configuration key as `section.key=value`, so a run can be repeated from
//! its own output file. Floats are written with 17 significant digits, which
//! reads back to the identical bit pattern.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::config::RunConfig;

pub const TOOL: &str = "qshutter";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("refusing to write an empty table")]
    EmptyTable,
    #[error("row {row} has {found} cells but the header has {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: io::Error },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    B(bool),
    S(String),
}

impl Cell {
    /// `None` becomes NaN.
    pub fn opt(v: Option<f64>) -> Self {
        Cell::F(v.unwrap_or(f64::NAN))
    }

    fn render(&self) -> String {
        match self {
            Cell::F(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::F(v) => v.to_string(),
            Cell::I(v) => v.to_string(),
            Cell::B(v) => v.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

/// A result table plus human-readable notes for standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }
}

/// The `#` comment line that opens every output file.
pub fn provenance(command: &str, cfg: &RunConfig) -> String {
    let mut line = format!("# {TOOL} {VERSION} command={command}");
    for (k, v) in cfg.entries() {
        line.push(' ');
        line.push_str(k);
        line.push('=');
        line.push_str(&v);
    }
    line
}

/// Writes the table to `path`, or to standard output for `-`.
pub fn emit_csv(table: &Table, path: &str, provenance: &str) -> Result<(), OutputError> {
    if table.rows.is_empty() {
        return Err(OutputError::EmptyTable);
    }
    if let Some((row, r)) = table.rows.iter().enumerate().find(|(_, r)| r.len() != table.columns.len()) {
        return Err(OutputError::Ragged {
            row,
            expected: table.columns.len(),
            found: r.len(),
        });
    }
    let io_err = |source| OutputError::Io {
        path: path.to_string(),
        source,
    };
    if path == "-" {
        let stdout = io::stdout();
        write_table(table, provenance, stdout.lock()).map_err(io_err)
    } else {
        let file = File::create(Path::new(path)).map_err(io_err)?;
        write_table(table, provenance, io::BufWriter::new(file)).map_err(io_err)
    }
}

fn write_table<W: Write>(table: &Table, provenance: &str, mut out: W) -> io::Result<()> {
    writeln!(out, "{provenance}")?;
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record(&table.columns)?;
    for row in &table.rows {
        csv.write_record(row.iter().map(Cell::render))?;
    }
    csv.flush()
}
