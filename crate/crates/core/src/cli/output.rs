//! Tabular results and their CSV/JSON serialisation.
//!
//! Floats are written with 17 significant digits so that every value reads
//! back bit-for-bit, and rows keep the order in which they were produced.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use super::config::Format;
use crate::error::{Error, Result};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Missing,
}

impl Cell {
    pub fn opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Missing, Cell::Num)
    }

    fn csv_text(&self) -> String {
        match self {
            Cell::Num(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Num(_) | Cell::Missing => String::new(),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(_) | Cell::Missing => Value::Null,
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(if v { "true" } else { "false" }.to_owned())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_owned(),
            columns: columns.iter().map(|c| (*c).to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// Everything a command produces: the primary table plus named extras.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub scenario_hash: String,
    pub tables: Vec<Table>,
}

/// SHA-256 over the command name and the canonical configuration.
pub fn scenario_hash(command: &str, canonical_config: &str) -> String {
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    h.update([0u8]);
    h.update(canonical_config.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl Report {
    pub fn new(command: &str, canonical_config: &str, tables: Vec<Table>) -> Self {
        Self {
            command: command.to_owned(),
            scenario_hash: scenario_hash(command, canonical_config),
            tables,
        }
    }

    fn write_csv_table<W: Write>(&self, table: &Table, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let mut header = vec!["scenario_hash".to_owned(), "code_version".to_owned()];
        header.extend(table.columns.iter().cloned());
        w.write_record(&header)?;
        for row in &table.rows {
            let mut rec = vec![self.scenario_hash.clone(), CODE_VERSION.to_owned()];
            rec.extend(row.iter().map(Cell::csv_text));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let mut tables = Map::new();
        for t in &self.tables {
            let rows: Vec<Value> = t.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
            tables.insert(t.name.clone(), json!({ "columns": t.columns, "rows": rows }));
        }
        json!({
            "meta": {
                "command": self.command,
                "scenario_hash": self.scenario_hash,
                "code_version": CODE_VERSION,
            },
            "tables": tables,
        })
    }

    /// Writes to `path`, or to `stdout` when `path` is `None`. In CSV form the
    /// primary table goes to `path` and each further table to
    /// `<stem>.<table>.csv` beside it; on stdout they follow one another,
    /// separated by a blank line and a `# <table>` line.
    pub fn write(&self, format: Format, path: Option<&Path>) -> Result<Vec<PathBuf>> {
        match (format, path) {
            (Format::Json, Some(p)) => {
                let mut f = std::fs::File::create(p)?;
                serde_json::to_writer_pretty(&mut f, &self.to_json())?;
                f.write_all(b"\n")?;
                Ok(vec![p.to_owned()])
            }
            (Format::Json, None) => {
                let mut out = std::io::stdout().lock();
                serde_json::to_writer_pretty(&mut out, &self.to_json())?;
                out.write_all(b"\n")?;
                Ok(Vec::new())
            }
            (Format::Csv, Some(p)) => {
                let mut written = Vec::new();
                for (i, t) in self.tables.iter().enumerate() {
                    let target = if i == 0 { p.to_owned() } else { sibling(p, &t.name) };
                    self.write_csv_table(t, std::fs::File::create(&target)?)?;
                    written.push(target);
                }
                Ok(written)
            }
            (Format::Csv, None) => {
                let mut out = std::io::stdout().lock();
                for (i, t) in self.tables.iter().enumerate() {
                    if i > 0 {
                        writeln!(out, "\n# {}", t.name)?;
                    }
                    self.write_csv_table(t, &mut out)?;
                }
                Ok(Vec::new())
            }
        }
    }
}

fn sibling(path: &Path, name: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{name}.csv"))
}

/// Reads a CSV table written by [`Report::write`], dropping the provenance
/// columns. Numeric-looking fields become [`Cell::Num`] (or [`Cell::Int`]
/// when written without a decimal point), empty fields [`Cell::Missing`].
pub fn read_csv_table<R: std::io::Read>(name: &str, reader: R) -> Result<(Table, String)> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.get(0) != Some("scenario_hash") || header.get(1) != Some("code_version") {
        return Err(Error::Config("table lacks provenance columns".into()));
    }
    let columns: Vec<&str> = header.iter().skip(2).collect();
    let mut table = Table::new(name, &columns);
    let mut hash = String::new();
    for rec in rdr.records() {
        let rec = rec?;
        hash = rec.get(0).unwrap_or_default().to_owned();
        let row = rec
            .iter()
            .skip(2)
            .map(|f| {
                if f.is_empty() {
                    Cell::Missing
                } else if let Ok(i) = f.parse::<i64>() {
                    Cell::Int(i)
                } else if let Ok(v) = f.parse::<f64>() {
                    Cell::Num(v)
                } else {
                    Cell::Text(f.to_owned())
                }
            })
            .collect();
        table.push(row);
    }
    Ok((table, hash))
}
