//! Column-oriented output tables written as CSV or NDJSON.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::value::RawValue;

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    /// Numbers carry 17 significant digits so that reruns diff exactly.
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Result<Box<RawValue>> {
        let text = match self {
            Cell::Text(s) => serde_json::to_string(s)?,
            Cell::Num(v) if !v.is_finite() => "null".to_string(),
            other => other.render(),
        };
        Ok(RawValue::from_string(text)?)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path, format: Format) -> Result<()> {
        let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        let mut out = BufWriter::new(file);
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut out);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::render))?;
                }
                w.flush()?;
            }
            Format::Ndjson => {
                for row in &self.rows {
                    // assembled from raw pieces: serde_json::Value would re-render the numbers
                    let mut line = String::from("{");
                    for (k, (name, cell)) in self.columns.iter().zip(row).enumerate() {
                        if k > 0 {
                            line.push(',');
                        }
                        line.push_str(&serde_json::to_string(name)?);
                        line.push(':');
                        line.push_str(cell.json()?.get());
                    }
                    line.push('}');
                    writeln!(out, "{line}")?;
                }
            }
        }
        out.flush().with_context(|| format!("cannot write {}", path.display()))?;
        Ok(())
    }
}
