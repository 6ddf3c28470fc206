use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::stats::EstimateWithCI;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Float(f64),
    Int(u64),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => json!(s),
            Cell::Float(x) => json!(x),
            Cell::Int(n) => json!(n),
            Cell::Bool(b) => json!(b),
        }
    }
}

/// A named result table; written as `<name>.csv` or as one entry of
/// `results.json`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: &[&'static str]) -> Self {
        Self { name: name.to_string(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self.header.iter().zip(row).map(|(h, c)| (h.to_string(), c.json())).collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

/// `name,value,stderr,n` rows.
pub fn estimates_table(rows: &[(String, EstimateWithCI)]) -> Table {
    let mut t = Table::new("estimates", &["name", "value", "stderr", "n"]);
    for (name, e) in rows {
        t.push(vec![Cell::Text(name.clone()), Cell::Float(e.value), Cell::Float(e.stderr), Cell::Int(e.n as u64)]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Everything a scenario produces.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Output {
    pub tables: Vec<Table>,
    /// Extra JSON documents written verbatim as `<name>.json`.
    pub documents: Vec<(String, Value)>,
    /// Reported on stderr; they do not change the exit code.
    pub warnings: Vec<String>,
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

pub fn write_output(output: &Output, dir: &Path, format: Format, header: Value) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
    let mut written = Vec::new();
    match format {
        Format::Csv => {
            for t in &output.tables {
                written.push(write(dir.join(format!("{}.csv", t.name)), &t.to_csv())?);
            }
        }
        Format::Json => {
            let tables: Map<String, Value> = output.tables.iter().map(|t| (t.name.clone(), t.to_json())).collect();
            let mut doc = header;
            doc["tables"] = Value::Object(tables);
            written.push(write(dir.join("results.json"), &pretty(&doc))?);
        }
    }
    for (name, doc) in &output.documents {
        written.push(write(dir.join(format!("{name}.json")), &pretty(doc))?);
    }
    Ok(written)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialise");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_17_digits() {
        let t = estimates_table(&[("p".into(), EstimateWithCI { value: 0.1, stderr: 0.0, n: 3 })]);
        assert_eq!(t.to_csv(), "name,value,stderr,n\np,1.0000000000000001e-1,0.0000000000000000e0,3\n");
    }

    #[test]
    fn json_rows_are_objects() {
        let t = estimates_table(&[("p".into(), EstimateWithCI::exact(0.5))]);
        assert_eq!(t.to_json()[0]["value"], json!(0.5));
    }
}
