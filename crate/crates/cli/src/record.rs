use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use removal_lab::Rational;
use serde::Serialize;
use serde_json::{Map, Value};

/// The JSON document written by every subcommand.
#[derive(Debug, Serialize)]
pub struct ExperimentRecord {
    pub command: String,
    pub seed: u64,
    pub params: Map<String, Value>,
    pub outputs: Map<String, Value>,
    pub wall_millis: u64,
}

#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// What a subcommand produced, before timing and file output.
#[derive(Debug, Default)]
pub struct Outcome {
    pub params: Map<String, Value>,
    pub outputs: Map<String, Value>,
    pub table: Option<Table>,
    pub summary: String,
    /// Set when the run ended on a work limit; the record is still written.
    pub budget_exhausted: bool,
}

impl Outcome {
    pub fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    pub fn output(&mut self, key: &str, value: impl Into<Value>) {
        self.outputs.insert(key.to_string(), value.into());
    }
}

pub fn rational(r: &Rational) -> Value {
    Value::String(format!("{}/{}", r.numer(), r.denom()))
}

pub fn rational_str(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Finite reals become JSON numbers; others become `"inf"`, `"-inf"` or `"nan"`.
pub fn real(x: f64) -> Value {
    match serde_json::Number::from_f64(x) {
        Some(n) => Value::Number(n),
        None if x.is_nan() => Value::String("nan".into()),
        None if x > 0.0 => Value::String("inf".into()),
        None => Value::String("-inf".into()),
    }
}

/// Integers past `u64::MAX` are written as decimal strings.
pub fn big(x: u128) -> Value {
    match u64::try_from(x) {
        Ok(v) => Value::from(v),
        Err(_) => Value::String(x.to_string()),
    }
}

pub fn write_outputs(
    dir: &Path,
    stem: &str,
    record: &ExperimentRecord,
    table: Option<&Table>,
) -> Result<(PathBuf, Option<PathBuf>)> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let json_path = dir.join(format!("{stem}.json"));
    let mut text = serde_json::to_string_pretty(record)?;
    text.push('\n');
    std::fs::write(&json_path, text).with_context(|| format!("writing {}", json_path.display()))?;

    let csv_path = match table {
        Some(table) => {
            let path = dir.join(format!("{stem}.csv"));
            let mut w = csv::WriterBuilder::new()
                .has_headers(true)
                .from_path(&path)
                .with_context(|| format!("writing {}", path.display()))?;
            w.write_record(&table.header)?;
            for row in &table.rows {
                w.write_record(row)?;
            }
            w.flush()?;
            Some(path)
        }
        None => None,
    };
    Ok((json_path, csv_path))
}
