//! CSV/JSON emission. CSV carries the effective configuration as leading
//! `#` comment lines, a header row, and values at 17 significant digits so
//! re-parsing reproduces the in-memory doubles exactly. JSON mirrors the
//! same column names.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde_json::{json, Map, Value};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Full double precision; `f64::from_str` recovers the exact bits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_cell(value: &Value) -> String {
    match value {
        Value::Number(n) => {
            if let Some(i) = n.as_u64() {
                i.to_string()
            } else if let Some(i) = n.as_i64() {
                i.to_string()
            } else {
                fmt_f64(n.as_f64().unwrap())
            }
        }
        Value::Bool(b) => (*b as u8).to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// A tabular result: echoed configuration, optional structured metadata,
/// column names and rows.
pub struct Table {
    pub echo: Vec<(String, String)>,
    pub meta: Vec<(String, Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            echo: Vec::new(),
            meta: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.echo {
            out.push_str(&format!("# {key} = {value}\n"));
        }
        for (key, value) in &self.meta {
            flatten_meta(&mut out, key, value);
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut config = Map::new();
        for (key, value) in &self.echo {
            config.insert(key.clone(), Value::String(value.clone()));
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (col, val) in self.columns.iter().zip(row) {
                    obj.insert((*col).to_string(), val.clone());
                }
                Value::Object(obj)
            })
            .collect();
        let mut root = json!({ "config": Value::Object(config), "rows": rows });
        for (key, value) in &self.meta {
            root[key] = value.clone();
        }
        let mut text = serde_json::to_string_pretty(&root).expect("JSON serialization");
        text.push('\n');
        text
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

fn flatten_meta(out: &mut String, prefix: &str, value: &Value) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten_meta(out, &format!("{prefix}.{k}"), v);
            }
        }
        Value::Number(n) if n.is_f64() => {
            out.push_str(&format!("# {prefix} = {}\n", fmt_f64(n.as_f64().unwrap())));
        }
        other => out.push_str(&format!("# {prefix} = {other}\n")),
    }
}

/// Write to `--out` or stdout.
pub fn emit(path: &Option<PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(path) => fs::write(path, content)?,
        None => std::io::stdout().write_all(content.as_bytes())?,
    }
    Ok(())
}
