use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Map, Value};
use warpiso::format::{canonical_value, format_number, to_canonical_json};
use warpiso::profiles::ProfileCurve;

use crate::args::Format;

pub const SCHEMA: u64 = 1;

/// Invalid combination of otherwise well-formed arguments.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub enum Artifact {
    Report(Value),
    Table { columns: Vec<&'static str>, rows: Vec<Vec<f64>> },
    Curve(ProfileCurve),
}

impl Artifact {
    fn default_format(&self) -> Format {
        match self {
            Artifact::Curve(_) => Format::Csv,
            _ => Format::Json,
        }
    }
}

/// A finished command: what to emit and how to exit.
pub struct Emitted {
    pub command: &'static str,
    pub artifact: Artifact,
    pub exit: u8,
}

impl Emitted {
    pub fn ok(command: &'static str, artifact: Artifact) -> Self {
        Self { command, artifact, exit: 0 }
    }
}

fn with_header(command: &str, body: Value) -> Value {
    let mut map = match body {
        Value::Object(map) => map,
        other => {
            let mut map = Map::new();
            map.insert("result".into(), other);
            map
        }
    };
    map.insert("schema".into(), json!(SCHEMA));
    map.insert("command".into(), json!(command));
    Value::Object(map)
}

fn text_value(v: &Value) -> String {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => format_number(n.as_f64().unwrap_or(f64::NAN)),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        Value::Array(items) if items.iter().any(|v| v.is_object() || v.is_array()) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), v, out);
            }
        }
        other => out.push(format!("{prefix}: {}", text_value(other))),
    }
}

fn table_text(columns: &[&str], rows: &[Vec<f64>], sep: &str) -> String {
    let mut s = columns.join(sep);
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| format_number(x)).collect();
        s.push_str(&cells.join(sep));
        s.push('\n');
    }
    s
}

pub fn render(emitted: &Emitted, format: Option<Format>) -> Result<String> {
    let format = format.unwrap_or_else(|| emitted.artifact.default_format());
    let command = emitted.command;
    Ok(match (&emitted.artifact, format) {
        (Artifact::Report(v), Format::Json) => to_canonical_json(&with_header(command, v.clone()))?,
        (Artifact::Report(v), Format::Text) => {
            let mut lines = Vec::new();
            flatten("", &canonical_value(&with_header(command, v.clone()))?, &mut lines);
            lines.join("\n") + "\n"
        }
        (Artifact::Report(_), Format::Csv) => {
            return Err(usage(format!("`{command}` produces a report; csv is available for curves and tables")))
        }
        (Artifact::Table { columns, rows }, Format::Json) => to_canonical_json(&with_header(
            command,
            json!({ "columns": columns, "rows": rows }),
        ))?,
        (Artifact::Table { columns, rows }, Format::Csv) => table_text(columns, rows, ","),
        (Artifact::Table { columns, rows }, Format::Text) => table_text(columns, rows, " "),
        (Artifact::Curve(c), Format::Csv) => {
            let mut buf = Vec::new();
            c.write_csv(&mut buf)?;
            String::from_utf8(buf).context("csv output is not UTF-8")?
        }
        (Artifact::Curve(c), Format::Json) => to_canonical_json(&with_header(command, serde_json::to_value(c)?))?,
        (Artifact::Curve(c), Format::Text) => {
            let rows: Vec<Vec<f64>> = c.samples.iter().map(|&(v, a)| vec![v, a]).collect();
            table_text(&["V", "A"], &rows, " ")
        }
    })
}

pub fn write(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
