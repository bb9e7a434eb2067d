//! Text, CSV and JSON rendering of result tables.

use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, ValueEnum};
use hashbound::rounding::{round_up_sig_str, round_up_str};
use serde::Serialize;
use serde_json::{json, Map, Value};

/// Version of the JSON layout.
pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args, Clone, Debug)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl OutputArgs {
    pub fn emit(&self, text: &str) -> anyhow::Result<()> {
        match &self.out {
            Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    /// A computed number: upward-rounded text plus the full value.
    Num { shown: String, raw: f64 },
    Missing,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    /// Upward rounding at `decimals` places.
    pub fn up(x: f64, decimals: usize) -> Self {
        Cell::Num {
            shown: round_up_str(x, decimals),
            raw: x,
        }
    }

    /// Upward rounding at `decimals` places, or at two significant digits in
    /// scientific notation when the value is below `10^-decimals`.
    pub fn up_or_sci(x: f64, decimals: usize) -> Self {
        if x > 0.0 && x < 10f64.powi(-(decimals as i32)) {
            Cell::Num {
                shown: round_up_sig_str(x, 2),
                raw: x,
            }
        } else {
            Cell::up(x, decimals)
        }
    }

    pub fn opt(x: Option<f64>, decimals: usize) -> Self {
        x.map_or(Cell::Missing, |v| Cell::up(v, decimals))
    }

    fn shown(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Num { shown, .. } => shown.clone(),
            Cell::Missing => String::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColKind {
    Plain,
    /// Gets a `_raw` shadow column in CSV and JSON.
    Rounded,
}

#[derive(Debug, Clone)]
pub struct Table {
    pub title: String,
    pub columns: Vec<(String, ColKind)>,
    pub rows: Vec<Vec<Cell>>,
    /// Lines printed under the text rendering.
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(title: impl Into<String>, columns: &[(&str, ColKind)]) -> Self {
        Self {
            title: title.into(),
            columns: columns.iter().map(|(n, k)| (n.to_string(), *k)).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> anyhow::Result<String> {
        match format {
            Format::Text => Ok(self.to_text()),
            Format::Csv => self.to_csv(),
            Format::Json => Ok(serde_json::to_string_pretty(&self.to_json())? + "\n"),
        }
    }

    pub fn to_text(&self) -> String {
        let header: Vec<String> = self.columns.iter().map(|c| c.0.clone()).collect();
        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::shown).collect())
            .collect();
        let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for r in &body {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&width)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            parts.join("  ").trim_end().to_string() + "\n"
        };
        let mut s = format!("{}\n", self.title);
        s += &line(&header);
        for r in &body {
            s += &line(r);
        }
        for n in &self.notes {
            s += &format!("{n}\n");
        }
        s
    }

    pub fn to_csv(&self) -> anyhow::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = Vec::new();
        for (name, kind) in &self.columns {
            header.push(name.clone());
            if *kind == ColKind::Rounded {
                header.push(format!("{name}_raw"));
            }
        }
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = Vec::new();
            for (cell, (_, kind)) in row.iter().zip(&self.columns) {
                rec.push(cell.shown());
                if *kind == ColKind::Rounded {
                    rec.push(match cell {
                        Cell::Num { raw, .. } => format!("{raw:?}"),
                        _ => String::new(),
                    });
                }
            }
            w.write_record(&rec)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (cell, (name, kind)) in row.iter().zip(&self.columns) {
                    let v = match cell {
                        Cell::Text(s) => json!(s),
                        Cell::Int(i) => json!(i),
                        Cell::Num { shown, .. } => json!(shown),
                        Cell::Missing => Value::Null,
                    };
                    m.insert(name.clone(), v);
                    if *kind == ColKind::Rounded {
                        let raw = match cell {
                            Cell::Num { raw, .. } => json!(raw),
                            _ => Value::Null,
                        };
                        m.insert(format!("{name}_raw"), raw);
                    }
                }
                Value::Object(m)
            })
            .collect();
        json!({ "schema": SCHEMA, "table": self.title, "rows": rows, "notes": self.notes })
    }
}

/// `{"schema": 1, <key>: value}`.
pub fn envelope<T: Serialize>(key: &str, value: &T) -> anyhow::Result<String> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert(key.into(), serde_json::to_value(value)?);
    Ok(serde_json::to_string_pretty(&Value::Object(m))? + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("demo", &[("b", ColKind::Plain), ("bound", ColKind::Rounded)]);
        t.push(vec![Cell::Int(5), Cell::up(0.168932, 5)]);
        t.push(vec![Cell::Int(6), Cell::Missing]);
        t
    }

    #[test]
    fn csv_has_shadow_columns() {
        let csv = sample().to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("b,bound,bound_raw"));
        assert_eq!(lines.next(), Some("5,0.16894,0.168932"));
        assert_eq!(lines.next(), Some("6,,"));
    }

    #[test]
    fn json_carries_schema_and_raw_values() {
        let v = sample().to_json();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["rows"][0]["bound"], "0.16894");
        assert_eq!(v["rows"][0]["bound_raw"], 0.168932);
        assert!(v["rows"][1]["bound_raw"].is_null());
    }

    #[test]
    fn tiny_values_switch_to_scientific() {
        match Cell::up_or_sci(3.32e-9, 6) {
            Cell::Num { shown, .. } => assert_eq!(shown, "3.4e-9"),
            c => panic!("{c:?}"),
        }
        match Cell::up_or_sci(0.0856786, 6) {
            Cell::Num { shown, .. } => assert_eq!(shown, "0.085679"),
            c => panic!("{c:?}"),
        }
    }
}
