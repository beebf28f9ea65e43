//! Rendering of command results as JSON, CSV or plain text.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// `v` rounded to 12 significant digits, printed in shortest form.
pub fn sig12(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    let a = rounded.abs();
    if a != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

pub fn join(values: &[f64]) -> String {
    values.iter().map(|&v| sig12(v)).collect::<Vec<_>>().join(", ")
}

/// A header row plus data rows, shared by the CSV and text renderers.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Everything a command produces.
#[derive(Debug, Clone)]
pub struct Output {
    pub json: Value,
    /// `key: value` lines for the text format.
    pub summary: Vec<(String, String)>,
    pub table: Table,
    /// Whether the result is certified; false maps to exit code 1.
    pub ok: bool,
    pub warnings: Vec<String>,
    /// Pre-rendered body that replaces every format (SVG).
    pub raw: Option<String>,
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        if let Some(raw) = &self.raw {
            return raw.clone();
        }
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values serialize");
                s.push('\n');
                s
            }
            Format::Csv => self.table.to_csv(),
            Format::Text => {
                let mut s = String::new();
                for (k, v) in &self.summary {
                    let _ = writeln!(s, "{k}: {v}");
                }
                s
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.042224424512345678), "0.0422244245123");
        assert_eq!(sig12(2.0 / 3.0), "0.666666666667");
        assert_eq!(sig12(0.25), "0.25");
        assert_eq!(sig12(-1.0e-20 / 3.0), "-3.33333333333e-21");
        assert_eq!(sig12(64.0), "64");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), "2".into()]);
        assert_eq!(t.to_csv(), "a,b\n1,2\n");
    }
}
