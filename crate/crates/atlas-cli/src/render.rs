//! Output formats. JSON is the canonical machine format; CSV and markdown
//! are row projections of the same data. Every renderer is deterministic:
//! fixed column order, sorted collections, no timestamps.

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

/// A finished table: fixed headers plus stringified cells.
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: Vec<&'static str>) -> Table {
        Table { headers, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// Render a payload in the requested format. The JSON value is emitted
/// as-is; the table carries the CSV/markdown projection of the same rows.
pub fn emit(format: Format, json: &Value, table: &Table) -> String {
    match format {
        Format::Json => json_block(json),
        Format::Csv => csv(table),
        Format::Markdown => markdown(table),
    }
}

pub fn json_block(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("in-memory value serializes");
    s.push('\n');
    s
}

/// Cells are numeric or fixed tokens, with lists joined by single spaces,
/// so no quoting is ever needed.
fn csv(table: &Table) -> String {
    let mut out = table.headers.join(",");
    out.push('\n');
    for row in &table.rows {
        debug_assert!(row.iter().all(|cell| !cell.contains([',', '"', '\n'])));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn markdown(table: &Table) -> String {
    let mut out = format!("| {} |\n", table.headers.join(" | "));
    out.push_str(&format!("|{}\n", " --- |".repeat(table.headers.len())));
    for row in &table.rows {
        out.push_str(&format!("| {} |\n", row.join(" | ")));
    }
    out
}

/// Space-joined list cell (CSV-safe; empty for an empty list).
pub fn join<I: IntoIterator<Item = T>, T: ToString>(xs: I) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}
