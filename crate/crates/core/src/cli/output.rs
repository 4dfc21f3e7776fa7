//! CSV and JSON emission with fixed formatting.

use serde_json::{json, Map, Value};

use super::config::RunConfig;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let idx = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[idx]).collect())
    }
}

/// Scientific notation with `digits` significant digits; negative zero prints as zero.
pub fn format_number(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{:.*e}", digits - 1, x)
}

fn rounded(x: f64, digits: usize) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let s = format_number(x, digits);
    json!(s.parse::<f64>().expect("formatted float parses"))
}

pub fn to_csv(table: &Table, digits: usize) -> String {
    let mut out = table.columns.join(",");
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Num(v) => format_number(*v, digits),
                Cell::Bool(b) => b.to_string(),
                Cell::Text(t) => t.clone(),
                Cell::Empty => String::new(),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json(table: &Table, config: &RunConfig, digits: usize) -> String {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut rec = Map::new();
            for (name, cell) in table.columns.iter().zip(row) {
                let v = match cell {
                    Cell::Num(v) => rounded(*v, digits),
                    Cell::Bool(b) => Value::Bool(*b),
                    Cell::Text(t) => Value::String(t.clone()),
                    Cell::Empty => Value::Null,
                };
                rec.insert((*name).to_string(), v);
            }
            Value::Object(rec)
        })
        .collect();
    let doc = json!({
        "metadata": {
            "artifact": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "columns": table.columns,
            "config": serde_json::to_value(config).expect("config serializes"),
        },
        "rows": rows,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json serializes");
    s.push('\n');
    s
}
