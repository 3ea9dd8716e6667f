//! Tables, CSV/JSON emission.

use p2p_reins::ConditionReport;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
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

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Num(v as f64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Shortest decimal that parses back to the same f64; exponent form
/// outside [1e-5, 1e16) so tiny residuals stay short.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if !v.is_finite() {
        format!("{v}").to_lowercase()
    } else if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl Cell {
    fn csv_text(&self) -> String {
        match self {
            Cell::Num(v) => fmt_num(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(_) | Cell::Empty => Value::Null,
            Cell::Text(s) => json!(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: Vec<String>) -> Self {
        Table { name: name.into(), header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width in {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric cell by row label (first column) and column name.
    pub fn num(&self, row_label: &str, col: &str) -> Option<f64> {
        let c = self.column(col)?;
        let row = self.rows.iter().find(|r| matches!(&r[0], Cell::Text(s) if s == row_label))?;
        match row[c] {
            Cell::Num(v) => Some(v),
            _ => None,
        }
    }
}

/// Header helper: `prefix_1 … prefix_n`.
pub fn indexed(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}_{i}")).collect()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutput {
    pub tables: Vec<Table>,
    pub conditions: ConditionReport,
    /// Replaces the tabular JSON layout when set.
    pub document: Option<Value>,
}

impl RunOutput {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn has_required_failures(&self) -> bool {
        self.conditions.has_required_failures()
    }
}

fn conditions_table(report: &ConditionReport) -> Table {
    let header = ["name", "status", "severity", "margin", "slacks", "notes"].map(String::from).to_vec();
    let mut t = Table::new("conditions", header);
    for e in &report.entries {
        let slacks: Vec<String> = e.slacks.iter().map(|&s| fmt_num(s)).collect();
        t.push(vec![
            e.name.clone().into(),
            json!(e.status).as_str().unwrap_or_default().into(),
            json!(e.severity).as_str().unwrap_or_default().into(),
            if e.margin.is_finite() { Cell::Num(e.margin) } else { Cell::Empty },
            slacks.join(";").into(),
            e.notes.join("; ").into(),
        ]);
    }
    t
}

fn write_csv(out: &mut Vec<u8>, t: &Table) {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(&t.header).expect("in-memory write");
    for row in &t.rows {
        w.write_record(row.iter().map(Cell::csv_text)).expect("in-memory write");
    }
    out.extend(w.into_inner().expect("in-memory flush"));
}

/// A single table with no conditions is plain CSV; anything more is written
/// as sections, each introduced by a `# name` line and separated by a blank
/// line.
pub fn emit(output: &RunOutput, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let value = match &output.document {
                Some(doc) => doc.clone(),
                None => {
                    let mut tables = Map::new();
                    for t in &output.tables {
                        let rows: Vec<Value> = t
                            .rows
                            .iter()
                            .map(|r| Value::Object(t.header.iter().cloned().zip(r.iter().map(Cell::json)).collect()))
                            .collect();
                        tables.insert(t.name.clone(), Value::Array(rows));
                    }
                    json!({ "tables": tables, "conditions": conditions_json(&output.conditions) })
                }
            };
            let mut s = serde_json::to_vec_pretty(&value).expect("json values serialize");
            s.push(b'\n');
            s
        }
        Format::Csv => {
            let mut all: Vec<&Table> = output.tables.iter().collect();
            let cond = conditions_table(&output.conditions);
            if !output.conditions.is_empty() {
                all.push(&cond);
            }
            let mut out = Vec::new();
            if all.len() == 1 {
                write_csv(&mut out, all[0]);
                return out;
            }
            for (k, t) in all.iter().enumerate() {
                if k > 0 {
                    out.push(b'\n');
                }
                out.extend(format!("# {}\n", t.name).bytes());
                write_csv(&mut out, t);
            }
            out
        }
    }
}

fn conditions_json(report: &ConditionReport) -> Value {
    Value::Array(
        report
            .entries
            .iter()
            .map(|e| {
                json!({
                    "name": e.name,
                    "status": e.status,
                    "severity": e.severity,
                    "margin": if e.margin.is_finite() { json!(e.margin) } else { Value::Null },
                    "slacks": e.slacks.iter().map(|s| if s.is_finite() { json!(s) } else { Value::Null }).collect::<Vec<_>>(),
                    "notes": e.notes,
                })
            })
            .collect(),
    )
}
