//! Result tables rendered as CSV or JSON.

use std::io::Write;

use serde_json::{json, Map};

use crate::args::Format;
use crate::error::{CliError, CliResult};

const DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    List(Vec<String>),
    Missing,
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as u64)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(x: Option<T>) -> Self {
        x.map_or(Value::Missing, Into::into)
    }
}

/// `%.12g`: 12 significant digits, trailing zeros removed.
pub fn format_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= DIGITS as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

impl Value {
    fn text(&self) -> String {
        match self {
            Value::Num(x) => format_g(*x),
            Value::Int(n) => n.to_string(),
            Value::Text(s) => s.clone(),
            Value::Bool(b) => b.to_string(),
            Value::List(items) => items.join(" "),
            Value::Missing => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            // the printed digits, so CSV and JSON agree
            Value::Num(x) if x.is_finite() => json!(format_g(*x).parse::<f64>().expect("formatted float")),
            Value::Num(x) => json!(format_g(*x)),
            Value::Int(n) => json!(n),
            Value::Text(s) => json!(s),
            Value::Bool(b) => json!(b),
            Value::List(items) => json!(items),
            Value::Missing => serde_json::Value::Null,
        }
    }
}

/// A named report: its configuration and a rectangular table of rows.
#[derive(Debug, Clone)]
pub struct Report {
    pub name: String,
    pub kind: &'static str,
    pub config: Vec<(&'static str, Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Report {
    pub fn new(kind: &'static str, name: &str, columns: &[&'static str]) -> Self {
        Self { name: name.to_string(), kind, config: Vec::new(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn config(mut self, key: &'static str, value: impl Into<Value>) -> Self {
        self.config.push((key, value.into()));
        self
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> CliResult<Vec<u8>> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let out_err = |e: csv::Error| CliError::Output(e.to_string());
                w.write_record(&self.columns).map_err(out_err)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Value::text)).map_err(out_err)?;
                }
                w.into_inner().map_err(|e| CliError::Output(e.to_string()))
            }
            Format::Json => {
                let config: Map<String, serde_json::Value> =
                    self.config.iter().map(|(k, v)| (k.to_string(), v.json())).collect();
                let rows: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, serde_json::Value> =
                            self.columns.iter().zip(row).map(|(k, v)| (k.to_string(), v.json())).collect();
                        serde_json::Value::Object(obj)
                    })
                    .collect();
                let mut doc = Map::new();
                doc.insert(self.kind.to_string(), json!(self.name));
                doc.insert("config".into(), serde_json::Value::Object(config));
                doc.insert("rows".into(), json!(rows));
                let mut text = serde_json::to_vec_pretty(&serde_json::Value::Object(doc))
                    .map_err(|e| CliError::Output(e.to_string()))?;
                text.push(b'\n');
                Ok(text)
            }
        }
    }
}

pub fn emit(bytes: &[u8], path: Option<&std::path::Path>) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::io("<stdout>", e))
        }
    }
}
