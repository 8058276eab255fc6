//! Record tables written as CSV or JSON.

use serde_json::{Map, Value};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        Cell::Float(v.unwrap_or(f64::NAN))
    }
}

/// Seventeen significant digits, enough to round-trip any f64.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

#[derive(Debug, Default, Clone)]
pub struct Record(Vec<(String, Cell)>);

impl Record {
    pub fn new() -> Self {
        Record(Vec::new())
    }

    pub fn with(mut self, key: &str, v: impl Into<Cell>) -> Self {
        self.0.push((key.to_string(), v.into()));
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn render(records: &[Record], format: Format) -> String {
    match format {
        Format::Csv => csv(records),
        Format::Json => json(records),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv(records: &[Record]) -> String {
    let mut out = String::new();
    let Some(first) = records.first() else {
        return out;
    };
    let header: Vec<String> = first.0.iter().map(|(k, _)| csv_field(k)).collect();
    writeln!(out, "{}", header.join(",")).unwrap();
    for r in records {
        let row: Vec<String> = r
            .0
            .iter()
            .map(|(_, c)| match c {
                Cell::Float(v) => fmt_float(*v),
                Cell::Int(v) => v.to_string(),
                Cell::Bool(v) => v.to_string(),
                Cell::Text(v) => csv_field(v),
            })
            .collect();
        writeln!(out, "{}", row.join(",")).unwrap();
    }
    out
}

fn json(records: &[Record]) -> String {
    let rows: Vec<Value> = records
        .iter()
        .map(|r| {
            let mut m = Map::new();
            for (k, c) in &r.0 {
                let v = match c {
                    // NaN and infinities have no JSON form.
                    Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
                    Cell::Int(v) => Value::from(*v),
                    Cell::Bool(v) => Value::from(*v),
                    Cell::Text(v) => Value::from(v.as_str()),
                };
                m.insert(k.clone(), v);
            }
            Value::Object(m)
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("plain values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            let s = fmt_float(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(fmt_float(1.5), "1.5000000000000000e0");
    }

    #[test]
    fn csv_layout() {
        let rows = vec![
            Record::new().with("s", -1.0).with("name", "a,b").with("ok", true),
            Record::new().with("s", 2.0).with("name", "c").with("ok", false),
        ];
        assert_eq!(
            render(&rows, Format::Csv),
            "s,name,ok\n-1.0000000000000000e0,\"a,b\",true\n2.0000000000000000e0,c,false\n"
        );
    }

    #[test]
    fn json_keeps_key_order_and_nulls_nan() {
        let rows = vec![Record::new().with("z", 1.0).with("a", f64::NAN)];
        let s = render(&rows, Format::Json);
        assert!(s.find("\"z\"").unwrap() < s.find("\"a\"").unwrap());
        assert!(s.contains("null"));
    }
}
