//! Tables written as CSV or JSON.
//!
//! CSV numbers use `{:.16e}` (17 significant digits, correctly rounded) and
//! infinite ratios are written as `inf`. JSON keeps column order.

use std::io::Write;

use serde_json::{Map, Number, Value};

use super::CliError;
use crate::photon_states::Ratio;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Ratio(Ratio),
    Flags(Vec<&'static str>),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Ratio> for Cell {
    fn from(r: Ratio) -> Self {
        Cell::Ratio(r)
    }
}

fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_number(*v),
            Cell::Ratio(Ratio::Finite(v)) => format_number(*v),
            Cell::Ratio(Ratio::Infinite) => "inf".to_string(),
            Cell::Flags(f) => f.join(";"),
        }
    }

    fn json(&self) -> Value {
        let num = |v: f64| Number::from_f64(v).map_or_else(|| Value::String(format_number(v)), Value::Number);
        match self {
            Cell::Num(v) => num(*v),
            Cell::Ratio(Ratio::Finite(v)) => num(*v),
            Cell::Ratio(Ratio::Infinite) => Value::String("inf".to_string()),
            Cell::Flags(f) => Value::Array(f.iter().map(|s| Value::String(s.to_string())).collect()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Header plus rows; `report` tables hold one row and print as a JSON object.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub report: bool,
    /// JSON-only fields that do not vary by row
    pub extras: Map<String, Value>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table { columns, rows: Vec::new(), report: false, extras: Map::new() }
    }

    pub fn write(&self, format: OutputFormat, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            OutputFormat::Csv => self.write_csv(out),
            OutputFormat::Json => self.write_json(out),
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.columns).map_err(CliError::io)?;
        for row in &self.rows {
            debug_assert_eq!(row.len(), self.columns.len());
            w.write_record(row.iter().map(Cell::csv)).map_err(CliError::io)?;
        }
        w.flush().map_err(CliError::io)
    }

    fn row_object(&self, row: &[Cell]) -> Map<String, Value> {
        self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect()
    }

    fn write_json(&self, out: &mut dyn Write) -> Result<(), CliError> {
        let value = if self.report && self.rows.len() == 1 {
            let mut obj = self.row_object(&self.rows[0]);
            obj.extend(self.extras.clone());
            Value::Object(obj)
        } else if self.extras.is_empty() {
            Value::Array(self.rows.iter().map(|r| Value::Object(self.row_object(r))).collect())
        } else {
            let mut obj = self.extras.clone();
            obj.insert(
                "rows".to_string(),
                Value::Array(self.rows.iter().map(|r| Value::Object(self.row_object(r))).collect()),
            );
            Value::Object(obj)
        };
        serde_json::to_writer_pretty(&mut *out, &value).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(out).map_err(CliError::io)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(vec!["R".into(), "ratio".into(), "flags".into()]);
        t.rows.push(vec![Cell::Num(0.1), Cell::Ratio(Ratio::Finite(2.5)), Cell::Flags(vec![])]);
        t.rows.push(vec![Cell::Num(0.0), Cell::Ratio(Ratio::Infinite), Cell::Flags(vec!["a", "b"])]);
        t
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        sample().write(OutputFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "R,ratio,flags\n1.0000000000000001e-1,2.5000000000000000e0,\n0.0000000000000000e0,inf,a;b\n"
        );
    }

    #[test]
    fn header_without_rows() {
        let mut buf = Vec::new();
        Table::new(vec!["a".into(), "b".into()]).write(OutputFormat::Csv, &mut buf).unwrap();
        assert_eq!(buf, b"a,b\n");
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), -1e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            let s = format_number(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
        }
    }

    #[test]
    fn json_keeps_order_and_sentinel() {
        let mut buf = Vec::new();
        let mut t = sample();
        t.rows.truncate(1);
        t.report = true;
        t.rows[0][1] = Cell::Ratio(Ratio::Infinite);
        t.write(OutputFormat::Json, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["R", "ratio", "flags"]);
        assert_eq!(v["ratio"], "inf");
    }
}
