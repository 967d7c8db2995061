use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use parking_core::sweep::round_significant;
use serde_json::{Map, Number, Value};

use crate::args::Format;

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    List(Vec<Cell>),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Num(x as f64)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Missing, Into::into)
    }
}

/// Shortest decimal that round-trips the value after rounding to 12
/// significant digits.
pub fn format_number(x: f64) -> String {
    let y = round_significant(x, SIGNIFICANT_DIGITS);
    let a = y.abs();
    if a != 0.0 && !(1e-6..1e16).contains(&a) {
        format!("{y:e}")
    } else {
        format!("{y}")
    }
}

fn csv_field(c: &Cell) -> String {
    match c {
        Cell::Num(x) => format_number(*x),
        Cell::Text(s) => s.clone(),
        Cell::List(items) => items.iter().map(csv_field).collect::<Vec<_>>().join(";"),
        Cell::Missing => String::new(),
    }
}

fn json_value(c: &Cell) -> Value {
    match c {
        Cell::Num(x) => {
            let y = round_significant(*x, SIGNIFICANT_DIGITS);
            if y.fract() == 0.0 && y.abs() < 1e15 {
                Value::from(y as i64)
            } else {
                Number::from_f64(y).map_or(Value::Null, Value::Number)
            }
        }
        Cell::Text(s) => Value::String(s.clone()),
        Cell::List(items) => Value::Array(items.iter().map(json_value).collect()),
        Cell::Missing => Value::Null,
    }
}

/// Header plus rows, each row as wide as the header.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl From<parking_core::Table> for Output {
    fn from(t: parking_core::Table) -> Self {
        Output {
            header: t.header,
            rows: t
                .rows
                .into_iter()
                .map(|r| r.into_iter().map(Cell::Num).collect())
                .collect(),
        }
    }
}

impl Output {
    pub fn render(&self, format: Format, w: impl Write) -> Result<()> {
        match format {
            Format::Csv => {
                let mut wr = csv::WriterBuilder::new()
                    .terminator(csv::Terminator::Any(b'\n'))
                    .from_writer(w);
                wr.write_record(&self.header)?;
                for row in &self.rows {
                    wr.write_record(row.iter().map(csv_field))?;
                }
                wr.flush()?;
            }
            Format::Json => {
                let mut w = w;
                for row in &self.rows {
                    let obj: Map<String, Value> = self.header.iter().cloned().zip(row.iter().map(json_value)).collect();
                    serde_json::to_writer(&mut w, &obj)?;
                    w.write_all(b"\n")?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }

    pub fn write(&self, format: Format, out: Option<&Path>) -> Result<()> {
        match out {
            Some(path) => {
                let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
                self.render(format, BufWriter::new(f))
            }
            None => self.render(format, io::stdout().lock()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_use_twelve_digits() {
        assert_eq!(format_number(2300.0), "2300");
        assert_eq!(format_number(0.3), "0.3");
        assert_eq!(format_number(25.0 / 23.0), "1.08695652174");
        assert_eq!(format_number(1e-9), "1e-9");
        assert_eq!(format_number(0.1 + 0.2), "0.3");
    }

    #[test]
    fn csv_and_json_rows() {
        let out = Output {
            header: vec!["a".into(), "b".into(), "c".into()],
            rows: vec![vec![Cell::Num(1.5), Cell::Text("x,y".into()), Cell::Missing]],
        };
        let mut buf = Vec::new();
        out.render(Format::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b,c\n1.5,\"x,y\",\n");
        let mut buf = Vec::new();
        out.render(Format::Json, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "{\"a\":1.5,\"b\":\"x,y\",\"c\":null}\n"
        );
    }
}
