//! Long-format tables rendered as CSV or JSON.

use std::io::Write;

use anyhow::Result;
use confdist::Bound;
use serde_json::{Map, Value};

/// Significant digits of every printed float.
pub const DISPLAY_DIGITS: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Int(u64),
    Text(String),
    Flag(bool),
    Missing,
}

impl From<f64> for Field {
    fn from(x: f64) -> Self {
        Field::Num(x)
    }
}

impl From<u64> for Field {
    fn from(x: u64) -> Self {
        Field::Int(x)
    }
}

impl From<u32> for Field {
    fn from(x: u32) -> Self {
        Field::Int(x as u64)
    }
}

impl From<bool> for Field {
    fn from(x: bool) -> Self {
        Field::Flag(x)
    }
}

impl From<&str> for Field {
    fn from(x: &str) -> Self {
        Field::Text(x.to_string())
    }
}

impl From<String> for Field {
    fn from(x: String) -> Self {
        Field::Text(x)
    }
}

impl From<Bound> for Field {
    fn from(b: Bound) -> Self {
        Field::Num(b.to_f64())
    }
}

impl<T: Into<Field>> From<Option<T>> for Field {
    fn from(x: Option<T>) -> Self {
        x.map_or(Field::Missing, Into::into)
    }
}

impl Field {
    fn display(&self) -> String {
        match self {
            Field::Num(x) => format_sig(*x, DISPLAY_DIGITS),
            Field::Int(i) => i.to_string(),
            Field::Text(s) => s.clone(),
            Field::Flag(b) => b.to_string(),
            Field::Missing => String::new(),
        }
    }
}

/// `%g`-style formatting with `digits` significant digits.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Field>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Field>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Field::display))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Array of objects; numbers in full precision next to a `<name>_display`
    /// string. Non-finite numbers become `null`.
    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (name, field) in self.columns.iter().zip(row) {
                    let value = match field {
                        Field::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
                        Field::Int(i) => Value::from(*i),
                        Field::Text(s) => Value::String(s.clone()),
                        Field::Flag(b) => Value::Bool(*b),
                        Field::Missing => Value::Null,
                    };
                    obj.insert(name.to_string(), value);
                    if let Field::Num(_) = field {
                        obj.insert(format!("{name}_display"), Value::String(field.display()));
                    }
                }
                Value::Object(obj)
            })
            .collect();
        serde_json::to_writer_pretty(&mut out, &records)?;
        writeln!(out)?;
        Ok(())
    }
}
