//! Deterministic CSV and JSON emission.

use std::io::Write;

use serde_json::{Map, Value};

use super::config::Format;
use crate::error::{Error, Result};
use crate::numerics::{PrecisionContext, Real};

/// Column schema plus rows of preformatted cells. Numbers are decimal
/// strings whose length is set by the precision of the run.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// A single record: JSON renders it as one flat object.
    pub record: bool,
}

impl ResultTable {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), record: false }
    }

    /// One row of `(name, value)` pairs.
    pub fn record(fields: Vec<(&str, String)>) -> Self {
        let (cols, row): (Vec<_>, Vec<_>) = fields.into_iter().map(|(k, v)| (k.to_string(), v)).unzip();
        Self { columns: cols, rows: vec![row], record: true }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }

    pub fn write_csv<W: Write>(&self, w: &mut W, header: &Header) -> Result<()> {
        writeln!(w, "{}", header.comment())?;
        let mut csv = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        csv.write_record(&self.columns).map_err(io)?;
        for r in &self.rows {
            csv.write_record(r).map_err(io)?;
        }
        csv.flush()?;
        Ok(())
    }

    pub fn to_json(&self, header: &Header) -> Value {
        let mut top = Map::new();
        top.insert("config_hash".into(), Value::String(header.config_hash.clone()));
        top.insert("precision_bits".into(), Value::from(header.precision_bits));
        if self.record && self.rows.len() == 1 {
            for (k, v) in self.columns.iter().zip(&self.rows[0]) {
                top.insert(k.clone(), Value::String(v.clone()));
            }
        } else {
            top.insert("columns".into(), Value::from(self.columns.clone()));
            let rows: Vec<Value> = self.rows.iter().map(|r| Value::from(r.clone())).collect();
            top.insert("rows".into(), Value::Array(rows));
        }
        Value::Object(top)
    }

    pub fn write<W: Write>(&self, w: &mut W, header: &Header, format: Format) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(w, header),
            Format::Json => {
                let text = serde_json::to_string_pretty(&self.to_json(header))
                    .map_err(|e| Error::Io(std::io::Error::other(e)))?;
                writeln!(w, "{text}")?;
                Ok(())
            }
        }
    }

    pub fn render(&self, header: &Header, format: Format) -> Result<String> {
        let mut buf = Vec::new();
        self.write(&mut buf, header, format)?;
        String::from_utf8(buf).map_err(|e| Error::Io(std::io::Error::other(e)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Header {
    pub config_hash: String,
    pub precision_bits: u32,
}

impl Header {
    pub fn comment(&self) -> String {
        format!("# config_hash={} precision_bits={}", self.config_hash, self.precision_bits)
    }
}

/// Full-precision decimal text of `x`.
pub fn num<T: Real>(ctx: &PrecisionContext, x: &T) -> String {
    x.to_decimal(ctx.decimal_digits())
}

pub fn opt_num<T: Real>(ctx: &PrecisionContext, x: Option<&T>) -> String {
    x.map(|v| num(ctx, v)).unwrap_or_default()
}
