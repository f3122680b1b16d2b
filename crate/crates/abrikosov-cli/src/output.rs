use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use abrikosov::CertifiedValue;
use clap::ValueEnum;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Rows for CSV output.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table { headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub struct Report {
    pub json: Value,
    pub table: Table,
}

pub fn certified(v: &CertifiedValue<f64>) -> Value {
    json!({ "value": v.value, "bound": v.remainder_bound, "radius": v.truncation_radius })
}

pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn render(report: &Report, format: Format) -> io::Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_vec_pretty(&report.json)?;
            s.push(b'\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&report.table.headers)?;
            for r in &report.table.rows {
                w.write_record(r)?;
            }
            w.into_inner().map_err(|e| io::Error::new(io::ErrorKind::Other, e.to_string()))
        }
    }
}

pub fn emit(bytes: &[u8], out: Option<&Path>) -> io::Result<()> {
    match out {
        Some(p) => File::create(p)?.write_all(bytes),
        None => io::stdout().lock().write_all(bytes),
    }
}
