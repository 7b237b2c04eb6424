use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use fqgeom::report::{write_csv, write_json_lines};
use fqgeom::simplex::ClassCensus;
use fqgeom::AuditReport;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// What a command produces.
pub enum Output {
    Reports(Vec<AuditReport>),
    /// Flat JSON objects, one per line or CSV row.
    Rows(Vec<Value>),
    Census(ClassCensus),
    Text(String),
}

impl Output {
    fn default_format(&self) -> Format {
        match self {
            Output::Census(_) => Format::Csv,
            _ => Format::Json,
        }
    }
}

pub fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn rows_csv<W: Write>(w: W, rows: &[Value]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let header: Vec<String> = match rows.first() {
        Some(Value::Object(m)) => m.keys().cloned().collect(),
        _ => Vec::new(),
    };
    if !header.is_empty() {
        out.write_record(&header)?;
    }
    for r in rows {
        let rec: Vec<String> = header.iter().map(|k| cell(&r[k.as_str()])).collect();
        out.write_record(rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn emit(output: &Output, format: Option<Format>, path: Option<&Path>) -> Result<(), String> {
    let format = format.unwrap_or_else(|| output.default_format());
    let io_err = |e: io::Error| format!("--out: {e}");
    let csv_err = |e: csv::Error| format!("--out: {e}");
    let mut w = sink(path).map_err(io_err)?;
    match (output, format) {
        (Output::Reports(r), Format::Json) => write_json_lines(&mut w, r).map_err(io_err)?,
        (Output::Reports(r), Format::Csv) => write_csv(&mut w, r).map_err(csv_err)?,
        (Output::Rows(r), Format::Json) => {
            for row in r {
                writeln!(w, "{row}").map_err(io_err)?;
            }
        }
        (Output::Rows(r), Format::Csv) => rows_csv(&mut w, r).map_err(csv_err)?,
        (Output::Census(c), Format::Csv) => c.write_csv(&mut w).map_err(csv_err)?,
        (Output::Census(c), Format::Json) => {
            for (k, n) in &c.classes {
                let row = serde_json::json!({"key": k.to_string(), "multiplicity": n});
                writeln!(w, "{row}").map_err(io_err)?;
            }
        }
        (Output::Text(t), _) => w.write_all(t.as_bytes()).map_err(io_err)?,
    }
    w.flush().map_err(io_err)
}
