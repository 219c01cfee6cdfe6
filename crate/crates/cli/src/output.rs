//! Tabular output as CSV (streamed) or a JSON document with the run manifest.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::failure::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Str(String),
    Int(u64),
    Float(f64),
    Bool(bool),
    Empty,
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Str(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Str(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// 17 significant digits, enough to reparse to the same double.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Str(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Float(f) => fmt_float(*f),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Str(s) => json!(s),
            Cell::Int(i) => json!(i),
            Cell::Float(f) if f.is_finite() => json!(f),
            Cell::Float(f) => json!(f.to_string()),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

/// Everything needed to rerun a command.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub config: Value,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub version: &'static str,
    pub runtime_secs: f64,
}

pub struct Table {
    header: Vec<String>,
    format: Format,
    csv: Option<csv::Writer<Box<dyn Write>>>,
    json_rows: Vec<Value>,
    out: Option<Box<dyn Write>>,
    path: Option<PathBuf>,
    started: Instant,
    command: String,
    config: Value,
    seed: Option<u64>,
    workers: Option<usize>,
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) if p.as_os_str() != "-" => Box::new(BufWriter::new(
            File::create(p)
                .with_context(|| format!("cannot create {}", p.display()))
                .map_err(|e| Failure::Config.wrap(e))?,
        )),
        _ => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

impl Table {
    pub fn new(
        command: &str,
        header: &[&str],
        format: Format,
        path: Option<&Path>,
        config: Value,
    ) -> Result<Self> {
        let out = sink(path)?;
        let (csv, out) = match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(header)?;
                (Some(w), None)
            }
            Format::Json => (None, Some(out)),
        };
        Ok(Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            format,
            csv,
            json_rows: Vec::new(),
            out,
            path: path.filter(|p| p.as_os_str() != "-").map(Path::to_path_buf),
            started: Instant::now(),
            command: command.to_string(),
            config,
            seed: None,
            workers: None,
        })
    }

    pub fn with_run(mut self, seed: u64, workers: usize) -> Self {
        self.seed = Some(seed);
        self.workers = Some(workers);
        self
    }

    pub fn row(&mut self, cells: Vec<Cell>) -> Result<()> {
        debug_assert_eq!(cells.len(), self.header.len());
        match self.format {
            Format::Csv => {
                let w = self.csv.as_mut().expect("csv writer");
                w.write_record(cells.iter().map(Cell::to_csv))?;
            }
            Format::Json => {
                let obj: Map<String, Value> = self
                    .header
                    .iter()
                    .cloned()
                    .zip(cells.iter().map(Cell::to_json))
                    .collect();
                self.json_rows.push(Value::Object(obj));
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Result<()> {
        let manifest = Manifest {
            command: self.command,
            arguments: std::env::args().collect(),
            config: self.config,
            seed: self.seed,
            workers: self.workers,
            version: env!("CARGO_PKG_VERSION"),
            runtime_secs: self.started.elapsed().as_secs_f64(),
        };
        match self.format {
            Format::Csv => {
                self.csv.expect("csv writer").flush()?;
                if let Some(path) = &self.path {
                    let mut name = path.as_os_str().to_owned();
                    name.push(".manifest.json");
                    let mut w = sink(Some(Path::new(&name)))?;
                    serde_json::to_writer_pretty(&mut w, &manifest)?;
                    writeln!(w)?;
                    w.flush()?;
                }
            }
            Format::Json => {
                let mut w = self.out.expect("json sink");
                let doc = json!({ "manifest": manifest, "rows": self.json_rows });
                serde_json::to_writer_pretty(&mut w, &doc)?;
                writeln!(w)?;
                w.flush()?;
            }
        }
        Ok(())
    }
}
