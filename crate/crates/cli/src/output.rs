use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
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

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Float(v) => write!(f, "{v}"),
            Cell::Text(v) => f.write_str(v),
            Cell::Bool(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Int(v) => s.serialize_u64(*v),
            // JSON has no NaN or infinity
            Cell::Float(v) if !v.is_finite() => s.serialize_str(&v.to_string()),
            Cell::Float(v) => s.serialize_f64(*v),
            Cell::Text(v) => s.serialize_str(v),
            Cell::Bool(v) => s.serialize_bool(*v),
        }
    }
}

/// Rows under a fixed header.
#[derive(Debug, Clone)]
pub struct Table {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
    /// Replaces the row objects in JSON output.
    pub json: Option<String>,
}

impl Table {
    pub fn new(header: &'static [&'static str]) -> Self {
        Table {
            header,
            rows: Vec::new(),
            json: None,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

struct RowObject<'a>(&'a [&'static str], &'a [Cell]);

impl Serialize for RowObject<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

pub fn write_table(table: &Table, format: Format, path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    match format {
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(&mut w);
            csv.write_record(table.header)?;
            for row in &table.rows {
                csv.write_record(row.iter().map(|c| c.to_string()))?;
            }
            csv.flush()?;
        }
        Format::Json => {
            match &table.json {
                Some(text) => w.write_all(text.as_bytes())?,
                None => {
                    let rows: Vec<RowObject> = table.rows.iter().map(|r| RowObject(table.header, r)).collect();
                    serde_json::to_writer_pretty(&mut w, &rows)?;
                }
            }
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Everything needed to regenerate a data file.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: &'static str,
    pub schema: String,
    pub data_file: String,
    pub format: Format,
    pub rows: usize,
    pub seed: Option<u64>,
    pub threads: usize,
    pub command: Vec<String>,
    pub config: serde_json::Value,
    pub spec: Option<cspc::StructuredMatrixSpec>,
}

pub fn manifest_path(data: &Path) -> PathBuf {
    let mut name = data.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    data.with_file_name(name)
}

pub fn write_manifest(manifest: &Manifest, data: &Path) -> Result<PathBuf, CliError> {
    let path = manifest_path(data);
    let mut w = BufWriter::new(File::create(&path)?);
    serde_json::to_writer_pretty(&mut w, manifest)?;
    writeln!(w)?;
    w.flush()?;
    Ok(path)
}
