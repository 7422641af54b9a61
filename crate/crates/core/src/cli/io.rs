//! CSV ingestion and tabular output.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::estimators::EpochField;
use crate::moments::{FieldStats, FieldWarning, WeightVector};

fn open(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    parse_error(path, line, e.to_string())
}

fn finite(path: &Path, line: u64, text: &str) -> Result<f64> {
    let v: f64 = text
        .parse()
        .map_err(|_| parse_error(path, line, format!("'{text}' is not a number")))?;
    if !v.is_finite() {
        return Err(parse_error(
            path,
            line,
            format!("non-finite value '{text}'"),
        ));
    }
    Ok(v)
}

/// Second column of a two-column `site_id,<value>` file, in file order.
fn read_site_column(path: &Path) -> Result<Vec<f64>> {
    let mut reader = open(path)?;
    let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.len() != 2 {
        return Err(parse_error(
            path,
            1,
            format!(
                "expected two columns (site_id, value), found {}",
                header.len()
            ),
        ));
    }
    let mut values = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 2 {
            return Err(parse_error(
                path,
                line,
                format!("expected 2 fields, found {}", rec.len()),
            ));
        }
        values.push(finite(path, line, &rec[1])?);
    }
    if values.is_empty() {
        return Err(parse_error(path, 1, "no data rows"));
    }
    Ok(values)
}

/// Reads `site_id,value` rows into an [`EpochField`].
pub fn ingest_epoch_csv(path: &Path) -> Result<EpochField> {
    EpochField::new(read_site_column(path)?)
}

/// Reads `site_id,weight` rows; weights must already sum to 1 within 1e-6.
pub fn ingest_weights_csv(path: &Path) -> Result<WeightVector> {
    WeightVector::new(read_site_column(path)?)
}

/// Reads first moments (`site_id,mu`) and raw second moments, either a
/// dense `N × N` matrix under any header row or `i,j,value` triplets with
/// zero-based indices. A triplet whose mirror is absent is mirrored.
pub fn ingest_field_stats_csv(
    mu_path: &Path,
    second_path: &Path,
) -> Result<(FieldStats, Vec<FieldWarning>)> {
    let mu = read_site_column(mu_path)?;
    let n = mu.len();
    let mut reader = open(second_path)?;
    let header = reader
        .headers()
        .map_err(|e| csv_error(second_path, e))?
        .clone();
    let triplets = header.iter().eq(["i", "j", "value"]);
    let mut second = vec![0.0; n * n];
    if triplets {
        let mut seen = vec![false; n * n];
        let mut entries = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| csv_error(second_path, e))?;
            let line = rec.position().map_or(0, |p| p.line());
            if rec.len() != 3 {
                return Err(parse_error(second_path, line, "expected i,j,value"));
            }
            let index = |k: usize| -> Result<usize> {
                let i: usize = rec[k].parse().map_err(|_| {
                    parse_error(second_path, line, format!("bad index '{}'", &rec[k]))
                })?;
                if i >= n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: i + 1,
                    });
                }
                Ok(i)
            };
            let (i, j) = (index(0)?, index(1)?);
            let v = finite(second_path, line, &rec[2])?;
            second[i * n + j] = v;
            seen[i * n + j] = true;
            entries.push((i, j, v));
        }
        for (i, j, v) in entries {
            if !seen[j * n + i] {
                second[j * n + i] = v;
            }
        }
    } else {
        if header.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: header.len(),
            });
        }
        let mut rows = 0;
        for rec in reader.records() {
            let rec = rec.map_err(|e| csv_error(second_path, e))?;
            let line = rec.position().map_or(0, |p| p.line());
            if rows >= n || rec.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: if rows >= n { rows + 1 } else { rec.len() },
                });
            }
            for (j, cell) in rec.iter().enumerate() {
                second[rows * n + j] = finite(second_path, line, cell)?;
            }
            rows += 1;
        }
        if rows != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rows,
            });
        }
    }
    FieldStats::from_estimates(mu, second)
}

/// Writes `site_id,value` rows.
pub fn write_epoch_csv<W: Write>(field: &EpochField, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::invalid(format!("csv write: {e}"));
    w.write_record(["site_id", "value"]).map_err(err)?;
    for (i, v) in field.values().iter().enumerate() {
        w.write_record([i.to_string(), v.to_string()])
            .map_err(err)?;
    }
    w.flush()
        .map_err(|e| Error::invalid(format!("csv write: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Jsonlines,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(u128),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Real(v) => v.to_string(),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Real(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            // JSON numbers lose precision past 2^53
            Cell::Int(v) if *v <= (1u128 << 53) => Value::from(*v as u64),
            Cell::Int(v) => Value::String(v.to_string()),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u128)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(u128::from(v))
    }
}

impl From<u128> for Cell {
    fn from(v: u128) -> Self {
        Cell::Int(v)
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

/// A header and rows of cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<()> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                let err = |e: csv::Error| Error::invalid(format!("csv write: {e}"));
                w.write_record(&self.header).map_err(err)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::text)).map_err(err)?;
                }
                w.flush()
                    .map_err(|e| Error::invalid(format!("csv write: {e}")))
            }
            Format::Jsonlines => {
                let mut out = out;
                for row in &self.rows {
                    let obj: Map<String, Value> = self
                        .header
                        .iter()
                        .zip(row)
                        .map(|(k, c)| (k.to_string(), c.json()))
                        .collect();
                    writeln!(out, "{}", Value::Object(obj))
                        .map_err(|e| Error::invalid(format!("write: {e}")))?;
                }
                Ok(())
            }
        }
    }
}
