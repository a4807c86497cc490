//! File writers. Reals are printed with 17 significant digits so that CSV
//! output round-trips and is byte-identical across reruns.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use sawtooth_core::analysis::COLUMNS;
use sawtooth_core::TimeSeries;

use crate::config::OutputFormat;
use crate::error::HarnessResult;

pub fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "NaN".to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => fmt_real(*v),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Real(v) if v.is_finite() => Value::from(*v),
            Cell::Real(_) => Value::Null,
            Cell::Text(s) => Value::from(s.clone()),
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
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(i64::from(v))
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

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Real(f64::NAN), Into::into)
    }
}

/// A summary table written as both CSV and JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.to_string(), v.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    pub fn write_csv(&self, path: &Path) -> HarnessResult<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Collects written files so the manifest can list them.
#[derive(Debug)]
pub struct OutputDir {
    pub root: PathBuf,
    pub written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path) -> HarnessResult<Self> {
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn track(&mut self, name: &str) -> PathBuf {
        let p = self.root.join(name);
        self.written.push(p.clone());
        p
    }

    /// Full series in the requested format; returns the file name.
    pub fn series(&mut self, stem: &str, series: &TimeSeries<f64>, format: OutputFormat) -> HarnessResult<String> {
        match format {
            OutputFormat::Csv => {
                let name = format!("{stem}.csv");
                write_series_csv(&self.track(&name), series)?;
                Ok(name)
            }
            OutputFormat::Json => {
                let name = format!("{stem}.json");
                let path = self.track(&name);
                fs::write(path, serde_json::to_vec_pretty(series)?)?;
                Ok(name)
            }
        }
    }

    /// Plot-ready `(t, C)` columns.
    pub fn curve(&mut self, stem: &str, columns: &[&'static str], rows: impl Iterator<Item = (u64, Vec<f64>)>) -> HarnessResult<()> {
        let mut t = Table::new(columns);
        for (step, vals) in rows {
            let mut row = vec![Cell::from(step)];
            row.extend(vals.into_iter().map(Cell::Real));
            t.push(row);
        }
        t.write_csv(&self.track(&format!("{stem}.csv")))
    }

    /// Summary table as `<stem>.csv` and `<stem>.json`.
    pub fn table(&mut self, stem: &str, table: &Table) -> HarnessResult<()> {
        table.write_csv(&self.track(&format!("{stem}.csv")))?;
        let path = self.track(&format!("{stem}.json"));
        fs::write(path, serde_json::to_vec_pretty(&table.to_json())?)?;
        Ok(())
    }

    pub fn json<S: Serialize>(&mut self, name: &str, value: &S) -> HarnessResult<()> {
        let path = self.track(name);
        let mut f = fs::File::create(path)?;
        f.write_all(&serde_json::to_vec_pretty(value)?)?;
        f.write_all(b"\n")?;
        Ok(())
    }
}

pub fn write_series_csv(path: &Path, series: &TimeSeries<f64>) -> HarnessResult<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    w.write_record(COLUMNS)?;
    for r in &series.records {
        let mut row = vec![r.t.to_string()];
        row.extend(r.values().iter().map(|&v| fmt_real(v)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn sha256_file(path: &Path) -> HarnessResult<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}
