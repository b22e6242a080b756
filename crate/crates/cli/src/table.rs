//! Plot-ready output tables.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

/// A row type with a fixed column order.
pub trait Row: Serialize {
    const HEADER: &'static [&'static str];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub t: f64,
    pub f: f64,
    #[serde(rename = "F")]
    pub cumulative: f64,
    #[serde(rename = "G_s")]
    pub per_follower: f64,
}

impl Row for CurveRow {
    const HEADER: &'static [&'static str] = &["t", "f", "F", "G_s"];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakRow {
    pub t_star: f64,
    pub g_at_peak: f64,
    pub converged: bool,
}

impl Row for PeakRow {
    const HEADER: &'static [&'static str] = &["t_star", "g_at_peak", "converged"];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CareerRow {
    pub stratum: String,
    pub week: u32,
    pub value: f64,
    pub n_users: usize,
}

impl Row for CareerRow {
    const HEADER: &'static [&'static str] = &["stratum", "week", "value", "n_users"];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub start_week: u32,
    pub c_hat: f64,
    pub alpha_hat: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

impl Row for FitRow {
    const HEADER: &'static [&'static str] =
        &["start_week", "c_hat", "alpha_hat", "r_squared", "n_points"];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortRow {
    pub start_week: u32,
    pub age: u32,
    pub value: f64,
    pub support: usize,
}

impl Row for CohortRow {
    const HEADER: &'static [&'static str] = &["start_week", "age", "value", "support"];
}

/// Writes `rows` with a header (CSV) or one object per line (JSON lines).
/// Floats use the shortest representation that parses back to the same
/// value.
pub fn write_rows<R: Row, W: Write>(rows: &[R], format: Format, writer: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
            w.write_record(R::HEADER)?;
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            let mut w = writer;
            for row in rows {
                serde_json::to_writer(&mut w, row)?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Buffered writer for `path`, or standard output when `path` is `None`.
pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

pub fn write_table<R: Row>(rows: &[R], format: Format, path: Option<&PathBuf>) -> Result<()> {
    let out = open_output(path.map(PathBuf::as_path))?;
    write_rows(rows, format, out).with_context(|| match path {
        Some(p) => format!("cannot write {}", p.display()),
        None => "cannot write to standard output".to_string(),
    })
}
