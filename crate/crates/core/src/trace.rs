//! Per-iteration convergence records and their CSV / JSON encodings.
//!
//! CSV layout (schema 1):
//!
//! ```text
//! # schema=1
//! # method=irm-cg-fast
//! # status=converged
//! # final_rel_res=9.4e-11
//! # refreshes=3
//! iter,abs_res,rel_res,energy,basis_size,spmv,wall_nanos
//! 0,1.0000000000000000e0,1.0000000000000000e0,,0,2,1834
//! ```
//!
//! An empty `energy` field means energy was not traced.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{IrmError, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_COLUMNS: &str = "iter,abs_res,rel_res,energy,basis_size,spmv,wall_nanos";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "message")]
pub enum Status {
    Converged,
    MaxIterations,
    Error(String),
}

impl Status {
    fn encode(&self) -> String {
        match self {
            Status::Converged => "converged".into(),
            Status::MaxIterations => "max-iterations".into(),
            Status::Error(msg) => format!("error: {msg}"),
        }
    }

    fn decode(s: &str) -> Option<Self> {
        match s {
            "converged" => Some(Status::Converged),
            "max-iterations" => Some(Status::MaxIterations),
            _ => s.strip_prefix("error: ").map(|m| Status::Error(m.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub iter: usize,
    #[serde(rename = "abs_res")]
    pub abs_residual: f64,
    #[serde(rename = "rel_res")]
    pub rel_residual: f64,
    pub energy: Option<f64>,
    pub basis_size: usize,
    pub spmv: u64,
    pub wall_nanos: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub schema: u32,
    pub method: String,
    pub status: Status,
    /// `||b - A x|| / ||r0||` recomputed explicitly at the end of the solve.
    pub final_rel_residual: f64,
    pub refreshes: u64,
    pub records: Vec<StepRecord>,
}

impl ConvergenceTrace {
    pub fn new(method: impl Into<String>) -> Self {
        ConvergenceTrace {
            schema: SCHEMA_VERSION,
            method: method.into(),
            status: Status::MaxIterations,
            final_rel_residual: 1.0,
            refreshes: 0,
            records: Vec::new(),
        }
    }

    /// Number of completed steps (the last record's `iter`).
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.iter)
    }

    pub fn spmv_count(&self) -> u64 {
        self.records.last().map_or(0, |r| r.spmv)
    }

    pub fn is_converged(&self) -> bool {
        self.status == Status::Converged
    }

    pub fn energies(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.energy).collect()
    }

    pub fn rel_residuals(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.rel_residual).collect()
    }

    /// Zeroes every `wall_nanos` field, for byte-stable output.
    pub fn strip_wall_clock(&mut self) {
        for r in &mut self.records {
            r.wall_nanos = 0;
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# schema={}", self.schema);
        let _ = writeln!(out, "# method={}", self.method);
        let _ = writeln!(out, "# status={}", self.status.encode());
        let _ = writeln!(out, "# final_rel_res={:.16e}", self.final_rel_residual);
        let _ = writeln!(out, "# refreshes={}", self.refreshes);
        let _ = writeln!(out, "{CSV_COLUMNS}");
        for r in &self.records {
            let energy = r.energy.map(|e| format!("{e:.16e}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{:.16e},{:.16e},{},{},{},{}",
                r.iter, r.abs_residual, r.rel_residual, energy, r.basis_size, r.spmv, r.wall_nanos
            );
        }
        out
    }

    pub fn from_csv(text: &str) -> std::result::Result<Self, String> {
        let mut trace = ConvergenceTrace::new("");
        trace.schema = 0;
        let mut saw_header = false;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                let Some((key, value)) = meta.trim().split_once('=') else {
                    continue;
                };
                match key.trim() {
                    "schema" => trace.schema = value.parse().map_err(|_| format!("bad schema '{value}'"))?,
                    "method" => trace.method = value.to_string(),
                    "status" => trace.status = Status::decode(value).ok_or(format!("bad status '{value}'"))?,
                    "final_rel_res" => {
                        trace.final_rel_residual = value.parse().map_err(|_| format!("bad final_rel_res '{value}'"))?
                    }
                    "refreshes" => trace.refreshes = value.parse().map_err(|_| format!("bad refreshes '{value}'"))?,
                    _ => {}
                }
                continue;
            }
            if !saw_header {
                if line != CSV_COLUMNS {
                    return Err(format!("line {}: unexpected header '{line}'", lineno + 1));
                }
                saw_header = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 7 {
                return Err(format!("line {}: expected 7 fields, found {}", lineno + 1, fields.len()));
            }
            let bad = |what: &str| format!("line {}: bad {what}", lineno + 1);
            trace.records.push(StepRecord {
                iter: fields[0].parse().map_err(|_| bad("iter"))?,
                abs_residual: fields[1].parse().map_err(|_| bad("abs_res"))?,
                rel_residual: fields[2].parse().map_err(|_| bad("rel_res"))?,
                energy: if fields[3].is_empty() {
                    None
                } else {
                    Some(fields[3].parse().map_err(|_| bad("energy"))?)
                },
                basis_size: fields[4].parse().map_err(|_| bad("basis_size"))?,
                spmv: fields[5].parse().map_err(|_| bad("spmv"))?,
                wall_nanos: fields[6].parse().map_err(|_| bad("wall_nanos"))?,
            });
        }
        if trace.schema != SCHEMA_VERSION {
            return Err(format!("unsupported schema {}", trace.schema));
        }
        Ok(trace)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serialises")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    pub fn write(&self, path: &Path, format: TraceFormat) -> Result<()> {
        let body = match format {
            TraceFormat::Csv => self.to_csv(),
            TraceFormat::Json => self.to_json(),
        };
        let mut f = std::fs::File::create(path).map_err(|e| IrmError::io(path, e))?;
        f.write_all(body.as_bytes()).map_err(|e| IrmError::io(path, e))
    }

    /// Reads a trace, choosing the decoder from the first non-blank character.
    pub fn read(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| IrmError::io(path, e))?;
        let mut text = String::new();
        for line in std::io::BufReader::new(f).lines() {
            text.push_str(&line.map_err(|e| IrmError::io(path, e))?);
            text.push('\n');
        }
        let parsed = if text.trim_start().starts_with('{') {
            Self::from_json(&text)
        } else {
            Self::from_csv(&text)
        };
        parsed.map_err(|msg| IrmError::format(path, msg))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Csv,
    Json,
}
