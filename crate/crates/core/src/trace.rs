//! Per-round run traces and their CSV form.
//!
//! Columns are fixed per engine and written with shortest-round-trip float
//! formatting, so a written trace reads back bit-identically. Non-finite
//! placeholders (`NaN` for "not defined at this round", `inf` for unbounded
//! quantities) survive the round trip.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// One row of a centralized dual-averaging trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdaRow {
    pub t: usize,
    /// Objective value at the round's iterate.
    pub f: f64,
    /// Squared gradient-mapping norm at the round's iterate.
    pub grad_map_sq: f64,
    /// Minimum of `grad_map_sq` over rounds `0..=t`.
    pub min_grad_map_sq: f64,
    /// Theoretical decay bound for `min_grad_map_sq` at this round
    /// (`inf` at round zero or when no objective lower bound was supplied).
    pub rate_bound: f64,
}

/// One row of a distributed dual-averaging trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DdaRow {
    pub t: usize,
    /// Averaged objective at the auxiliary (network-mean) iterate.
    pub cost: f64,
    /// Squared gradient-mapping norm at the auxiliary iterate.
    pub grad_map_sq: f64,
    /// `sum_i |x_i - mean(x)|^2`.
    pub consensus_err_sq: f64,
    /// `sum_i |x_i - y|^2` against the auxiliary iterate.
    pub deviation_sq: f64,
    /// `n * grad_map_sq + deviation_sq`.
    pub residual: f64,
    /// Minimum of `residual` over rounds `0..=t`.
    pub min_residual: f64,
    /// Certified decay bound `C / (t + 1)` (`NaN` when no constant applies).
    pub c_over_t: f64,
    /// `|x_t - x_{t-1}|_F + sqrt(consensus_err_sq)` (`NaN` at round zero).
    pub change_plus_consensus: f64,
}

/// One row of a distributed projected-gradient baseline trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpgaRow {
    pub t: usize,
    /// Averaged objective at the network-mean iterate.
    pub cost: f64,
    /// `sum_i |x_i - mean(x)|^2`.
    pub consensus_err_sq: f64,
    /// `|x_t - x_{t-1}|_F` (`NaN` at round zero).
    pub change_norm: f64,
    /// `change_norm + sqrt(consensus_err_sq)` (`NaN` at round zero).
    pub change_plus_consensus: f64,
}

macro_rules! trace_type {
    ($trace:ident, $row:ident, [$($field:ident),+ $(,)?]) => {
        #[derive(Debug, Clone, Default, PartialEq)]
        pub struct $trace {
            pub rows: Vec<$row>,
        }

        impl $trace {
            pub const HEADER: &'static [&'static str] =
                &["t", $(stringify!($field)),+];

            pub fn len(&self) -> usize {
                self.rows.len()
            }

            pub fn is_empty(&self) -> bool {
                self.rows.is_empty()
            }

            /// Writes the trace as CSV.
            pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
                writeln!(out, "{}", Self::HEADER.join(","))?;
                for row in &self.rows {
                    write!(out, "{}", row.t)?;
                    $(
                        write!(out, ",{}", fmt_float(row.$field))?;
                    )+
                    writeln!(out)?;
                }
                Ok(())
            }

            pub fn to_csv_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
                let mut w = BufWriter::new(File::create(path)?);
                self.write_csv(&mut w)?;
                w.flush()?;
                Ok(())
            }

            pub fn to_csv_string(&self) -> Result<String> {
                let mut buf = Vec::new();
                self.write_csv(&mut buf)?;
                Ok(String::from_utf8(buf).expect("csv output is ascii"))
            }

            /// Reads a trace written by [`Self::write_csv`].
            pub fn read_csv<R: Read>(input: R) -> Result<Self> {
                let reader = BufReader::new(input);
                let mut lines = reader.lines();
                let header = lines
                    .next()
                    .ok_or_else(|| Error::TraceFormat("empty trace file".into()))??;
                let expected = Self::HEADER.join(",");
                if header.trim() != expected {
                    return Err(Error::TraceFormat(format!(
                        "unexpected header {header:?}, expected {expected:?}"
                    )));
                }
                let mut rows = Vec::new();
                for (lineno, line) in lines.enumerate() {
                    let line = line?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    let mut parts = line.split(',');
                    let t = parts
                        .next()
                        .ok_or_else(|| bad_line(lineno))?
                        .trim()
                        .parse::<usize>()
                        .map_err(|_| bad_line(lineno))?;
                    $(
                        let $field = parse_float(parts.next(), lineno)?;
                    )+
                    if parts.next().is_some() {
                        return Err(bad_line(lineno));
                    }
                    rows.push($row { t, $($field),+ });
                }
                Ok(Self { rows })
            }

            pub fn from_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
                Self::read_csv(File::open(path)?)
            }

            /// The values of a named column, `t` included.
            pub fn column(&self, name: &str) -> Option<Vec<f64>> {
                if name == "t" {
                    return Some(self.rows.iter().map(|r| r.t as f64).collect());
                }
                match name {
                    $(
                        stringify!($field) =>
                            Some(self.rows.iter().map(|r| r.$field).collect()),
                    )+
                    _ => None,
                }
            }
        }
    };
}

trace_type!(CdaTrace, CdaRow, [f, grad_map_sq, min_grad_map_sq, rate_bound]);
trace_type!(
    DdaTrace,
    DdaRow,
    [
        cost,
        grad_map_sq,
        consensus_err_sq,
        deviation_sq,
        residual,
        min_residual,
        c_over_t,
        change_plus_consensus,
    ]
);
trace_type!(
    DpgaTrace,
    DpgaRow,
    [cost, consensus_err_sq, change_norm, change_plus_consensus]
);

/// Formats a float so it round-trips exactly (`NaN`/`inf`/`-inf` spelled out).
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        // Rust's Display produces the shortest string that round-trips.
        format!("{v}")
    }
}

fn parse_float(field: Option<&str>, lineno: usize) -> Result<f64> {
    let text = field.ok_or_else(|| bad_line(lineno))?.trim();
    match text {
        "NaN" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => text.parse::<f64>().map_err(|_| bad_line(lineno)),
    }
}

fn bad_line(lineno: usize) -> Error {
    Error::TraceFormat(format!("malformed row at data line {}", lineno + 1))
}
