//! Reading profiles from CSV and writing fitted profiles, reports and
//! plot data.
//!
//! Input files may start with a few free-form metadata lines before the
//! header row (renewables.ninja exports carry three). Timestamps are carried
//! through as opaque text.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::fitcore::{FitError, FitOutcome, FitStatus, Profile};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: column {column:?} not found in header")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{path}: line {line}: cannot parse {content:?} as a number")]
    Parse {
        path: PathBuf,
        line: u64,
        content: String,
    },
    #[error("{path}: line {line}: {source}")]
    Invalid {
        path: PathBuf,
        line: u64,
        #[source]
        source: FitError,
    },
    #[error("{path}: no data rows")]
    Empty { path: PathBuf },
    #[error("length mismatch: {what} has {got} values, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl IoError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn csv(path: &Path, source: csv::Error) -> Self {
        IoError::Csv {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Where to find the data in an input CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvLayout {
    /// Lines skipped before the header row.
    pub preamble_lines: usize,
    pub value_column: String,
    /// Carried through to the fitted output when present in the header.
    pub time_column: Option<String>,
    pub delimiter: u8,
}

impl Default for CsvLayout {
    fn default() -> Self {
        Self {
            preamble_lines: 3,
            value_column: "electricity".to_string(),
            time_column: Some("time".to_string()),
            delimiter: b',',
        }
    }
}

/// A profile read from disk, with its timestamps if the layout names a time
/// column that exists in the file.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileData {
    pub profile: Profile,
    pub timestamps: Option<Vec<String>>,
}

/// Byte offset just past the first `lines` newline-terminated lines.
fn skip_lines(text: &str, lines: usize) -> usize {
    let mut offset = 0;
    for _ in 0..lines {
        match text[offset..].find('\n') {
            Some(pos) => offset += pos + 1,
            None => return text.len(),
        }
    }
    offset
}

pub fn read_profile(path: &Path, layout: &CsvLayout) -> Result<ProfileData, IoError> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| IoError::io(path, e))?;
    let body = &text[skip_lines(&text, layout.preamble_lines)..];
    // csv positions are 1-based within `body`; add the skipped lines back.
    let line_offset = layout.preamble_lines as u64;

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(layout.delimiter)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let headers = reader.headers().map_err(|e| IoError::csv(path, e))?.clone();
    let value_idx = headers
        .iter()
        .position(|h| h == layout.value_column)
        .ok_or_else(|| IoError::MissingColumn {
            path: path.to_path_buf(),
            column: layout.value_column.clone(),
        })?;
    let time_idx = layout
        .time_column
        .as_deref()
        .and_then(|name| headers.iter().position(|h| h == name));

    let mut values = Vec::new();
    let mut lines = Vec::new();
    let mut timestamps = time_idx.map(|_| Vec::new());
    for record in reader.records() {
        let record = record.map_err(|e| IoError::csv(path, e))?;
        let line = record.position().map_or(0, |p| p.line()) + line_offset;
        let field = record.get(value_idx).unwrap_or("");
        let value: f64 = field.parse().map_err(|_| IoError::Parse {
            path: path.to_path_buf(),
            line,
            content: field.to_string(),
        })?;
        values.push(value);
        lines.push(line);
        if let (Some(ts), Some(idx)) = (timestamps.as_mut(), time_idx) {
            ts.push(record.get(idx).unwrap_or("").to_string());
        }
    }

    let profile = Profile::new(values).map_err(|source| match source {
        FitError::EmptyProfile => IoError::Empty {
            path: path.to_path_buf(),
        },
        FitError::OutOfRange { index, .. } | FitError::NotFinite { index } => IoError::Invalid {
            path: path.to_path_buf(),
            line: lines[index],
            source,
        },
        other => IoError::Invalid {
            path: path.to_path_buf(),
            line: 0,
            source: other,
        },
    })?;
    Ok(ProfileData {
        profile,
        timestamps,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, IoError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| IoError::io(path, e))
}

fn check_len(what: &'static str, got: usize, expected: usize) -> Result<(), IoError> {
    if got == expected {
        Ok(())
    } else {
        Err(IoError::LengthMismatch {
            what,
            got,
            expected,
        })
    }
}

/// Writes `time,original,fitted` (or `original,fitted`) rows.
///
/// Values use the shortest representation that parses back to the same
/// `f64`, so the fitted column round-trips exactly.
pub fn write_profile(
    path: &Path,
    timestamps: Option<&[String]>,
    original: &Profile,
    fitted: &Profile,
    layout: &CsvLayout,
) -> Result<(), IoError> {
    check_len("fitted profile", fitted.len(), original.len())?;
    if let Some(ts) = timestamps {
        check_len("timestamps", ts.len(), original.len())?;
    }

    let mut writer = csv::WriterBuilder::new()
        .delimiter(layout.delimiter)
        .from_writer(create(path)?);
    let rows = original.values().iter().zip(fitted.values());
    let result = match timestamps {
        Some(ts) => writer
            .write_record(["time", "original", "fitted"])
            .and_then(|_| {
                ts.iter().zip(rows).try_for_each(|(t, (o, f))| {
                    writer.write_record([t.as_str(), &o.to_string(), &f.to_string()])
                })
            }),
        None => writer.write_record(["original", "fitted"]).and_then(|_| {
            rows.into_iter()
                .try_for_each(|(o, f)| writer.write_record([o.to_string(), f.to_string()]))
        }),
    };
    result.map_err(|e| IoError::csv(path, e))?;
    writer.flush().map_err(|e| IoError::io(path, e))
}

/// Summary of one fit, serialized as a single JSON object.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub input_path: String,
    pub m: usize,
    pub r: usize,
    pub n: usize,
    /// Mean of the input profile.
    pub current_cf: f64,
    pub target_cf: f64,
    pub exponent: f64,
    pub achieved_cf: f64,
    pub status: ReportStatus,
    pub iterations: usize,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportStatus {
    Exact,
    ClampedLow,
    ClampedHigh,
}

impl ReportStatus {
    pub fn as_str(&self) -> &'static str {
        FitStatus::from(*self).as_str()
    }

    pub fn is_clamped(&self) -> bool {
        !matches!(self, ReportStatus::Exact)
    }
}

impl From<ReportStatus> for FitStatus {
    fn from(status: ReportStatus) -> Self {
        match status {
            ReportStatus::Exact => FitStatus::Exact,
            ReportStatus::ClampedLow => FitStatus::ClampedLow,
            ReportStatus::ClampedHigh => FitStatus::ClampedHigh,
        }
    }
}

impl From<FitStatus> for ReportStatus {
    fn from(status: FitStatus) -> Self {
        match status {
            FitStatus::Exact => ReportStatus::Exact,
            FitStatus::ClampedLow => ReportStatus::ClampedLow,
            FitStatus::ClampedHigh => ReportStatus::ClampedHigh,
        }
    }
}

impl FitReport {
    pub fn new(input_path: String, target_cf: f64, outcome: &FitOutcome, elapsed_ms: f64) -> Self {
        Self {
            input_path,
            m: outcome.stats.m,
            r: outcome.stats.r,
            n: outcome.stats.n,
            current_cf: outcome.stats.mean,
            target_cf,
            exponent: outcome.exponent,
            achieved_cf: outcome.achieved_mean,
            status: outcome.status.into(),
            iterations: outcome.iterations,
            elapsed_ms,
        }
    }
}

pub fn write_report(path: &Path, report: &FitReport) -> Result<(), IoError> {
    let mut out = create(path)?;
    serde_json::to_writer(&mut out, report).map_err(|e| IoError::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    out.write_all(b"\n")
        .and_then(|_| out.flush())
        .map_err(|e| IoError::io(path, e))
}

/// Paths written by [`write_plot_data`].
pub fn plot_data_paths(prefix: &Path) -> (PathBuf, PathBuf) {
    let with_suffix = |suffix: &str| {
        let mut name = prefix.as_os_str().to_owned();
        name.push(suffix);
        PathBuf::from(name)
    };
    (
        with_suffix("_chronological.csv"),
        with_suffix("_sorted.csv"),
    )
}

fn write_indexed(path: &Path, original: &[f64], fitted: &[f64]) -> Result<(), IoError> {
    let mut writer = csv::Writer::from_writer(create(path)?);
    writer
        .write_record(["index", "original", "fitted"])
        .and_then(|_| {
            original
                .iter()
                .zip(fitted)
                .enumerate()
                .try_for_each(|(i, (o, f))| {
                    writer.write_record([(i + 1).to_string(), o.to_string(), f.to_string()])
                })
        })
        .map_err(|e| IoError::csv(path, e))?;
    writer.flush().map_err(|e| IoError::io(path, e))
}

fn sorted_descending(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted
}

/// Writes `<prefix>_chronological.csv` (input order) and `<prefix>_sorted.csv`
/// (each column sorted descending, i.e. duration curves). Rows are indexed
/// from 1.
pub fn write_plot_data(prefix: &Path, original: &Profile, fitted: &Profile) -> Result<(), IoError> {
    check_len("fitted profile", fitted.len(), original.len())?;
    let (chronological, sorted) = plot_data_paths(prefix);
    write_indexed(&chronological, original.values(), fitted.values())?;
    write_indexed(
        &sorted,
        &sorted_descending(original.values()),
        &sorted_descending(fitted.values()),
    )
}
