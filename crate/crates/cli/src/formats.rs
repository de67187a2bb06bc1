//! File formats: CSV matrices (one classifier per row, optional
//! `# p=<p> n=<n>` header), JSON number arrays for vectors, and a JSON
//! noise profile that is either a flat array (symmetric) or an object
//! with `lower`/`upper` arrays.

use ensemble_minimax::bounds::LabeledSet;
use ensemble_minimax::slack::NoiseProfile;
use ensemble_minimax::{CorrelationVector, LabelVector, PredictionMatrix};
use serde::Deserialize;
use std::fmt;
use std::fs;
use std::path::Path;

/// Input-layer error; everything here maps to exit code 1.
#[derive(Debug)]
pub enum InputError {
    Io(String, std::io::Error),
    /// Parse failure with 1-based line/column diagnostics.
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    Json(String, serde_json::Error),
    Domain(ensemble_minimax::Error),
    Invalid(String),
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputError::Io(path, e) => write!(f, "{path}: {e}"),
            InputError::Parse {
                path,
                line,
                column,
                message,
            } => write!(f, "{path}: line {line}, column {column}: {message}"),
            InputError::Json(path, e) => write!(f, "{path}: {e}"),
            InputError::Domain(e) => write!(f, "{e}"),
            InputError::Invalid(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<ensemble_minimax::Error> for InputError {
    fn from(e: ensemble_minimax::Error) -> Self {
        InputError::Domain(e)
    }
}

fn read_to_string(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError::Io(path.display().to_string(), e))
}

/// Rows of comma-separated floats; `#`-prefixed lines and blank lines
/// are skipped (the optional header is only checked for consistency).
pub fn read_csv_rows(path: &Path) -> Result<Vec<Vec<f64>>, InputError> {
    let text = read_to_string(path)?;
    let name = path.display().to_string();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut declared: Option<(usize, usize)> = None;
    for (line_no, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if declared.is_none() {
                declared = parse_header(rest);
            }
            continue;
        }
        let mut row = Vec::new();
        for (col_no, field) in trimmed.split(',').enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| InputError::Parse {
                path: name.clone(),
                line: line_no + 1,
                column: col_no + 1,
                message: format!("invalid number {:?}", field.trim()),
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(InputError::Parse {
            path: name,
            line: 1,
            column: 1,
            message: "no data rows".into(),
        });
    }
    if let Some((p, n)) = declared {
        if rows.len() != p || rows[0].len() != n {
            return Err(InputError::Parse {
                path: name,
                line: 1,
                column: 1,
                message: format!(
                    "header says p={p} n={n} but found {} rows of {}",
                    rows.len(),
                    rows[0].len()
                ),
            });
        }
    }
    Ok(rows)
}

fn parse_header(rest: &str) -> Option<(usize, usize)> {
    let mut p = None;
    let mut n = None;
    for token in rest.split_whitespace() {
        if let Some(v) = token.strip_prefix("p=") {
            p = v.parse().ok();
        } else if let Some(v) = token.strip_prefix("n=") {
            n = v.parse().ok();
        }
    }
    Some((p?, n?))
}

pub fn read_matrix(path: &Path) -> Result<PredictionMatrix, InputError> {
    Ok(PredictionMatrix::from_rows(&read_csv_rows(path)?)?)
}

/// Labeled CSV: a prediction matrix whose final row holds the +-1
/// training labels.
pub fn read_labeled(path: &Path) -> Result<LabeledSet, InputError> {
    let mut rows = read_csv_rows(path)?;
    if rows.len() < 2 {
        return Err(InputError::Invalid(format!(
            "{}: labeled file needs at least one classifier row plus the label row",
            path.display()
        )));
    }
    let labels = rows.pop().expect("nonempty");
    Ok(LabeledSet::new(PredictionMatrix::from_rows(&rows)?, labels)?)
}

pub fn write_matrix(path: &Path, rows: &[Vec<f64>]) -> Result<(), InputError> {
    let mut out = format!("# p={} n={}\n", rows.len(), rows[0].len());
    for row in rows {
        let fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| InputError::Io(path.display().to_string(), e))
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>, InputError> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| InputError::Json(path.display().to_string(), e))
}

pub fn read_bounds(path: &Path) -> Result<CorrelationVector, InputError> {
    Ok(CorrelationVector::new(read_vector(path)?)?)
}

pub fn read_labels(path: &Path) -> Result<LabelVector, InputError> {
    Ok(LabelVector::new(read_vector(path)?)?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NoiseFile {
    Symmetric(Vec<f64>),
    Asymmetric { lower: Vec<f64>, upper: Vec<f64> },
}

pub fn read_noise(path: &Path) -> Result<NoiseProfile, InputError> {
    let text = read_to_string(path)?;
    let parsed: NoiseFile =
        serde_json::from_str(&text).map_err(|e| InputError::Json(path.display().to_string(), e))?;
    Ok(match parsed {
        NoiseFile::Symmetric(alpha) => NoiseProfile::symmetric(alpha)?,
        NoiseFile::Asymmetric { lower, upper } => NoiseProfile::new(lower, upper)?,
    })
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), InputError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| InputError::Json(path.display().to_string(), e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| InputError::Io(path.display().to_string(), e))
}
