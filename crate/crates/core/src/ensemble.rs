//! Core data types and the margin partition.
//!
//! Everything downstream sees the ensemble only through the realized
//! prediction matrix `F` (one row per classifier, one column per test
//! example). All types validate their invariants at construction and are
//! immutable afterwards, so they can be shared freely across threads.

use crate::error::Error;

/// Default tolerance for deciding that a margin sits exactly on the
/// `|x^T sigma| = 1` boundary.
pub const DEFAULT_BORDERLINE_TOL: f64 = 1e-7;

/// The `p x n` matrix of ensemble predictions on the unlabeled test
/// points, entries in `[-1, 1]`. Fractional entries are treated as
/// deterministic reals (expected values of randomized predictions are
/// never re-sampled).
///
/// Stored dense and column-major: every algorithm here iterates
/// per-example over the prediction columns `x_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionMatrix {
    data: Vec<f64>, // column-major: entry (i, j) at data[j * p + i]
    p: usize,
    n: usize,
}

impl PredictionMatrix {
    /// Build from classifier rows. Fails on ragged rows, empty input, or
    /// entries outside `[-1, 1]` (reported by row/column).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, Error> {
        let p = rows.len();
        if p == 0 {
            return Err(Error::Empty("prediction matrix (no classifier rows)"));
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(Error::Empty("prediction matrix (no example columns)"));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "prediction matrix row",
                    expected: n,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if !(-1.0..=1.0).contains(&v) || v.is_nan() {
                    return Err(Error::EntryOutOfRange {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
        }
        let mut data = vec![0.0; p * n];
        for j in 0..n {
            for (i, row) in rows.iter().enumerate() {
                data[j * p + i] = row[j];
            }
        }
        Ok(Self { data, p, n })
    }

    /// Number of classifiers.
    pub fn p(&self) -> usize {
        self.p
    }

    /// Number of unlabeled examples.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.p + i]
    }

    /// The prediction column `x_j` (all classifiers on example `j`).
    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.p..(j + 1) * self.p]
    }

    /// Copy of classifier row `i` (strided in the column-major layout).
    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.n).map(|j| self.entry(i, j)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.p).map(|i| self.row(i)).collect()
    }
}

/// Per-classifier lower bounds on test correlation, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationVector {
    values: Vec<f64>,
}

impl CorrelationVector {
    pub fn new(values: Vec<f64>) -> Result<Self, Error> {
        for (i, &v) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) || v.is_nan() {
                return Err(Error::ValueOutOfRange {
                    context: "correlation bound",
                    index: i,
                    value: v,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

/// A nonnegative weighting over the `p` classifiers (not necessarily a
/// distribution); the optimization variable of the whole crate.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self, Error> {
        for (i, &w) in weights.iter().enumerate() {
            if w < 0.0 || w.is_nan() {
                return Err(Error::ValueOutOfRange {
                    context: "weight",
                    index: i,
                    value: w,
                    lo: 0.0,
                    hi: f64::INFINITY,
                });
            }
        }
        Ok(Self { weights })
    }

    pub fn zeros(p: usize) -> Self {
        Self {
            weights: vec![0.0; p],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn l1_norm(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Randomized labels in `[-1, 1]^n`; used both for the adversary's `z`
/// and the predictor's `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelVector {
    labels: Vec<f64>,
}

impl LabelVector {
    pub fn new(labels: Vec<f64>) -> Result<Self, Error> {
        for (i, &v) in labels.iter().enumerate() {
            if !(-1.0..=1.0).contains(&v) || v.is_nan() {
                return Err(Error::ValueOutOfRange {
                    context: "label",
                    index: i,
                    value: v,
                    lo: -1.0,
                    hi: 1.0,
                });
            }
        }
        Ok(Self { labels })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            labels: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.labels
    }
}

/// Which of the three margin regimes an example falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionClass {
    Hedged,
    Clipped,
    Borderline,
}

/// Partition of the examples by margin at a given weighting: the hedged
/// set (`|x^T sigma| < 1`), the clipped set (`> 1`) and the borderline
/// set (`= 1` up to the tolerance).
#[derive(Debug, Clone, PartialEq)]
pub struct MarginPartition {
    pub hedged: Vec<usize>,
    pub clipped: Vec<usize>,
    pub borderline: Vec<usize>,
    pub margins: Vec<f64>,
    pub tolerance: f64,
}

impl MarginPartition {
    pub fn class_of(&self, j: usize) -> PartitionClass {
        let m = self.margins[j].abs();
        if m < 1.0 - self.tolerance {
            PartitionClass::Hedged
        } else if m > 1.0 + self.tolerance {
            PartitionClass::Clipped
        } else {
            PartitionClass::Borderline
        }
    }
}

/// Check that `(f, b)` form a valid instance: all type invariants hold
/// and `b` has one bound per classifier.
pub fn validate_inputs(f: &PredictionMatrix, b: &CorrelationVector) -> Result<(), Error> {
    for i in 0..f.p() {
        for j in 0..f.n() {
            let v = f.entry(i, j);
            if !(-1.0..=1.0).contains(&v) || v.is_nan() {
                return Err(Error::EntryOutOfRange {
                    row: i,
                    col: j,
                    value: v,
                });
            }
        }
    }
    for (i, &v) in b.as_slice().iter().enumerate() {
        if !(0.0..=1.0).contains(&v) || v.is_nan() {
            return Err(Error::ValueOutOfRange {
                context: "correlation bound",
                index: i,
                value: v,
                lo: 0.0,
                hi: 1.0,
            });
        }
    }
    if b.len() != f.p() {
        return Err(Error::DimensionMismatch {
            context: "correlation vector",
            expected: f.p(),
            got: b.len(),
        });
    }
    Ok(())
}

/// The ensemble predictions `F^T sigma = (x_1^T sigma, ..., x_n^T sigma)`,
/// whose magnitudes are the margins.
///
/// Summation runs in ascending classifier index so results are bitwise
/// reproducible.
pub fn ensemble_predictions(f: &PredictionMatrix, sigma: &WeightVector) -> Result<Vec<f64>, Error> {
    if sigma.len() != f.p() {
        return Err(Error::DimensionMismatch {
            context: "weight vector",
            expected: f.p(),
            got: sigma.len(),
        });
    }
    let w = sigma.as_slice();
    Ok((0..f.n())
        .map(|j| {
            f.column(j)
                .iter()
                .zip(w)
                .fold(0.0, |acc, (x, s)| acc + x * s)
        })
        .collect())
}

/// Partition the examples into hedged / clipped / borderline sets at the
/// given weighting, with borderline tolerance `tau`.
pub fn partition(
    f: &PredictionMatrix,
    sigma: &WeightVector,
    tau: f64,
) -> Result<MarginPartition, Error> {
    if tau <= 0.0 || tau.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "borderline tolerance must be positive, got {tau}"
        )));
    }
    let margins = ensemble_predictions(f, sigma)?;
    let mut hedged = Vec::new();
    let mut clipped = Vec::new();
    let mut borderline = Vec::new();
    for (j, &m) in margins.iter().enumerate() {
        let a = m.abs();
        if a < 1.0 - tau {
            hedged.push(j);
        } else if a > 1.0 + tau {
            clipped.push(j);
        } else {
            borderline.push(j);
        }
    }
    Ok(MarginPartition {
        hedged,
        clipped,
        borderline,
        margins,
        tolerance: tau,
    })
}
