//! Estimating the correlation vector from labeled data.
//!
//! Empirical training correlations are shrunk by two uniform-convergence
//! penalties so that, with probability at least `1 - delta`, every
//! shrunken value lower-bounds the corresponding test correlation:
//!
//! ```text
//! eps_S = sqrt( ln(2p/delta) / (2m) )     (training deviation)
//! eps_U = sqrt( ln(2p/delta) / (2n) )     (test deviation)
//! b_i   = corr_S(h_i) - eps_S - eps_U
//! ```
//!
//! The failure probability `delta` is split evenly across the `2p`
//! one-sided deviation events.

use crate::ensemble::{CorrelationVector, LabelVector, PredictionMatrix};
use crate::error::Error;

/// A labeled sample: classifier outputs on `m` training points plus
/// their true labels (exactly +-1).
#[derive(Debug, Clone)]
pub struct LabeledSet {
    predictions: PredictionMatrix,
    labels: Vec<f64>,
}

impl LabeledSet {
    pub fn new(predictions: PredictionMatrix, labels: Vec<f64>) -> Result<Self, Error> {
        if labels.len() != predictions.n() {
            return Err(Error::DimensionMismatch {
                context: "training labels",
                expected: predictions.n(),
                got: labels.len(),
            });
        }
        for (i, &y) in labels.iter().enumerate() {
            if y != 1.0 && y != -1.0 {
                return Err(Error::ValueOutOfRange {
                    context: "training label",
                    index: i,
                    value: y,
                    lo: -1.0,
                    hi: 1.0,
                });
            }
        }
        Ok(Self {
            predictions,
            labels,
        })
    }

    pub fn p(&self) -> usize {
        self.predictions.p()
    }

    pub fn m(&self) -> usize {
        self.predictions.n()
    }

    pub fn predictions(&self) -> &PredictionMatrix {
        &self.predictions
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }
}

/// Parameters for the bound computation.
#[derive(Debug, Clone)]
pub struct BoundConfig {
    /// Allowed failure probability, in (0, 1).
    pub delta: f64,
    /// Size of the unlabeled test set the bounds will be used against.
    pub n: usize,
    /// Floor negative estimates at zero so the result is a valid
    /// correlation vector; disable only when the raw values are known
    /// to stay nonnegative.
    pub clamp_negative: bool,
}

impl BoundConfig {
    pub fn new(delta: f64, n: usize) -> Result<Self, Error> {
        if !(0.0 < delta && delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must be in (0,1), got {delta}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        Ok(Self {
            delta,
            n,
            clamp_negative: true,
        })
    }
}

/// The estimate together with the penalties that produced it. `raw`
/// keeps the pre-clamp values for diagnostics and coverage checks.
#[derive(Debug, Clone)]
pub struct BoundEstimate {
    pub b: CorrelationVector,
    pub raw: Vec<f64>,
    pub eps_s: f64,
    pub eps_u: f64,
}

/// Empirical correlation of each classifier with the training labels,
/// `corr_S(h_i) = (1/m) sum_k h_i(x'_k) y'_k`.
pub fn train_correlations(s: &LabeledSet) -> Vec<f64> {
    let m = s.m() as f64;
    (0..s.p())
        .map(|i| {
            s.predictions()
                .row(i)
                .iter()
                .zip(s.labels())
                .fold(0.0, |acc, (h, y)| acc + h * y)
                / m
        })
        .collect()
}

/// The two uniform-convergence penalties `(eps_S, eps_U)`.
pub fn penalties(p: usize, m: usize, n: usize, delta: f64) -> Result<(f64, f64), Error> {
    if p == 0 || m == 0 || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "need p, m, n >= 1, got p={p}, m={m}, n={n}"
        )));
    }
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be in (0,1), got {delta}"
        )));
    }
    let log_term = (2.0 * p as f64 / delta).ln();
    Ok((
        (log_term / (2.0 * m as f64)).sqrt(),
        (log_term / (2.0 * n as f64)).sqrt(),
    ))
}

/// Estimate the correlation vector: `b_i = corr_S(h_i) - eps_S - eps_U`,
/// floored at zero when `clamp_negative` is set.
pub fn estimate_b(s: &LabeledSet, config: &BoundConfig) -> Result<BoundEstimate, Error> {
    let (eps_s, eps_u) = penalties(s.p(), s.m(), config.n, config.delta)?;
    let raw: Vec<f64> = train_correlations(s)
        .iter()
        .map(|c| c - eps_s - eps_u)
        .collect();
    let clamped: Vec<f64> = if config.clamp_negative {
        raw.iter().map(|v| v.max(0.0)).collect()
    } else {
        raw.clone()
    };
    Ok(BoundEstimate {
        b: CorrelationVector::new(clamped)?,
        raw,
        eps_s,
        eps_u,
    })
}

/// Test correlations `corr_U(h_i) = (1/n) sum_j h_i(x_j) z_j` of every
/// classifier against a labeling of the test set.
pub fn test_correlations(f: &PredictionMatrix, z: &LabelVector) -> Result<Vec<f64>, Error> {
    if z.len() != f.n() {
        return Err(Error::DimensionMismatch {
            context: "test labels",
            expected: f.n(),
            got: z.len(),
        });
    }
    let n = f.n() as f64;
    Ok((0..f.p())
        .map(|i| {
            f.row(i)
                .iter()
                .zip(z.as_slice())
                .fold(0.0, |acc, (h, zj)| acc + h * zj)
                / n
        })
        .collect())
}
