//! The prediction slack function, its label-noise generalizations, and
//! subgradients.
//!
//! The slack function at a weighting `sigma` is
//!
//! ```text
//! gamma(sigma) = (1/n) sum_j [ |x_j^T sigma| - 1 ]_+  -  b^T sigma
//! ```
//!
//! It is convex and piecewise linear; its negated minimum is the game
//! value. The noise-generalized variant weights the upper clipping
//! penalty of example `j` by `u_j` and the lower one by `l_j`, which
//! restricts the adversary to `z_j in [-l_j, u_j]`.

use crate::ensemble::{ensemble_predictions, CorrelationVector, PredictionMatrix, WeightVector};
use crate::error::Error;

/// Per-example adversary bounds `z_j in [-l_j, u_j]`, both sides in
/// `[0, 1]`. The symmetric case `l = u = alpha` models independent label
/// noise at level `1 - alpha_j`; `l = u = 1` recovers the base game.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseProfile {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl NoiseProfile {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, Error> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                context: "noise profile",
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for (i, &v) in lower.iter().chain(upper.iter()).enumerate() {
            if !(0.0..=1.0).contains(&v) || v.is_nan() {
                return Err(Error::ValueOutOfRange {
                    context: "noise bound",
                    index: i % lower.len().max(1),
                    value: v,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
        }
        Ok(Self { lower, upper })
    }

    /// Symmetric profile `l = u = alpha`.
    pub fn symmetric(alpha: Vec<f64>) -> Result<Self, Error> {
        Self::new(alpha.clone(), alpha)
    }

    /// The unrestricted adversary `l = u = 1^n` (no noise assumption).
    pub fn unrestricted(n: usize) -> Self {
        Self {
            lower: vec![1.0; n],
            upper: vec![1.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }
}

/// A slack-function evaluation: the value and the per-example clipping
/// penalties whose mean it contains.
#[derive(Debug, Clone, PartialEq)]
pub struct SlackValue {
    pub value: f64,
    pub per_example_penalty: Vec<f64>,
}

fn check_dims(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    sigma: &WeightVector,
) -> Result<(), Error> {
    if b.len() != f.p() {
        return Err(Error::DimensionMismatch {
            context: "correlation vector",
            expected: f.p(),
            got: b.len(),
        });
    }
    if sigma.len() != f.p() {
        return Err(Error::DimensionMismatch {
            context: "weight vector",
            expected: f.p(),
            got: sigma.len(),
        });
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc + x * y)
}

fn finish(penalties: Vec<f64>, b: &CorrelationVector, sigma: &WeightVector, kahan: bool) -> SlackValue {
    let n = penalties.len() as f64;
    let total = if kahan {
        kahan_sum(&penalties)
    } else {
        penalties.iter().sum::<f64>()
    };
    let value = total / n - dot(b.as_slice(), sigma.as_slice());
    SlackValue {
        value,
        per_example_penalty: penalties,
    }
}

/// Compensated summation in fixed index order; only worth switching on
/// for very large `n`.
fn kahan_sum(xs: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for &x in xs {
        let y = x - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Evaluate the slack function `gamma(sigma)`.
pub fn slack(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    sigma: &WeightVector,
) -> Result<SlackValue, Error> {
    slack_opts(f, b, sigma, false)
}

/// As [`slack`], with optional compensated summation of the penalty term.
pub fn slack_opts(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    sigma: &WeightVector,
    compensated: bool,
) -> Result<SlackValue, Error> {
    check_dims(f, b, sigma)?;
    let margins = ensemble_predictions(f, sigma)?;
    let penalties: Vec<f64> = margins.iter().map(|m| (m.abs() - 1.0).max(0.0)).collect();
    Ok(finish(penalties, b, sigma, compensated))
}

/// Evaluate the noise-generalized slack
/// `(1/n) sum_j ( u_j [x_j^T sigma - 1]_+ + l_j [-x_j^T sigma - 1]_+ ) - b^T sigma`.
///
/// With `l = u = 1^n` this reduces exactly to [`slack`].
pub fn noisy_slack(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    sigma: &WeightVector,
    noise: &NoiseProfile,
) -> Result<SlackValue, Error> {
    check_dims(f, b, sigma)?;
    if noise.len() != f.n() {
        return Err(Error::DimensionMismatch {
            context: "noise profile",
            expected: f.n(),
            got: noise.len(),
        });
    }
    let margins = ensemble_predictions(f, sigma)?;
    let penalties: Vec<f64> = margins
        .iter()
        .enumerate()
        .map(|(j, &m)| {
            noise.upper()[j] * (m - 1.0).max(0.0) + noise.lower()[j] * (-m - 1.0).max(0.0)
        })
        .collect();
    Ok(finish(penalties, b, sigma, false))
}

/// An element of the subdifferential of the slack function at `sigma`:
///
/// ```text
/// (1/n) ( sum_{j in C} x_j sgn(x_j^T sigma)
///       + sum_{j in B} c_j x_j sgn(x_j^T sigma) ) - b,   c_j in [0,1]
/// ```
///
/// The hedged set contributes nothing. `coeffs`, when given, supplies the
/// borderline coefficients `c_j` in borderline-index order; the default
/// is the midpoint 0.5 for every borderline example.
pub fn subgradient(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    sigma: &WeightVector,
    tau: f64,
    coeffs: Option<&[f64]>,
) -> Result<Vec<f64>, Error> {
    let unrestricted = NoiseProfile::unrestricted(f.n());
    noisy_subgradient(f, b, sigma, &unrestricted, tau, coeffs)
}

/// Subgradient of [`noisy_slack`]: clipped example `j` contributes
/// `u_j x_j` when its margin exceeds 1 and `-l_j x_j` when it is below
/// -1; borderline contributions carry the same weights scaled by `c_j`.
pub fn noisy_subgradient(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    sigma: &WeightVector,
    noise: &NoiseProfile,
    tau: f64,
    coeffs: Option<&[f64]>,
) -> Result<Vec<f64>, Error> {
    check_dims(f, b, sigma)?;
    if noise.len() != f.n() {
        return Err(Error::DimensionMismatch {
            context: "noise profile",
            expected: f.n(),
            got: noise.len(),
        });
    }
    let part = crate::ensemble::partition(f, sigma, tau)?;
    if let Some(c) = coeffs {
        if c.len() != part.borderline.len() {
            return Err(Error::DimensionMismatch {
                context: "borderline coefficients",
                expected: part.borderline.len(),
                got: c.len(),
            });
        }
        for (k, &v) in c.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) || v.is_nan() {
                return Err(Error::ValueOutOfRange {
                    context: "borderline coefficient",
                    index: k,
                    value: v,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
        }
    }

    let p = f.p();
    let nf = f.n() as f64;
    let mut g = vec![0.0; p];
    let mut add_scaled = |j: usize, scale: f64| {
        let col = f.column(j);
        for i in 0..p {
            g[i] += scale * col[i];
        }
    };
    for &j in &part.clipped {
        let m = part.margins[j];
        let w = if m > 0.0 {
            noise.upper()[j]
        } else {
            noise.lower()[j]
        };
        add_scaled(j, w * m.signum());
    }
    for (k, &j) in part.borderline.iter().enumerate() {
        let m = part.margins[j];
        let c = coeffs.map_or(0.5, |c| c[k]);
        let w = if m > 0.0 {
            noise.upper()[j]
        } else {
            noise.lower()[j]
        };
        add_scaled(j, c * w * m.signum());
    }
    Ok(g.iter()
        .zip(b.as_slice())
        .map(|(gi, bi)| gi / nf - bi)
        .collect())
}
