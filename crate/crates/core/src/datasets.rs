//! Deterministic instance generators and baseline aggregators.
//!
//! The generators cover the worked toy scenarios (two intro cases, the
//! cyclic construction, the two-bloc table) plus a seeded random
//! ensemble; every generated instance is feasible by construction, i.e.
//! `(1/n) F z_true >= b` componentwise.

use crate::ensemble::{CorrelationVector, LabelVector, PredictionMatrix};
use crate::error::Error;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A bundled instance: predictions, bounds, the labeling used to build
/// them, and the game value the instance is known to have (when known).
#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub f: PredictionMatrix,
    pub b: CorrelationVector,
    pub z_true: LabelVector,
    pub description: String,
    pub expected_value: Option<f64>,
}

/// The two intro scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntroCase {
    /// Diverse ensemble: every example has two correct votes out of
    /// three; weighting everything equally removes all errors.
    A,
    /// Redundant ensemble: three identical classifiers; nothing beats a
    /// single rule.
    B,
}

/// p = n = 3, b = (1/3, 1/3, 1/3), true labels all +1.
pub fn gen_intro_case(which: IntroCase) -> GeneratedInstance {
    let third = 1.0 / 3.0;
    let (rows, expected, desc) = match which {
        IntroCase::A => (
            vec![
                vec![1.0, 1.0, -1.0],
                vec![1.0, -1.0, 1.0],
                vec![-1.0, 1.0, 1.0],
            ],
            1.0,
            "intro case A: three classifiers, each example has exactly two +1 votes",
        ),
        IntroCase::B => (
            vec![
                vec![1.0, 1.0, -1.0],
                vec![1.0, 1.0, -1.0],
                vec![1.0, 1.0, -1.0],
            ],
            third,
            "intro case B: three identical classifiers",
        ),
    };
    GeneratedInstance {
        f: PredictionMatrix::from_rows(&rows).expect("intro matrix is valid"),
        b: CorrelationVector::new(vec![third; 3]).expect("intro bounds are valid"),
        z_true: LabelVector::new(vec![1.0; 3]).expect("intro labels are valid"),
        description: desc.to_string(),
        expected_value: Some(expected),
    }
}

/// Cyclic construction with `p` odd and `n = p`: before flips,
/// `F_ij = +1` iff `(i + j) mod p` is even, which puts `(p+1)/2` ones in
/// every row and column (row and column sums are all 1). Columns in
/// `flip_set` are then inverted and their true label set to -1.
///
/// Every classifier has test correlation exactly `1/p`, so
/// `b = (1/p) 1^p`; the solved game value is 1.
pub fn gen_cyclic(p: usize, flip_set: &[usize]) -> Result<GeneratedInstance, Error> {
    if p == 0 || p % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "cyclic construction needs odd p, got {p}"
        )));
    }
    for &j in flip_set {
        if j >= p {
            return Err(Error::InvalidParameter(format!(
                "flip index {j} out of range for n = {p}"
            )));
        }
    }
    let mut rows = vec![vec![0.0; p]; p];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = if (i + j) % p % 2 == 0 { 1.0 } else { -1.0 };
        }
    }
    let mut z = vec![1.0; p];
    for &j in flip_set {
        z[j] = -1.0;
        for row in rows.iter_mut() {
            row[j] = -row[j];
        }
    }
    Ok(GeneratedInstance {
        f: PredictionMatrix::from_rows(&rows)?,
        b: CorrelationVector::new(vec![1.0 / p as f64; p])?,
        z_true: LabelVector::new(z)?,
        description: format!("cyclic instance, p = n = {p}, {} flipped columns", flip_set.len()),
        expected_value: Some(1.0),
    })
}

/// The two-bloc example: six classifiers (a diverse A bloc and a
/// redundant, individually stronger B bloc) on six examples, all truly
/// labeled +1. The B bloc is wrong on the last example, so every vote
/// that includes it errs there, while a vote over the A bloc alone is
/// perfect; the solved game value is 1.
pub fn gen_table1() -> GeneratedInstance {
    let rows = vec![
        vec![-1.0, -1.0, 1.0, 1.0, 1.0, 1.0],
        vec![1.0, 1.0, -1.0, -1.0, 1.0, 1.0],
        vec![1.0, 1.0, 1.0, 1.0, -1.0, -1.0],
        vec![1.0, 1.0, 1.0, 1.0, 1.0, -1.0],
        vec![1.0, 1.0, 1.0, 1.0, 1.0, -1.0],
        vec![1.0, 1.0, 1.0, 1.0, 1.0, -1.0],
    ];
    let third = 1.0 / 3.0;
    let two_thirds = 2.0 / 3.0;
    GeneratedInstance {
        f: PredictionMatrix::from_rows(&rows).expect("bloc matrix is valid"),
        b: CorrelationVector::new(vec![third, third, third, two_thirds, two_thirds, two_thirds])
            .expect("bloc bounds are valid"),
        z_true: LabelVector::new(vec![1.0; 6]).expect("bloc labels are valid"),
        description: "two classifier blocs on six examples".to_string(),
        expected_value: Some(1.0),
    }
}

/// Seeded random ensemble: `z_true` uniform in `{-1, +1}^n`, row `i`
/// agrees with it independently with probability `accuracies[i]`, and
/// `b` is set to the realized test correlations minus `safety_margin`,
/// floored at 0 — so the instance is feasible by construction.
///
/// A row whose realized correlation comes out negative (possible for
/// accuracies near 1/2 at small `n`) is inverted, the usual convention
/// for a classifier worse than chance; without this the zero floor on
/// `b` would make `z_true` infeasible.
pub fn gen_random(
    p: usize,
    n: usize,
    accuracies: &[f64],
    seed: u64,
    safety_margin: f64,
) -> Result<GeneratedInstance, Error> {
    if p == 0 || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "need p >= 1 and n >= 1, got p={p}, n={n}"
        )));
    }
    if accuracies.len() != p {
        return Err(Error::DimensionMismatch {
            context: "accuracies",
            expected: p,
            got: accuracies.len(),
        });
    }
    for (i, &a) in accuracies.iter().enumerate() {
        if !(0.0 < a && a <= 1.0) {
            return Err(Error::ValueOutOfRange {
                context: "accuracy",
                index: i,
                value: a,
                lo: 0.0,
                hi: 1.0,
            });
        }
    }
    if !(0.0..=1.0).contains(&safety_margin) {
        return Err(Error::InvalidParameter(format!(
            "safety margin must be in [0,1], got {safety_margin}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z: Vec<f64> = (0..n)
        .map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
        .collect();
    let mut rows = vec![vec![0.0; n]; p];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let agree = rng.gen::<f64>() < accuracies[i];
            *v = if agree { z[j] } else { -z[j] };
        }
        if row.iter().zip(&z).map(|(h, zj)| h * zj).sum::<f64>() < 0.0 {
            row.iter_mut().for_each(|v| *v = -*v);
        }
    }
    let f = PredictionMatrix::from_rows(&rows)?;
    let z_true = LabelVector::new(z)?;
    let corr = crate::bounds::test_correlations(&f, &z_true)?;
    let b = CorrelationVector::new(
        corr.iter()
            .map(|c| (c - safety_margin).clamp(0.0, 1.0))
            .collect(),
    )?;
    Ok(GeneratedInstance {
        f,
        b,
        z_true,
        description: format!("random ensemble, p={p}, n={n}, seed={seed}"),
        expected_value: None,
    })
}

/// The classifier with the best error guarantee: the row of `F` at the
/// largest `b_i`, ties broken by lowest index. Optimal when `F` itself
/// is unknown.
pub fn baseline_erm(f: &PredictionMatrix, b: &CorrelationVector) -> Result<LabelVector, Error> {
    if b.len() != f.p() {
        return Err(Error::DimensionMismatch {
            context: "correlation vector",
            expected: f.p(),
            got: b.len(),
        });
    }
    let mut best = 0;
    for (i, &v) in b.as_slice().iter().enumerate() {
        if v > b.as_slice()[best] {
            best = i;
        }
    }
    LabelVector::new(f.row(best))
}

/// Unweighted majority vote over a subset of classifiers; a zero vote
/// sum breaks to +1.
pub fn baseline_majority(f: &PredictionMatrix, subset: &[usize]) -> Result<LabelVector, Error> {
    if subset.is_empty() {
        return Err(Error::Empty("majority-vote subset"));
    }
    for &i in subset {
        if i >= f.p() {
            return Err(Error::InvalidParameter(format!(
                "classifier index {i} out of range for p = {}",
                f.p()
            )));
        }
    }
    let labels = (0..f.n())
        .map(|j| {
            let s: f64 = subset.iter().map(|&i| f.entry(i, j)).sum();
            if s >= 0.0 {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    LabelVector::new(labels)
}
