//! Minimax strategies and game values.
//!
//! At an optimal weighting the predictor plays the margins clamped to
//! `[-1, 1]`; the adversary zeroes hedged examples, matches the margin
//! sign on clipped ones, and scales borderline examples by coefficients
//! `c_j in [0,1]` chosen so that the stationarity system
//!
//! ```text
//! n b - sum_{clipped+} x_j + sum_{clipped-} x_j
//!     = sum_{borderline} c_j x_j sgn(x_j^T sigma)
//! ```
//!
//! holds on the support of `sigma` (off-support coordinates may
//! overshoot, matching the complementary-slackness conditions of the
//! underlying LP). The residual of that system doubles as an optimality
//! check for the supplied weighting.

use crate::ensemble::{
    ensemble_predictions, partition, validate_inputs, CorrelationVector, LabelVector,
    MarginPartition, PredictionMatrix, WeightVector,
};
use crate::error::Error;
use crate::simplex::{self, Constraint, LinearProgram, LpStatus, Relation};
use crate::slack::NoiseProfile;
use crate::solver::{self, LpCertificate, SolverConfig};
use nalgebra::{DMatrix, DVector};

/// Full solution bundle for one game instance.
#[derive(Debug, Clone)]
pub struct GameSolution {
    pub sigma: WeightVector,
    /// Predictor strategy: margins clamped to `[-1, 1]`.
    pub g: LabelVector,
    /// Adversary strategy.
    pub z: LabelVector,
    /// Game value `V = -gamma(sigma)`.
    pub value: f64,
    pub partition: MarginPartition,
    /// Whether an optimal weighting lies in the Zero Box Region.
    pub zbr: bool,
    /// Borderline coefficients `c` (base game only; empty under noise).
    pub borderline_coeffs: Vec<f64>,
    /// L1 residual of the stationarity system at `sigma`; `None` for
    /// noise games, where the strategy comes from the adversary LP.
    pub eq7_residual: Option<f64>,
    pub certificate: Option<LpCertificate>,
    pub converged: bool,
    /// Simplex pivots (exact path) or subgradient iterations.
    pub iterations_used: usize,
}

/// The predictor's strategy at a weighting: `g_j = x_j^T sigma` while
/// the margin is inside the unit box, its sign once outside. The two
/// branches agree at `|margin| = 1`, so plain clamping needs no
/// tie-break.
pub fn predictor_strategy(
    f: &PredictionMatrix,
    sigma: &WeightVector,
) -> Result<LabelVector, Error> {
    let margins = ensemble_predictions(f, sigma)?;
    LabelVector::new(margins.iter().map(|m| m.clamp(-1.0, 1.0)).collect())
}

/// The adversary's strategy at (an approximately optimal) `sigma`,
/// together with the borderline coefficients and the achieved
/// stationarity residual.
#[derive(Debug, Clone)]
pub struct AdversaryStrategy {
    pub z: LabelVector,
    pub coeffs: Vec<f64>,
    /// Minimal L1 violation of the stationarity system; values above
    /// roughly `1e-6 * n` signal that `sigma` is not optimal to
    /// tolerance.
    pub residual: f64,
}

/// Recover the adversary's strategy from a weighting. The borderline
/// coefficients solve the stationarity system as a feasibility LP with
/// elastic violation variables (so an approximately optimal `sigma`
/// yields the minimal-residual coefficients rather than a hard error);
/// among exact solutions the minimum-norm one is returned.
pub fn adversary_strategy(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    sigma: &WeightVector,
    tau: f64,
) -> Result<AdversaryStrategy, Error> {
    validate_inputs(f, b)?;
    let p = f.p();
    let n = f.n();
    let part = partition(f, sigma, tau)?;

    // Right-hand side: n b minus the clipped contributions.
    let mut target: Vec<f64> = b.as_slice().iter().map(|bi| n as f64 * bi).collect();
    for &j in &part.clipped {
        let s = part.margins[j].signum();
        for (i, &v) in f.column(j).iter().enumerate() {
            target[i] -= s * v;
        }
    }

    // Stationarity is an equality only where sigma carries weight;
    // elsewhere the adversary may exceed the bound.
    let sigma_max = sigma.as_slice().iter().fold(0.0_f64, |a, &v| a.max(v));
    let support_tol = 1e-9 * sigma_max.max(1.0);
    let support: Vec<bool> = sigma.as_slice().iter().map(|&v| v > support_tol).collect();

    let nb = part.borderline.len();
    let coeff_matrix: Vec<Vec<f64>> = (0..p)
        .map(|i| {
            part.borderline
                .iter()
                .map(|&j| part.margins[j].signum() * f.entry(i, j))
                .collect()
        })
        .collect();

    let (coeffs, residual) = if nb == 0 {
        let residual = target
            .iter()
            .zip(&support)
            .map(|(&t, &s)| if s { t.abs() } else { t.max(0.0) })
            .sum::<f64>();
        (Vec::new(), residual)
    } else {
        solve_coefficients(&coeff_matrix, &target, &support)?
    };

    let mut z = vec![0.0; n];
    for &j in &part.clipped {
        z[j] = part.margins[j].signum();
    }
    for (k, &j) in part.borderline.iter().enumerate() {
        z[j] = coeffs[k] * part.margins[j].signum();
    }
    Ok(AdversaryStrategy {
        z: LabelVector::new(z)?,
        coeffs,
        residual,
    })
}

/// Minimal-L1-violation coefficients via an elastic LP, then a
/// minimum-norm refinement by Dykstra's alternating projections when
/// the system is exactly feasible.
fn solve_coefficients(
    m: &[Vec<f64>],
    target: &[f64],
    support: &[bool],
) -> Result<(Vec<f64>, f64), Error> {
    let p = target.len();
    let nb = m[0].len();
    let num_support = support.iter().filter(|s| **s).count();
    // variables: c (nb), shortfall e+ (p), overshoot e- (support rows)
    let nv = nb + p + num_support;
    let mut maximize = vec![0.0; nv];
    for v in maximize.iter_mut().skip(nb) {
        *v = -1.0;
    }
    let mut constraints = Vec::with_capacity(p + nb);
    let mut minus_idx = nb + p;
    for i in 0..p {
        let mut coeffs = vec![0.0; nv];
        coeffs[..nb].copy_from_slice(&m[i]);
        coeffs[nb + i] = 1.0;
        if support[i] {
            coeffs[minus_idx] = -1.0;
            minus_idx += 1;
            constraints.push(Constraint {
                coeffs,
                relation: Relation::Eq,
                rhs: target[i],
            });
        } else {
            constraints.push(Constraint {
                coeffs,
                relation: Relation::Ge,
                rhs: target[i],
            });
        }
    }
    for k in 0..nb {
        let mut coeffs = vec![0.0; nv];
        coeffs[k] = 1.0;
        constraints.push(Constraint {
            coeffs,
            relation: Relation::Le,
            rhs: 1.0,
        });
    }
    let sol = simplex::solve(&LinearProgram {
        maximize,
        constraints,
    })?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Infeasible(
            "elastic stationarity LP failed to solve".into(),
        ));
    }
    let residual = (-sol.value).max(0.0);
    let lp_coeffs: Vec<f64> = sol.x[..nb].iter().map(|v| v.clamp(0.0, 1.0)).collect();

    if residual <= 1e-9 * (p as f64).max(1.0) {
        if let Some(refined) = min_norm_coefficients(m, target, support) {
            let check = residual_of(m, target, support, &refined);
            if check <= residual + 1e-8 {
                return Ok((refined, check.max(residual)));
            }
        }
    }
    Ok((lp_coeffs, residual))
}

fn residual_of(m: &[Vec<f64>], target: &[f64], support: &[bool], c: &[f64]) -> f64 {
    m.iter()
        .zip(target)
        .zip(support)
        .map(|((row, &t), &s)| {
            let v: f64 = row.iter().zip(c).map(|(a, ci)| a * ci).sum();
            if s {
                (v - t).abs()
            } else {
                (t - v).max(0.0)
            }
        })
        .sum()
}

/// Projection of the origin onto
/// `{c in [0,1]^nb : M_S c = t_S, M_i c >= t_i off support}` by
/// Dykstra's algorithm; gives the minimum-norm coefficient vector.
/// Returns `None` when the iteration fails to close the residual.
fn min_norm_coefficients(m: &[Vec<f64>], target: &[f64], support: &[bool]) -> Option<Vec<f64>> {
    let p = target.len();
    let nb = m[0].len();
    let support_rows: Vec<usize> = (0..p).filter(|&i| support[i]).collect();
    let free_rows: Vec<usize> = (0..p).filter(|&i| !support[i]).collect();

    // Affine projection onto M_S c = t_S via the pseudoinverse.
    let ms = DMatrix::from_fn(support_rows.len(), nb, |r, c| m[support_rows[r]][c]);
    let ts = DVector::from_fn(support_rows.len(), |r, _| target[support_rows[r]]);
    let pinv = if support_rows.is_empty() {
        None
    } else {
        Some(ms.clone().svd(true, true).pseudo_inverse(1e-10).ok()?)
    };

    let num_sets = 1 + 1 + free_rows.len(); // affine, box, one per halfspace
    let mut c = DVector::zeros(nb);
    let mut corrections = vec![DVector::zeros(nb); num_sets];
    for _ in 0..5_000 {
        let before = c.clone();
        for (set, corr) in corrections.iter_mut().enumerate() {
            let y = &c + &*corr;
            let projected = match set {
                0 => match (&pinv, support_rows.is_empty()) {
                    (Some(pi), false) => &y - pi * (&ms * &y - &ts),
                    _ => y.clone(),
                },
                1 => y.map(|v| v.clamp(0.0, 1.0)),
                k => {
                    let i = free_rows[k - 2];
                    let row = DVector::from_fn(nb, |r, _| m[i][r]);
                    let norm_sq = row.dot(&row);
                    let gap = target[i] - row.dot(&y);
                    if gap > 0.0 && norm_sq > 0.0 {
                        &y + &row * (gap / norm_sq)
                    } else {
                        y.clone()
                    }
                }
            };
            *corr = &y - &projected;
            c = projected;
        }
        if (&c - &before).abs().max() < 1e-13 {
            break;
        }
    }
    let out: Vec<f64> = c.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    Some(out)
}

/// The game value `V = -min_sigma gamma(sigma)`, with the LP certificate
/// when the exact path was used.
pub fn game_value(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    config: &SolverConfig,
) -> Result<(f64, Option<LpCertificate>), Error> {
    let res = solver::minimize_slack(f, b, config, None)?;
    Ok((-res.objective, res.certificate))
}

/// Worst-case correlation guaranteed by playing a fixed prediction `g`:
/// `min { (1/n) z^T g : z in [-1,1]^n, (1/n) F z >= b }`, computed through
/// its dual `max_{sigma >= 0} b^T sigma - (1/n)||F^T sigma - g||_1`.
pub fn worst_case_correlation(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    g: &LabelVector,
    _config: &SolverConfig,
) -> Result<f64, Error> {
    validate_inputs(f, b)?;
    if g.len() != f.n() {
        return Err(Error::DimensionMismatch {
            context: "prediction vector",
            expected: f.n(),
            got: g.len(),
        });
    }
    let sol = simplex::solve(&solver::lp_worst_case(f, b, g.as_slice()))?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.value),
        LpStatus::Unbounded => Err(Error::Infeasible(
            "no labeling satisfies the correlation bounds".into(),
        )),
        LpStatus::Infeasible => Err(Error::Infeasible(
            "worst-case LP unexpectedly infeasible (numerical failure)".into(),
        )),
    }
}

/// Optimum of the box-constrained relaxation
/// `max b^T sigma` s.t. `|F^T sigma| <= 1^n`, `sigma >= 0`.
fn zbr_lp_value(f: &PredictionMatrix, b: &CorrelationVector) -> Result<f64, Error> {
    let mut constraints = Vec::with_capacity(2 * f.n());
    for j in 0..f.n() {
        let col = f.column(j).to_vec();
        constraints.push(Constraint {
            coeffs: col.clone(),
            relation: Relation::Le,
            rhs: 1.0,
        });
        constraints.push(Constraint {
            coeffs: col.iter().map(|v| -v).collect(),
            relation: Relation::Le,
            rhs: 1.0,
        });
    }
    let sol = simplex::solve(&LinearProgram {
        maximize: b.as_slice().to_vec(),
        constraints,
    })?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.value),
        _ => Err(Error::Infeasible(
            "box-constrained weighting LP is unbounded; some bounded classifier \
             never predicts, so its correlation bound cannot be met"
                .into(),
        )),
    }
}

/// Does the optimum lie in the Zero Box Region (no clipped examples)?
/// Compares the box-constrained LP value against the game value; the
/// box LP can never exceed the game value, and matches it exactly when
/// hedging alone is optimal.
pub fn zbr_check(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    config: &SolverConfig,
) -> Result<(bool, f64), Error> {
    validate_inputs(f, b)?;
    let (value, _) = game_value(f, b, config)?;
    let zbr_value = zbr_lp_value(f, b)?;
    Ok((zbr_value >= value - config.tolerance, zbr_value))
}

/// Value of the noise-restricted game (adversary confined to
/// `z_j in [-l_j, u_j]`): the maximum of the noise-weighted dual
/// objective, i.e. minus the minimal noisy slack.
pub fn noisy_game_value(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    noise: &NoiseProfile,
    config: &SolverConfig,
) -> Result<f64, Error> {
    let res = solver::minimize_slack(f, b, config, Some(noise))?;
    Ok(-res.objective)
}

/// Correlation and expected classification error of predictions `g`
/// against a labeling `z`: `corr = (1/n) z^T g`, `error = (1 - corr)/2`.
pub fn evaluate(g: &LabelVector, z_true: &LabelVector) -> Result<(f64, f64), Error> {
    if g.len() != z_true.len() {
        return Err(Error::DimensionMismatch {
            context: "evaluation labels",
            expected: g.len(),
            got: z_true.len(),
        });
    }
    let n = g.len() as f64;
    let corr = g
        .as_slice()
        .iter()
        .zip(z_true.as_slice())
        .fold(0.0, |acc, (gi, zi)| acc + gi * zi)
        / n;
    Ok((corr, (1.0 - corr) / 2.0))
}

/// Solve an instance end to end: optimal weighting, both strategies,
/// value, partition and diagnostics. Under a noise profile the
/// adversary's labeling comes from the noise-box LP rather than the
/// stationarity system.
pub fn solve_game(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    config: &SolverConfig,
    noise: Option<&NoiseProfile>,
) -> Result<GameSolution, Error> {
    let res = solver::minimize_slack(f, b, config, noise)?;
    let part = partition(f, &res.sigma, config.tau)?;
    let g = predictor_strategy(f, &res.sigma)?;
    let value = -res.objective;

    let (z, coeffs, residual, zbr) = match noise {
        None => {
            let adv = adversary_strategy(f, b, &res.sigma, config.tau)?;
            let zbr_value = zbr_lp_value(f, b)?;
            (
                adv.z,
                adv.coeffs,
                Some(adv.residual),
                zbr_value >= value - config.tolerance,
            )
        }
        Some(np) => {
            let z = match &res.certificate {
                Some(cert) if cert.status == LpStatus::Optimal => cert.primal_z.clone(),
                _ => {
                    let cert = solver::adversary_certificate(f, b, Some(np))?;
                    if cert.status != LpStatus::Optimal {
                        return Err(Error::Infeasible(
                            "bounds unattainable inside the noise box".into(),
                        ));
                    }
                    cert.primal_z
                }
            };
            (z, Vec::new(), None, part.clipped.is_empty())
        }
    };

    Ok(GameSolution {
        sigma: res.sigma,
        g,
        z,
        value,
        partition: part,
        zbr,
        borderline_coeffs: coeffs,
        eq7_residual: residual,
        certificate: res.certificate,
        converged: res.converged,
        iterations_used: res.iterations_used,
    })
}
