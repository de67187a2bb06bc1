//! Minimizing the slack function.
//!
//! Two solution paths:
//!
//! * **Exact LP.** The maximization `max_{sigma >= 0} b^T sigma -
//!   (1/n) sum_j penalty_j` is linearized with one pair of epigraph
//!   variables per example and handed to the dense simplex. Since
//!   typically `p << n`, this dual-side LP stays small. The adversary's
//!   own LP (`min (1/n)||z||_1` over the constraint polytope, split into
//!   positive and negative parts) is solved alongside it to produce a
//!   primal/dual certificate and the adversary's labeling.
//! * **Projected subgradient descent**, deterministic or stochastic,
//!   with `sigma` projected back onto the nonnegative orthant after
//!   every step. Constant memory, no certificate.
//!
//! A brute-force oracle for tiny instances enumerates every vertex of
//! the piecewise-linear surface's kink arrangement and is used by the
//! test suites to validate both paths.

use crate::ensemble::{
    validate_inputs, CorrelationVector, LabelVector, PredictionMatrix, WeightVector,
    DEFAULT_BORDERLINE_TOL,
};
use crate::error::Error;
use crate::simplex::{self, Constraint, LinearProgram, LpStatus, Relation};
use crate::slack::{noisy_slack, noisy_subgradient, NoiseProfile};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// How to minimize the slack function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Subgradient,
    StochasticSubgradient,
    ExactLp,
}

/// Step-size schedule for the subgradient paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSchedule {
    Constant(f64),
    /// `eta_t = eta0 / sqrt(t)`; `None` picks `eta0 = 2 / max_j ||x_j||_2`.
    InverseSqrt(Option<f64>),
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub method: Method,
    pub max_iters: usize,
    pub step_schedule: StepSchedule,
    /// Duality-gap / step-norm stopping tolerance.
    pub tolerance: f64,
    pub seed: u64,
    /// Borderline tolerance threaded through partitions and subgradients.
    pub tau: f64,
    /// Examples per stochastic subgradient estimate.
    pub batch_size: usize,
    /// `||sigma||_1` beyond this is treated as divergence toward an
    /// unbounded slack function, i.e. an infeasible instance.
    pub divergence_bound: f64,
    /// Record the best-objective-so-far series in the result.
    pub record_history: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::ExactLp,
            max_iters: 50_000,
            step_schedule: StepSchedule::InverseSqrt(None),
            tolerance: 1e-6,
            seed: 0,
            tau: DEFAULT_BORDERLINE_TOL,
            batch_size: 1,
            divergence_bound: 1e6,
            record_history: false,
        }
    }
}

impl SolverConfig {
    pub fn with_method(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }
}

/// Primal/dual evidence from the exact path: the adversary LP value, the
/// epigraph LP value, their gap, and the adversary's labeling.
#[derive(Debug, Clone)]
pub struct LpCertificate {
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub primal_z: LabelVector,
    pub status: LpStatus,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub sigma: WeightVector,
    /// Slack value at `sigma` (recomputed, not the raw LP objective).
    pub objective: f64,
    /// Simplex pivots for the exact path, iterations otherwise.
    pub iterations_used: usize,
    pub certificate: Option<LpCertificate>,
    pub converged: bool,
    /// Best-objective-so-far per iteration, when requested.
    pub history: Option<Vec<f64>>,
}

fn unit_noise(n: usize) -> (Vec<f64>, Vec<f64>) {
    (vec![1.0; n], vec![1.0; n])
}

fn noise_vectors(noise: Option<&NoiseProfile>, n: usize) -> (Vec<f64>, Vec<f64>) {
    match noise {
        Some(np) => (np.lower().to_vec(), np.upper().to_vec()),
        None => unit_noise(n),
    }
}

/// Epigraph LP over `(sigma, s, r)`:
///
/// ```text
/// max  b^T sigma - (1/n) sum_j (u_j s_j + l_j r_j)
/// s.t. x_j^T sigma - s_j <= hi_j
///     -x_j^T sigma - r_j <= -lo_j
///      sigma, s, r >= 0
/// ```
///
/// With `hi = 1`, `lo = -1` the penalties are the clipping terms of the
/// slack function; with `hi = lo = g` they linearize `||F^T sigma - g||_1`.
fn epigraph_lp(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    u: &[f64],
    l: &[f64],
    hi: &[f64],
    lo: &[f64],
) -> LinearProgram {
    let p = f.p();
    let n = f.n();
    let nv = p + 2 * n;
    let nf = n as f64;
    let mut maximize = vec![0.0; nv];
    maximize[..p].copy_from_slice(b.as_slice());
    for j in 0..n {
        maximize[p + j] = -u[j] / nf;
        maximize[p + n + j] = -l[j] / nf;
    }
    let mut constraints = Vec::with_capacity(2 * n);
    for j in 0..n {
        let col = f.column(j);
        let mut up = vec![0.0; nv];
        up[..p].copy_from_slice(col);
        up[p + j] = -1.0;
        constraints.push(Constraint {
            coeffs: up,
            relation: Relation::Le,
            rhs: hi[j],
        });
        let mut down = vec![0.0; nv];
        for (i, &v) in col.iter().enumerate() {
            down[i] = -v;
        }
        down[p + n + j] = -1.0;
        constraints.push(Constraint {
            coeffs: down,
            relation: Relation::Le,
            rhs: -lo[j],
        });
    }
    LinearProgram {
        maximize,
        constraints,
    }
}

/// The LP whose optimum is `-min_sigma gamma(sigma)`; solving it yields
/// an optimal weighting exactly.
pub fn lp_dual_epigraph(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    noise: Option<&NoiseProfile>,
) -> LinearProgram {
    let n = f.n();
    let (l, u) = noise_vectors(noise, n);
    epigraph_lp(f, b, &u, &l, &vec![1.0; n], &vec![-1.0; n])
}

/// Epigraph LP for the worst-case correlation of a fixed prediction `g`:
/// `max_{sigma >= 0} b^T sigma - (1/n) ||F^T sigma - g||_1`.
pub(crate) fn lp_worst_case(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    g: &[f64],
) -> LinearProgram {
    let n = f.n();
    let (l, u) = unit_noise(n);
    epigraph_lp(f, b, &u, &l, g, g)
}

/// Adversary LP over the split labeling `zeta = (z_+, z_-)`:
/// `min (1/n) sum(zeta)` s.t. `F(z_+ - z_-) >= n b`, `z_+ <= u`, `z_- <= l`.
pub(crate) fn adversary_lp(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    l: &[f64],
    u: &[f64],
) -> LinearProgram {
    let p = f.p();
    let n = f.n();
    let nf = n as f64;
    // minimization of the L1 mass, negated for the max-form solver
    let maximize = vec![-1.0 / nf; 2 * n];
    let mut constraints = Vec::with_capacity(p + 2 * n);
    for i in 0..p {
        let mut coeffs = vec![0.0; 2 * n];
        for j in 0..n {
            coeffs[j] = f.entry(i, j);
            coeffs[n + j] = -f.entry(i, j);
        }
        constraints.push(Constraint {
            coeffs,
            relation: Relation::Ge,
            rhs: nf * b.as_slice()[i],
        });
    }
    for j in 0..2 * n {
        let mut coeffs = vec![0.0; 2 * n];
        coeffs[j] = 1.0;
        constraints.push(Constraint {
            coeffs,
            relation: Relation::Le,
            rhs: if j < n { u[j] } else { l[j - n] },
        });
    }
    LinearProgram {
        maximize,
        constraints,
    }
}

/// Solve the adversary's LP `min (1/n)||z||_1` over
/// `{z in [-1,1]^n : F z >= n b}` and certify it against the epigraph
/// optimum. `status` is `Infeasible` iff the constraint polytope is
/// empty.
pub fn lp_adversary(f: &PredictionMatrix, b: &CorrelationVector) -> Result<LpCertificate, Error> {
    validate_inputs(f, b)?;
    adversary_certificate(f, b, None)
}

pub(crate) fn adversary_certificate(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    noise: Option<&NoiseProfile>,
) -> Result<LpCertificate, Error> {
    let n = f.n();
    let (l, u) = noise_vectors(noise, n);
    let primal = simplex::solve(&adversary_lp(f, b, &l, &u))?;
    if primal.status != LpStatus::Optimal {
        return Ok(LpCertificate {
            primal_value: 0.0,
            dual_value: 0.0,
            gap: 0.0,
            primal_z: LabelVector::zeros(n),
            status: primal.status,
        });
    }
    let z: Vec<f64> = (0..n)
        .map(|j| (primal.x[j] - primal.x[n + j]).clamp(-1.0, 1.0))
        .collect();
    let dual = simplex::solve(&lp_dual_epigraph(f, b, noise))?;
    let primal_value = -primal.value;
    let dual_value = dual.value;
    Ok(LpCertificate {
        primal_value,
        dual_value,
        gap: (primal_value - dual_value).abs(),
        primal_z: LabelVector::new(z)?,
        status: LpStatus::Optimal,
    })
}

/// Minimize the (optionally noise-weighted) slack function.
pub fn minimize_slack(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    config: &SolverConfig,
    noise: Option<&NoiseProfile>,
) -> Result<SolveResult, Error> {
    validate_inputs(f, b)?;
    if let Some(np) = noise {
        if np.len() != f.n() {
            return Err(Error::DimensionMismatch {
                context: "noise profile",
                expected: f.n(),
                got: np.len(),
            });
        }
    }
    match config.method {
        Method::ExactLp => minimize_exact(f, b, config, noise),
        Method::Subgradient | Method::StochasticSubgradient => {
            minimize_subgradient(f, b, config, noise)
        }
    }
}

fn objective_at(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    sigma: &WeightVector,
    noise: Option<&NoiseProfile>,
) -> Result<f64, Error> {
    Ok(match noise {
        Some(np) => noisy_slack(f, b, sigma, np)?.value,
        None => crate::slack::slack(f, b, sigma)?.value,
    })
}

fn minimize_exact(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    _config: &SolverConfig,
    noise: Option<&NoiseProfile>,
) -> Result<SolveResult, Error> {
    let sol = simplex::solve(&lp_dual_epigraph(f, b, noise))?;
    match sol.status {
        LpStatus::Unbounded => Err(Error::Infeasible(
            "no labeling satisfies the correlation bounds (slack function unbounded below)".into(),
        )),
        LpStatus::Infeasible => Err(Error::Infeasible(
            "epigraph LP unexpectedly infeasible (numerical failure)".into(),
        )),
        LpStatus::Optimal => {
            let sigma = WeightVector::new(sol.x[..f.p()].iter().map(|v| v.max(0.0)).collect())?;
            let objective = objective_at(f, b, &sigma, noise)?;
            let certificate = adversary_certificate(f, b, noise)?;
            Ok(SolveResult {
                sigma,
                objective,
                iterations_used: sol.pivots,
                certificate: Some(certificate),
                converged: true,
                history: None,
            })
        }
    }
}

fn minimize_subgradient(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    config: &SolverConfig,
    noise: Option<&NoiseProfile>,
) -> Result<SolveResult, Error> {
    let p = f.p();
    let n = f.n();
    let (lvec, uvec) = noise_vectors(noise, n);
    let full_noise = NoiseProfile::new(lvec.clone(), uvec.clone())?;
    let eta0 = match config.step_schedule {
        StepSchedule::Constant(e) | StepSchedule::InverseSqrt(Some(e)) => e,
        StepSchedule::InverseSqrt(None) => {
            let max_norm = (0..n)
                .map(|j| f.column(j).iter().map(|v| v * v).sum::<f64>().sqrt())
                .fold(0.0_f64, f64::max);
            if max_norm > 0.0 {
                2.0 / max_norm
            } else {
                1.0
            }
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut sigma = vec![0.0; p];
    let mut average = vec![0.0; p];
    let mut best_sigma = sigma.clone();
    let mut best_obj = objective_at(f, b, &WeightVector::zeros(p), noise)?;
    let mut history = config.record_history.then(Vec::new);
    let mut converged = false;
    let mut iterations = 0;

    for t in 1..=config.max_iters {
        iterations = t;
        let w = WeightVector::new(sigma.clone())?;
        let grad = match config.method {
            Method::Subgradient => {
                noisy_subgradient(f, b, &w, &full_noise, config.tau, None)?
            }
            Method::StochasticSubgradient => {
                stochastic_gradient(f, b, &sigma, &lvec, &uvec, config, &mut rng)
            }
            Method::ExactLp => unreachable!("dispatched in minimize_slack"),
        };
        let eta = match config.step_schedule {
            StepSchedule::Constant(e) => e,
            StepSchedule::InverseSqrt(_) => eta0 / (t as f64).sqrt(),
        };
        for i in 0..p {
            sigma[i] = (sigma[i] - eta * grad[i]).max(0.0);
        }
        let tf = t as f64;
        for i in 0..p {
            average[i] += (sigma[i] - average[i]) / tf;
        }

        let obj = objective_at(f, b, &WeightVector::new(sigma.clone())?, noise)?;
        if obj < best_obj {
            best_obj = obj;
            best_sigma.copy_from_slice(&sigma);
        }
        if let Some(h) = history.as_mut() {
            h.push(best_obj);
        }

        if sigma.iter().sum::<f64>() > config.divergence_bound {
            return Err(Error::Infeasible(format!(
                "weights diverged past {} after {t} iterations; the correlation \
                 bounds appear unattainable",
                config.divergence_bound
            )));
        }
        let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if eta * grad_norm <= config.tolerance {
            converged = true;
            break;
        }
    }

    // Polyak-averaged iterate, kept unless the best single iterate beat it.
    let avg_w = WeightVector::new(average)?;
    let avg_obj = objective_at(f, b, &avg_w, noise)?;
    let (sigma, objective) = if avg_obj <= best_obj {
        (avg_w, avg_obj)
    } else {
        (WeightVector::new(best_sigma)?, best_obj)
    };
    Ok(SolveResult {
        sigma,
        objective,
        iterations_used: iterations,
        certificate: None,
        converged,
        history,
    })
}

/// Single-sample (or mini-batch) subgradient: the penalty term of a
/// uniformly drawn example, minus `b`.
fn stochastic_gradient(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    sigma: &[f64],
    l: &[f64],
    u: &[f64],
    config: &SolverConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let p = f.p();
    let n = f.n();
    let mut grad = vec![0.0; p];
    let batch = config.batch_size.max(1);
    for _ in 0..batch {
        let j = rng.gen_range(0..n);
        let col = f.column(j);
        let margin: f64 = col.iter().zip(sigma).map(|(x, s)| x * s).sum();
        let weight = if margin > 0.0 { u[j] } else { l[j] };
        let a = margin.abs();
        let scale = if a > 1.0 + config.tau {
            weight * margin.signum()
        } else if a >= 1.0 - config.tau {
            0.5 * weight * margin.signum()
        } else {
            0.0
        };
        if scale != 0.0 {
            for i in 0..p {
                grad[i] += scale * col[i];
            }
        }
    }
    let bf = batch as f64;
    grad.iter_mut()
        .zip(b.as_slice())
        .for_each(|(g, bi)| *g = *g / bf - bi);
    grad
}

const ORACLE_MAX_P: usize = 6;
const ORACLE_MAX_N: usize = 6;

/// Brute-force minimum of the slack function for tiny instances, used
/// only to validate the real solvers. Enumerates every vertex of the
/// arrangement formed by the kink hyperplanes `x_j^T sigma = +-1` and
/// the coordinate planes `sigma_i = 0`, evaluates the slack function at
/// each feasible vertex, and returns the least value. The minimum of a
/// convex piecewise-linear function over the nonnegative orthant is
/// attained at such a vertex, so this is exhaustive for feasible
/// instances.
pub fn oracle_minimize(
    f: &PredictionMatrix,
    b: &CorrelationVector,
    noise: Option<&NoiseProfile>,
) -> Result<f64, Error> {
    validate_inputs(f, b)?;
    let p = f.p();
    let n = f.n();
    if p > ORACLE_MAX_P || n > ORACLE_MAX_N {
        return Err(Error::TooLarge { p, n });
    }
    let (l, u) = noise_vectors(noise, n);

    // Hyperplanes as (normal, offset) pairs.
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::with_capacity(2 * n + p);
    for j in 0..n {
        planes.push((f.column(j).to_vec(), 1.0));
        planes.push((f.column(j).to_vec(), -1.0));
    }
    for i in 0..p {
        let mut e = vec![0.0; p];
        e[i] = 1.0;
        planes.push((e, 0.0));
    }

    let eval = |sigma: &[f64]| -> f64 {
        let mut penalty = 0.0;
        for j in 0..n {
            let m: f64 = f.column(j).iter().zip(sigma).map(|(x, s)| x * s).sum();
            penalty += u[j] * (m - 1.0).max(0.0) + l[j] * (-m - 1.0).max(0.0);
        }
        penalty / n as f64
            - b.as_slice()
                .iter()
                .zip(sigma)
                .map(|(bi, s)| bi * s)
                .sum::<f64>()
    };

    let mut best = f64::INFINITY;
    let mut sel: Vec<usize> = (0..p).collect();
    loop {
        let a = DMatrix::from_fn(p, p, |r, c| planes[sel[r]].0[c]);
        let rhs = DVector::from_fn(p, |r, _| planes[sel[r]].1);
        if let Some(sigma) = a.clone().lu().solve(&rhs) {
            let residual = (&a * &sigma - &rhs).abs().max();
            let nonneg = sigma.iter().all(|&v| v >= -1e-9);
            if residual <= 1e-8 && nonneg {
                let clamped: Vec<f64> = sigma.iter().map(|v| v.max(0.0)).collect();
                best = best.min(eval(&clamped));
            }
        }
        // next combination in lexicographic order
        let total = planes.len();
        let mut idx = p;
        loop {
            if idx == 0 {
                return Ok(best);
            }
            idx -= 1;
            if sel[idx] + (p - idx) < total {
                sel[idx] += 1;
                for k in idx + 1..p {
                    sel[k] = sel[k - 1] + 1;
                }
                break;
            }
        }
    }
}
