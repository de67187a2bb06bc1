//! Dense two-phase tableau simplex with Bland's anti-cycling rule.
//!
//! Solves `max c^T x` subject to mixed `<= / >= / =` constraints and
//! `x >= 0`. Everything is dense and deterministic: entering variable is
//! the lowest-index improving column, the ratio test breaks ties toward
//! the lowest basic variable index, so identical inputs always take the
//! identical pivot path. Sized for desk-scale problems (hundreds of
//! rows/columns), which is all the rest of the crate needs.

use crate::error::Error;

const PIVOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `max c^T x` s.t. the constraints and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub maximize: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn num_vars(&self) -> usize {
        self.maximize.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Structural variable values; zeros unless status is optimal.
    pub x: Vec<f64>,
    /// Objective value; meaningful only when optimal.
    pub value: f64,
    /// Total pivots across both phases.
    pub pivots: usize,
}

struct Tableau {
    rows: Vec<Vec<f64>>, // coefficient part, one per constraint
    rhs: Vec<f64>,
    obj: Vec<f64>, // reduced costs (maximization: optimal when all <= tol)
    obj_val: f64,
    basis: Vec<usize>,
    num_structural: usize,
    art_start: usize, // columns >= art_start are artificial
    pivots: usize,
    pivot_limit: usize,
}

impl Tableau {
    fn num_cols(&self) -> usize {
        self.obj.len()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let pv = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= pv;
        }
        self.rhs[r] /= pv;
        self.rows[r][c] = 1.0;

        let ncols = self.num_cols();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = self.rows[i][c];
            if factor == 0.0 {
                continue;
            }
            for j in 0..ncols {
                self.rows[i][j] -= factor * self.rows[r][j];
            }
            self.rows[i][c] = 0.0;
            self.rhs[i] -= factor * self.rhs[r];
        }
        let factor = self.obj[c];
        if factor != 0.0 {
            for j in 0..ncols {
                self.obj[j] -= factor * self.rows[r][j];
            }
            self.obj[c] = 0.0;
            self.obj_val += factor * self.rhs[r];
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Bland: entering column is the lowest-index improving one.
    fn entering(&self, allow_artificial: bool) -> Option<usize> {
        let limit = if allow_artificial {
            self.num_cols()
        } else {
            self.art_start
        };
        (0..limit).find(|&j| self.obj[j] > PIVOT_TOL)
    }

    /// Ratio test; ties go to the row whose basic variable has the
    /// lowest index (Bland).
    fn leaving(&self, c: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.rows.len() {
            let a = self.rows[r][c];
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = self.rhs[r].max(0.0) / a;
            match best {
                None => best = Some((r, ratio)),
                Some((br, bratio)) => {
                    if ratio < bratio - PIVOT_TOL
                        || ((ratio - bratio).abs() <= PIVOT_TOL
                            && self.basis[r] < self.basis[br])
                    {
                        best = Some((r, ratio));
                    }
                }
            }
        }
        best.map(|(r, _)| r)
    }

    /// Returns false on unbounded objective.
    fn run(&mut self, allow_artificial: bool) -> Result<bool, Error> {
        while let Some(c) = self.entering(allow_artificial) {
            if self.pivots >= self.pivot_limit {
                return Err(Error::PivotLimit(self.pivots));
            }
            match self.leaving(c) {
                Some(r) => self.pivot(r, c),
                None => return Ok(false),
            }
        }
        Ok(true)
    }
}

/// Solve by two-phase simplex. `Err` only on the pivot-limit guard,
/// which Bland's rule should make unreachable.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution, Error> {
    let nv = lp.num_vars();
    let m = lp.constraints.len();
    for (i, con) in lp.constraints.iter().enumerate() {
        if con.coeffs.len() != nv {
            return Err(Error::DimensionMismatch {
                context: "LP constraint",
                expected: nv,
                got: con.coeffs.len(),
            });
        }
        if con.rhs.is_nan() {
            return Err(Error::InvalidParameter(format!("NaN rhs in constraint {i}")));
        }
    }

    // Normalize so every rhs is nonnegative, then count extra columns.
    let mut norm: Vec<(Vec<f64>, Relation, f64)> = lp
        .constraints
        .iter()
        .map(|con| {
            if con.rhs < 0.0 {
                let flipped = match con.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (con.coeffs.iter().map(|v| -v).collect(), flipped, -con.rhs)
            } else {
                (con.coeffs.clone(), con.relation, con.rhs)
            }
        })
        .collect();

    let num_slack = norm
        .iter()
        .filter(|(_, rel, _)| *rel != Relation::Eq)
        .count();
    let num_art = norm
        .iter()
        .filter(|(_, rel, _)| *rel != Relation::Le)
        .count();
    let art_start = nv + num_slack;
    let total = art_start + num_art;

    let mut rows = vec![vec![0.0; total]; m];
    let mut rhs = vec![0.0; m];
    let mut basis = vec![0usize; m];
    let mut slack_idx = nv;
    let mut art_idx = art_start;
    for (r, (coeffs, rel, b)) in norm.drain(..).enumerate() {
        rows[r][..nv].copy_from_slice(&coeffs);
        rhs[r] = b;
        match rel {
            Relation::Le => {
                rows[r][slack_idx] = 1.0;
                basis[r] = slack_idx;
                slack_idx += 1;
            }
            Relation::Ge => {
                rows[r][slack_idx] = -1.0;
                slack_idx += 1;
                rows[r][art_idx] = 1.0;
                basis[r] = art_idx;
                art_idx += 1;
            }
            Relation::Eq => {
                rows[r][art_idx] = 1.0;
                basis[r] = art_idx;
                art_idx += 1;
            }
        }
    }

    let scale = rhs.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    let pivot_limit = 50_000 + 200 * (m + total);
    let mut t = Tableau {
        rows,
        rhs,
        obj: vec![0.0; total],
        obj_val: 0.0,
        basis,
        num_structural: nv,
        art_start,
        pivots: 0,
        pivot_limit,
    };

    // Phase 1: maximize minus the sum of artificials. Reduced costs for
    // the artificial basis come from summing the artificial rows.
    if num_art > 0 {
        for r in 0..m {
            if t.basis[r] >= art_start {
                for j in 0..total {
                    t.obj[j] += t.rows[r][j];
                }
                t.obj_val -= t.rhs[r];
            }
        }
        for j in art_start..total {
            t.obj[j] = 0.0; // basic artificials have zero reduced cost
        }
        let bounded = t.run(true)?;
        debug_assert!(bounded, "phase 1 objective is bounded above by 0");
        if t.obj_val < -1e-7 * scale.max(1.0) {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: vec![0.0; nv],
                value: 0.0,
                pivots: t.pivots,
            });
        }
        // Drive leftover zero-level artificials out of the basis;
        // rows that cannot pivot are redundant and get dropped.
        let mut r = 0;
        while r < t.rows.len() {
            if t.basis[r] >= art_start {
                let col = (0..art_start).find(|&j| t.rows[r][j].abs() > PIVOT_TOL);
                match col {
                    Some(c) => t.pivot(r, c),
                    None => {
                        t.rows.remove(r);
                        t.rhs.remove(r);
                        t.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    // Phase 2: restore the real objective over the current basis.
    t.obj = vec![0.0; total];
    t.obj[..nv].copy_from_slice(&lp.maximize);
    t.obj_val = 0.0;
    for r in 0..t.rows.len() {
        let b = t.basis[r];
        let cb = if b < nv { lp.maximize[b] } else { 0.0 };
        if cb != 0.0 {
            for j in 0..total {
                t.obj[j] -= cb * t.rows[r][j];
            }
            t.obj_val += cb * t.rhs[r];
        }
    }
    for j in art_start..total {
        t.obj[j] = 0.0; // artificials are banned from entering in phase 2
    }
    let bounded = t.run(false)?;
    if !bounded {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: vec![0.0; nv],
            value: f64::INFINITY,
            pivots: t.pivots,
        });
    }

    let mut x = vec![0.0; nv];
    for r in 0..t.rows.len() {
        if t.basis[r] < t.num_structural {
            x[t.basis[r]] = t.rhs[r].max(0.0);
        }
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        value: t.obj_val,
        pivots: t.pivots,
    })
}
