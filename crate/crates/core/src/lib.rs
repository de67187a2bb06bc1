//! Worst-case optimal aggregation of binary classifier ensembles.
//!
//! Given the predictions of `p` classifiers on `n` unlabeled test points
//! (a matrix `F` with entries in `[-1, 1]`) and a per-classifier lower
//! bound `b` on test correlation, prediction is a zero-sum game: the
//! predictor commits to randomized labels `g`, the adversary picks the
//! true labels `z` subject to `(1/n) F z >= b`, and the payoff is the
//! correlation `(1/n) z^T g`. Both minimax strategies are simple
//! functions of a nonnegative weighting `sigma` over the classifiers
//! that minimizes a convex piecewise-linear *slack function*; the game
//! value is the negated minimum.
//!
//! The crate provides:
//!
//! * [`ensemble`] — core types ([`PredictionMatrix`], [`CorrelationVector`],
//!   [`WeightVector`], [`LabelVector`]) and the hedged/clipped/borderline
//!   margin partition,
//! * [`slack`] — the slack function, its label-noise generalizations, and
//!   subgradients,
//! * [`solver`] — minimization by projected (stochastic) subgradient
//!   descent or an exact LP path, plus a brute-force oracle for tiny
//!   instances,
//! * [`simplex`] — the dense two-phase simplex solver backing the LP path,
//! * [`game`] — minimax strategies, game values, equilibrium diagnostics,
//! * [`bounds`] — estimating `b` from labeled data with uniform-convergence
//!   penalties,
//! * [`datasets`] — deterministic instance generators and baseline
//!   aggregators.

pub mod bounds;
pub mod datasets;
pub mod ensemble;
pub mod error;
pub mod game;
pub mod simplex;
pub mod slack;
pub mod solver;

pub use bounds::{BoundConfig, BoundEstimate, LabeledSet};
pub use datasets::GeneratedInstance;
pub use ensemble::{
    CorrelationVector, LabelVector, MarginPartition, PartitionClass, PredictionMatrix,
    WeightVector,
};
pub use error::Error;
pub use game::GameSolution;
pub use simplex::{LinearProgram, LpSolution, LpStatus};
pub use slack::{NoiseProfile, SlackValue};
pub use solver::{LpCertificate, Method, SolveResult, SolverConfig, StepSchedule};
