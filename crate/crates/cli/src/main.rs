//! Command-line front end for the ensemble aggregation game.
//!
//! Exit codes: 0 solved to optimality, 1 parse or input error,
//! 2 infeasible correlation bounds, 3 solver did not converge.

mod formats;
mod report;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use ensemble_minimax::bounds::{estimate_b, BoundConfig};
use ensemble_minimax::datasets::{self, IntroCase};
use ensemble_minimax::game;
use ensemble_minimax::slack::NoiseProfile;
use ensemble_minimax::{Error as GameError, Method, SolverConfig};
use formats::InputError;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(name = "ensemble-game", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the prediction game for a matrix and correlation bounds.
    Solve(SolveArgs),
    /// Estimate correlation bounds from labeled data.
    #[command(name = "estimate-b")]
    EstimateB(EstimateArgs),
    /// Write a named instance (matrix, bounds, labels, metadata) to a directory.
    Generate(GenerateArgs),
    /// Score predictions against a labeling.
    Evaluate(EvaluateArgs),
    /// ERM or majority-vote baseline predictions.
    Baseline(BaselineArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Lp,
    Subgradient,
    Sgd,
}

#[derive(Args)]
struct SolveArgs {
    /// CSV prediction matrix, one classifier per row.
    matrix: PathBuf,
    /// JSON array of per-classifier correlation lower bounds.
    #[arg(long = "b", conflicts_with = "labeled")]
    b_file: Option<PathBuf>,
    /// Labeled CSV (classifier rows plus a final +-1 label row) to
    /// estimate the bounds from.
    #[arg(long)]
    labeled: Option<PathBuf>,
    /// Failure probability for the bound estimate (with --labeled).
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, value_enum, default_value = "lp")]
    method: MethodArg,
    /// Iteration budget for the subgradient methods.
    #[arg(long, default_value_t = 50_000)]
    iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Borderline margin tolerance.
    #[arg(long, default_value_t = 1e-7)]
    tau: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON noise profile: flat array (symmetric) or {"lower": [...], "upper": [...]}.
    #[arg(long)]
    noise: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record solver wall time in the report (breaks byte-for-byte
    /// reproducibility of the output).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct EstimateArgs {
    /// Labeled CSV: classifier rows plus a final +-1 label row.
    labeled: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Size of the unlabeled test set the bounds will be used against.
    #[arg(long)]
    n: usize,
    /// Keep negative estimates instead of flooring them at zero.
    #[arg(long)]
    no_clamp: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    #[value(name = "caseA")]
    CaseA,
    #[value(name = "caseB")]
    CaseB,
    Cyclic,
    Table1,
    Random,
}

#[derive(Args)]
struct GenerateArgs {
    kind: KindArg,
    /// Classifier count (cyclic, random).
    #[arg(long)]
    p: Option<usize>,
    /// Example count (random; cyclic uses n = p).
    #[arg(long)]
    n: Option<usize>,
    /// Columns to invert in the cyclic construction, e.g. 2,5.
    #[arg(long, value_delimiter = ',')]
    flips: Vec<usize>,
    /// Per-classifier accuracies for the random generator.
    #[arg(long, value_delimiter = ',')]
    accuracies: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Safety margin subtracted from realized correlations (random).
    #[arg(long, default_value_t = 0.05)]
    margin: f64,
    /// Output directory for F.csv, b.json, z_true.json, meta.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// JSON array of predictions in [-1, 1].
    g: PathBuf,
    /// JSON array of labels in [-1, 1].
    z: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineKind {
    Erm,
    Majority,
}

#[derive(Args)]
struct BaselineArgs {
    matrix: PathBuf,
    #[arg(long = "b")]
    b_file: Option<PathBuf>,
    #[arg(long, value_enum)]
    kind: BaselineKind,
    /// Classifier subset for the majority vote, e.g. 0,1,2 (default all).
    #[arg(long, value_delimiter = ',')]
    subset: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            std::process::exit(0);
        }
        Err(e) => {
            eprint!("{e}");
            std::process::exit(1);
        }
    };
    let code = match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::EstimateB(args) => cmd_estimate_b(&args),
        Command::Generate(args) => cmd_generate(&args),
        Command::Evaluate(args) => cmd_evaluate(&args),
        Command::Baseline(args) => cmd_baseline(&args),
    };
    std::process::exit(code);
}

fn fail(err: &InputError) -> i32 {
    eprintln!("error: {err}");
    1
}

fn emit(out: Option<&Path>, text: &str) -> i32 {
    match out {
        Some(path) => match std::fs::write(path, text) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                1
            }
        },
        None => {
            print!("{text}");
            0
        }
    }
}

fn cmd_solve(args: &SolveArgs) -> i32 {
    let inner = || -> Result<(ensemble_minimax::PredictionMatrix, ensemble_minimax::CorrelationVector, Option<NoiseProfile>), InputError> {
        let f = formats::read_matrix(&args.matrix)?;
        let b = match (&args.b_file, &args.labeled) {
            (Some(path), None) => formats::read_bounds(path)?,
            (None, Some(path)) => {
                let set = formats::read_labeled(path)?;
                let config = BoundConfig::new(args.delta, f.n())?;
                estimate_b(&set, &config)?.b
            }
            _ => {
                return Err(InputError::Invalid(
                    "exactly one of --b or --labeled is required".into(),
                ))
            }
        };
        ensemble_minimax::ensemble::validate_inputs(&f, &b)?;
        let noise = args.noise.as_deref().map(formats::read_noise).transpose()?;
        if let Some(np) = &noise {
            if np.len() != f.n() {
                return Err(InputError::Domain(GameError::DimensionMismatch {
                    context: "noise profile",
                    expected: f.n(),
                    got: np.len(),
                }));
            }
        }
        Ok((f, b, noise))
    };
    let (f, b, noise) = match inner() {
        Ok(v) => v,
        Err(e) => return fail(&e),
    };

    let config = SolverConfig {
        method: match args.method {
            MethodArg::Lp => Method::ExactLp,
            MethodArg::Subgradient => Method::Subgradient,
            MethodArg::Sgd => Method::StochasticSubgradient,
        },
        max_iters: args.iters,
        tolerance: args.tol,
        tau: args.tau,
        seed: args.seed,
        ..SolverConfig::default()
    };
    let echo = report::ConfigEcho {
        matrix_file: args.matrix.display().to_string(),
        b_file: args.b_file.as_ref().map(|p| p.display().to_string()),
        labeled_file: args.labeled.as_ref().map(|p| p.display().to_string()),
        delta: args.labeled.as_ref().map(|_| args.delta),
        method: match args.method {
            MethodArg::Lp => "lp",
            MethodArg::Subgradient => "subgradient",
            MethodArg::Sgd => "sgd",
        }
        .to_string(),
        iters: args.iters,
        tol: args.tol,
        tau: args.tau,
        seed: args.seed,
        noise_file: args.noise.as_ref().map(|p| p.display().to_string()),
    };

    let started = Instant::now();
    match game::solve_game(&f, &b, &config, noise.as_ref()) {
        Err(GameError::Infeasible(reason)) => {
            eprintln!("infeasible: {reason}");
            let report = report::RunReport::infeasible(echo);
            emit(args.out.as_deref(), &report.to_json());
            2
        }
        Err(other) => fail(&InputError::Domain(other)),
        Ok(solution) => {
            let elapsed = started.elapsed();
            let duality_gap = match (&noise, &solution.certificate) {
                (None, _) => {
                    game::worst_case_correlation(&f, &b, &solution.g, &config)
                        .ok()
                        .map(|w| w - solution.value)
                }
                (Some(_), Some(cert)) => Some(cert.gap),
                (Some(_), None) => None,
            };
            let mut report = report::RunReport::solved(
                &solution,
                duality_gap,
                solution.iterations_used,
                echo,
            );
            if args.timing {
                report.timing_ms = Some(elapsed.as_millis() as u64);
            }
            let code = emit(args.out.as_deref(), &report.to_json());
            if code != 0 {
                code
            } else if solution.converged {
                0
            } else {
                3
            }
        }
    }
}

#[derive(Serialize)]
struct EstimateOutput {
    b: Vec<f64>,
    eps_s: f64,
    eps_u: f64,
}

fn cmd_estimate_b(args: &EstimateArgs) -> i32 {
    let inner = || -> Result<EstimateOutput, InputError> {
        let set = formats::read_labeled(&args.labeled)?;
        let mut config = BoundConfig::new(args.delta, args.n)?;
        config.clamp_negative = !args.no_clamp;
        let est = estimate_b(&set, &config)?;
        Ok(EstimateOutput {
            b: if args.no_clamp {
                est.raw.clone()
            } else {
                est.b.as_slice().to_vec()
            },
            eps_s: est.eps_s,
            eps_u: est.eps_u,
        })
    };
    match inner() {
        Ok(output) => {
            let mut text = serde_json::to_string_pretty(&output).expect("serializes");
            text.push('\n');
            emit(args.out.as_deref(), &text)
        }
        Err(e) => fail(&e),
    }
}

#[derive(Serialize)]
struct Meta {
    kind: String,
    description: String,
    p: usize,
    n: usize,
    seed: Option<u64>,
    flips: Option<Vec<usize>>,
    accuracies: Option<Vec<f64>>,
    safety_margin: Option<f64>,
    expected_value: Option<f64>,
}

fn cmd_generate(args: &GenerateArgs) -> i32 {
    let inner = || -> Result<(), InputError> {
        let kind_name = match args.kind {
            KindArg::CaseA => "caseA",
            KindArg::CaseB => "caseB",
            KindArg::Cyclic => "cyclic",
            KindArg::Table1 => "table1",
            KindArg::Random => "random",
        };
        let (inst, seed, flips, accuracies, margin) = match args.kind {
            KindArg::CaseA => (datasets::gen_intro_case(IntroCase::A), None, None, None, None),
            KindArg::CaseB => (datasets::gen_intro_case(IntroCase::B), None, None, None, None),
            KindArg::Table1 => (datasets::gen_table1(), None, None, None, None),
            KindArg::Cyclic => {
                let p = args.p.ok_or_else(|| {
                    InputError::Invalid("cyclic generation needs --p".into())
                })?;
                (
                    datasets::gen_cyclic(p, &args.flips)?,
                    None,
                    Some(args.flips.clone()),
                    None,
                    None,
                )
            }
            KindArg::Random => {
                let p = args.p.ok_or_else(|| {
                    InputError::Invalid("random generation needs --p".into())
                })?;
                let n = args.n.ok_or_else(|| {
                    InputError::Invalid("random generation needs --n".into())
                })?;
                let accuracies = if args.accuracies.is_empty() {
                    vec![0.75; p]
                } else {
                    args.accuracies.clone()
                };
                (
                    datasets::gen_random(p, n, &accuracies, args.seed, args.margin)?,
                    Some(args.seed),
                    None,
                    Some(accuracies),
                    Some(args.margin),
                )
            }
        };
        std::fs::create_dir_all(&args.out)
            .map_err(|e| InputError::Io(args.out.display().to_string(), e))?;
        formats::write_matrix(&args.out.join("F.csv"), &inst.f.rows())?;
        formats::write_json(&args.out.join("b.json"), &inst.b.as_slice())?;
        formats::write_json(&args.out.join("z_true.json"), &inst.z_true.as_slice())?;
        formats::write_json(
            &args.out.join("meta.json"),
            &Meta {
                kind: kind_name.to_string(),
                description: inst.description.clone(),
                p: inst.f.p(),
                n: inst.f.n(),
                seed,
                flips,
                accuracies,
                safety_margin: margin,
                expected_value: inst.expected_value,
            },
        )?;
        Ok(())
    };
    match inner() {
        Ok(()) => 0,
        Err(e) => fail(&e),
    }
}

fn cmd_evaluate(args: &EvaluateArgs) -> i32 {
    let inner = || -> Result<(f64, f64), InputError> {
        let g = formats::read_labels(&args.g)?;
        let z = formats::read_labels(&args.z)?;
        Ok(game::evaluate(&g, &z)?)
    };
    match inner() {
        Ok((correlation, error)) => {
            println!("{{\"correlation\": {correlation}, \"error\": {error}}}");
            0
        }
        Err(e) => fail(&e),
    }
}

fn cmd_baseline(args: &BaselineArgs) -> i32 {
    let inner = || -> Result<Vec<f64>, InputError> {
        let f = formats::read_matrix(&args.matrix)?;
        let g = match args.kind {
            BaselineKind::Erm => {
                let path = args.b_file.as_ref().ok_or_else(|| {
                    InputError::Invalid("the erm baseline needs --b".into())
                })?;
                let b = formats::read_bounds(path)?;
                datasets::baseline_erm(&f, &b)?
            }
            BaselineKind::Majority => {
                let subset: Vec<usize> = if args.subset.is_empty() {
                    (0..f.p()).collect()
                } else {
                    args.subset.clone()
                };
                datasets::baseline_majority(&f, &subset)?
            }
        };
        Ok(g.as_slice().to_vec())
    };
    match inner() {
        Ok(g) => {
            let mut text = serde_json::to_string_pretty(&g).expect("serializes");
            text.push('\n');
            emit(args.out.as_deref(), &text)
        }
        Err(e) => fail(&e),
    }
}
