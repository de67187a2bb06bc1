//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured quantities (visible under `--nocapture`).
//!
//! Criteria 5, 6 and 9 share instance pools built once per process.

use ensemble_minimax::bounds::{estimate_b, test_correlations, BoundConfig, LabeledSet};
use ensemble_minimax::datasets::{self, IntroCase};
use ensemble_minimax::ensemble::partition;
use ensemble_minimax::game::{
    adversary_strategy, evaluate, predictor_strategy, worst_case_correlation, zbr_check,
};
use ensemble_minimax::slack::{slack, subgradient, NoiseProfile};
use ensemble_minimax::solver::{lp_adversary, lp_dual_epigraph, minimize_slack, oracle_minimize};
use ensemble_minimax::{
    CorrelationVector, LabelVector, LpStatus, Method, PredictionMatrix, SolverConfig, WeightVector,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

struct Instance {
    f: PredictionMatrix,
    b: CorrelationVector,
    z_true: LabelVector,
    name: String,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Random feasible instance: rows oriented toward the hidden labeling so
/// that flooring `b` at zero preserves feasibility.
fn random_instance(seed: u64, max_p: usize, max_n: usize, z_amp: f64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = rng.gen_range(1..=max_p);
    let n = rng.gen_range(1..=max_n);
    let mut rows: Vec<Vec<f64>> = (0..p)
        .map(|_| {
            (0..n)
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        if rng.gen_bool(0.5) {
                            1.0
                        } else {
                            -1.0
                        }
                    } else {
                        rng.gen_range(-1.0..1.0)
                    }
                })
                .collect()
        })
        .collect();
    let z: Vec<f64> = (0..n).map(|_| rng.gen_range(-z_amp..z_amp)).collect();
    for row in rows.iter_mut() {
        if row.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>() < 0.0 {
            row.iter_mut().for_each(|v| *v = -*v);
        }
    }
    let f = PredictionMatrix::from_rows(&rows).unwrap();
    let z_true = LabelVector::new(z).unwrap();
    let corr = test_correlations(&f, &z_true).unwrap();
    let slack_amt = rng.gen_range(0.0..0.2);
    let b = CorrelationVector::new(
        corr.iter()
            .map(|c| (c - slack_amt).clamp(0.0, 1.0))
            .collect(),
    )
    .unwrap();
    Instance {
        f,
        b,
        z_true,
        name: format!("random(seed={seed},p={p},n={n})"),
    }
}

fn named_instances() -> Vec<Instance> {
    let mut out = Vec::new();
    for (inst, name) in [
        (datasets::gen_intro_case(IntroCase::A), "caseA".to_string()),
        (datasets::gen_intro_case(IntroCase::B), "caseB".to_string()),
        (datasets::gen_table1(), "table1".to_string()),
    ] {
        out.push(Instance {
            f: inst.f,
            b: inst.b,
            z_true: inst.z_true,
            name,
        });
    }
    for p in [5usize, 7] {
        for seed in 0..5u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(300 + seed);
            let flips: Vec<usize> = (0..p).filter(|_| rng.gen_bool(0.5)).collect();
            let inst = datasets::gen_cyclic(p, &flips).unwrap();
            out.push(Instance {
                f: inst.f,
                b: inst.b,
                z_true: inst.z_true,
                name: format!("cyclic(p={p},seed={seed})"),
            });
        }
    }
    out
}

fn small_pool() -> &'static Vec<Instance> {
    static POOL: OnceLock<Vec<Instance>> = OnceLock::new();
    POOL.get_or_init(|| (0..200).map(|i| random_instance(1000 + i, 4, 6, 1.0)).collect())
}

fn medium_pool() -> &'static Vec<Instance> {
    static POOL: OnceLock<Vec<Instance>> = OnceLock::new();
    POOL.get_or_init(|| (0..50).map(|i| random_instance(2000 + i, 6, 50, 1.0)).collect())
}

fn lp_config() -> SolverConfig {
    SolverConfig::default()
}

#[test]
fn criterion_01_intro_case_a() {
    let start = Instant::now();
    let inst = datasets::gen_intro_case(IntroCase::A);
    let sol = ensemble_minimax::game::solve_game(&inst.f, &inst.b, &lp_config(), None).unwrap();
    assert!((sol.value - 1.0).abs() <= 1e-6, "V = {}", sol.value);
    for g in sol.g.as_slice() {
        assert!(*g > 0.0 && g.signum() == 1.0);
    }
    let (_, error) = evaluate(&sol.g, &inst.z_true).unwrap();
    assert_eq!(error, 0.0);
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "{elapsed:?}");
    println!("criterion 01 PASS: case A V = {} error = {error} ({elapsed:?})", sol.value);
}

#[test]
fn criterion_02_intro_case_b() {
    let start = Instant::now();
    let inst = datasets::gen_intro_case(IntroCase::B);
    let sol = ensemble_minimax::game::solve_game(&inst.f, &inst.b, &lp_config(), None).unwrap();
    assert!((sol.value - 1.0 / 3.0).abs() <= 1e-6, "V = {}", sol.value);
    let (_, error) = evaluate(&sol.g, &inst.z_true).unwrap();
    assert!((error - 1.0 / 3.0).abs() <= 1e-6, "error = {error}");
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "{elapsed:?}");
    println!("criterion 02 PASS: case B V = {} error = {error} ({elapsed:?})", sol.value);
}

#[test]
fn criterion_03_cyclic_instances() {
    let config = lp_config();
    for p in [5usize, 7] {
        for seed in 0..5u64 {
            let start = Instant::now();
            let mut rng = ChaCha8Rng::seed_from_u64(300 + seed);
            let flips: Vec<usize> = (0..p).filter(|_| rng.gen_bool(0.5)).collect();
            let inst = datasets::gen_cyclic(p, &flips).unwrap();

            let (value, _) =
                ensemble_minimax::game::game_value(&inst.f, &inst.b, &config).unwrap();
            assert!((value - 1.0).abs() <= 1e-6, "p={p} seed={seed} V={value}");

            let (in_zbr, _) = zbr_check(&inst.f, &inst.b, &config).unwrap();
            assert!(in_zbr, "p={p} seed={seed} not in ZBR");

            // every single rule sits exactly (p-1)/(2p) above perfect:
            // correlation 1/p, i.e. error 1/2 - 1/(2p)
            let expected = (1.0 - 1.0 / (p as f64)) / 2.0;
            for i in 0..p {
                let row = LabelVector::new(inst.f.row(i)).unwrap();
                let (_, error) = evaluate(&row, &inst.z_true).unwrap();
                assert_eq!(error, expected, "row {i} of p={p} seed={seed}");
            }
            let elapsed = start.elapsed();
            assert!(elapsed < Duration::from_secs(1), "{elapsed:?}");
        }
    }
    println!("criterion 03 PASS: cyclic p=5,7 x 5 flip seeds, V = 1, ZBR, single-rule error 1/2 - 1/(2p)");
}

#[test]
fn criterion_04_table1() {
    let start = Instant::now();
    let inst = datasets::gen_table1();
    let sol = ensemble_minimax::game::solve_game(&inst.f, &inst.b, &lp_config(), None).unwrap();
    assert!((sol.value - 1.0).abs() <= 1e-6, "V = {}", sol.value);
    for g in sol.g.as_slice() {
        assert!((g - 1.0).abs() <= 1e-9);
    }
    let erm = datasets::baseline_erm(&inst.f, &inst.b).unwrap();
    assert_eq!(erm.as_slice()[5], -1.0, "best single rule must err on the last example");
    assert_eq!(&erm.as_slice()[..5], &[1.0; 5]);
    let all = datasets::baseline_majority(&inst.f, &[0, 1, 2, 3, 4, 5]).unwrap();
    assert_eq!(all.as_slice()[5], -1.0, "full vote must err on the last example");
    let a_bloc = datasets::baseline_majority(&inst.f, &[0, 1, 2]).unwrap();
    let (_, err) = evaluate(&a_bloc, &inst.z_true).unwrap();
    assert_eq!(err, 0.0);
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "{elapsed:?}");
    println!("criterion 04 PASS: table1 V = {} with the expected baseline behavior ({elapsed:?})", sol.value);
}

#[test]
fn criterion_05_strong_duality_suite() {
    let start = Instant::now();
    let mut max_gap: f64 = 0.0;
    let mut max_oracle_err: f64 = 0.0;
    for inst in small_pool() {
        let cert = lp_adversary(&inst.f, &inst.b).unwrap();
        assert_eq!(cert.status, LpStatus::Optimal, "{}", inst.name);
        assert!(cert.gap <= 1e-6, "{}: gap {}", inst.name, cert.gap);
        let oracle = oracle_minimize(&inst.f, &inst.b, None).unwrap();
        let err_primal = (cert.primal_value - (-oracle)).abs();
        let err_dual = (cert.dual_value - (-oracle)).abs();
        assert!(err_primal <= 1e-4, "{}: primal vs oracle {err_primal}", inst.name);
        assert!(err_dual <= 1e-4, "{}: dual vs oracle {err_dual}", inst.name);
        max_gap = max_gap.max(cert.gap);
        max_oracle_err = max_oracle_err.max(err_primal.max(err_dual));
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "{elapsed:?}");
    println!(
        "criterion 05 PASS: 200 instances, max duality gap {max_gap:.2e}, max oracle deviation {max_oracle_err:.2e} ({elapsed:?})"
    );
}

#[test]
fn criterion_06_subgradient_vs_lp() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for inst in medium_pool() {
        let lp = minimize_slack(&inst.f, &inst.b, &lp_config(), None).unwrap();
        let config = SolverConfig {
            method: Method::Subgradient,
            max_iters: 50_000,
            record_history: true,
            ..SolverConfig::default()
        };
        let sub = minimize_slack(&inst.f, &inst.b, &config, None).unwrap();
        let gap = sub.objective - lp.objective;
        assert!(
            gap <= 1e-3,
            "{}: subgradient {} vs LP {}",
            inst.name,
            sub.objective,
            lp.objective
        );
        let history = sub.history.unwrap();
        for w in history.windows(2) {
            assert!(w[1] <= w[0] + 1e-15, "{}: best-objective series increased", inst.name);
        }
        worst = worst.max(gap);
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "{elapsed:?}");
    println!("criterion 06 PASS: 50 instances, worst subgradient-vs-LP gap {worst:.2e} ({elapsed:?})");
}

#[test]
fn criterion_07_observation_one() {
    let config = lp_config();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for trial in 0..100u32 {
        let inst = random_instance(7000 + trial as u64, 4, 6, 1.0);
        let w: Vec<f64> = (0..inst.f.p()).map(|_| rng.gen_range(0.0..2.0)).collect();
        let sigma = WeightVector::new(w).unwrap();
        let g = predictor_strategy(&inst.f, &sigma).unwrap();
        let guaranteed = worst_case_correlation(&inst.f, &inst.b, &g, &config).unwrap();
        let gamma = slack(&inst.f, &inst.b, &sigma).unwrap().value;
        assert!(
            guaranteed >= -gamma - 1e-6,
            "{} trial {trial}: wcc {guaranteed} < -gamma {}",
            inst.name,
            -gamma
        );

        // equality at the optimum
        let res = minimize_slack(&inst.f, &inst.b, &config, None).unwrap();
        let g_star = predictor_strategy(&inst.f, &res.sigma).unwrap();
        let at_opt = worst_case_correlation(&inst.f, &inst.b, &g_star, &config).unwrap();
        assert!(
            (at_opt - (-res.objective)).abs() <= 1e-6,
            "{}: equality violated: {} vs {}",
            inst.name,
            at_opt,
            -res.objective
        );
    }
    println!("criterion 07 PASS: 100 (instance, sigma) pairs satisfy the worst-case bound, equality at the optimum");
}

#[test]
fn criterion_08_subgradient_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let h = 1e-6;
    let mut checked = 0;
    let mut attempts = 0;
    while checked < 100 {
        attempts += 1;
        assert!(attempts < 5000, "could not find kink-free weightings");
        let inst = random_instance(8000 + attempts, 4, 6, 1.0);
        let w: Vec<f64> = (0..inst.f.p()).map(|_| rng.gen_range(0.0..2.0)).collect();
        let sigma = WeightVector::new(w.clone()).unwrap();
        let part = partition(&inst.f, &sigma, 1e-7).unwrap();
        // central differences need clearance around the kinks
        if part
            .margins
            .iter()
            .any(|m| (m.abs() - 1.0).abs() < 1e-4 || m.abs() < 1e-4)
        {
            continue;
        }
        let grad = subgradient(&inst.f, &inst.b, &sigma, 1e-7, None).unwrap();
        for i in 0..inst.f.p() {
            let mut hi = w.clone();
            let mut lo = w.clone();
            hi[i] += h;
            lo[i] = (lo[i] - h).max(0.0);
            let ghi = slack(&inst.f, &inst.b, &WeightVector::new(hi.clone()).unwrap())
                .unwrap()
                .value;
            let glo = slack(&inst.f, &inst.b, &WeightVector::new(lo.clone()).unwrap())
                .unwrap()
                .value;
            let fd = (ghi - glo) / (hi[i] - lo[i]);
            assert!(
                (grad[i] - fd).abs() <= 1e-5,
                "{}: component {i}: {} vs fd {}",
                inst.name,
                grad[i],
                fd
            );
        }
        checked += 1;
    }

    // convexity on random triples
    for trial in 0..100u64 {
        let inst = random_instance(8500 + trial, 4, 6, 1.0);
        let p = inst.f.p();
        let w1: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0..2.0)).collect();
        let w2: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0..2.0)).collect();
        let t: f64 = rng.gen_range(0.0..1.0);
        let mix: Vec<f64> = w1.iter().zip(&w2).map(|(a, b)| t * a + (1.0 - t) * b).collect();
        let g1 = slack(&inst.f, &inst.b, &WeightVector::new(w1).unwrap()).unwrap().value;
        let g2 = slack(&inst.f, &inst.b, &WeightVector::new(w2).unwrap()).unwrap().value;
        let gm = slack(&inst.f, &inst.b, &WeightVector::new(mix).unwrap()).unwrap().value;
        assert!(gm <= t * g1 + (1.0 - t) * g2 + 1e-12, "convexity failed on trial {trial}");
    }
    println!("criterion 08 PASS: 100 finite-difference checks within 1e-5, 100 convexity triples within 1e-12");
}

#[test]
fn criterion_09_adversary_validity() {
    let config = lp_config();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut pool: Vec<&Instance> = Vec::new();
    let named = named_instances();
    pool.extend(named.iter());
    pool.extend(small_pool().iter());
    pool.extend(medium_pool().iter());

    for inst in pool {
        let n = inst.f.n();
        let res = minimize_slack(&inst.f, &inst.b, &config, None).unwrap();
        let value = -res.objective;
        let adv = adversary_strategy(&inst.f, &inst.b, &res.sigma, config.tau).unwrap();
        assert!(
            adv.residual <= 1e-6 * n as f64,
            "{}: stationarity residual {}",
            inst.name,
            adv.residual
        );
        for zj in adv.z.as_slice() {
            assert!((-1.0..=1.0).contains(zj));
        }
        let corr = test_correlations(&inst.f, &adv.z).unwrap();
        for (c, bi) in corr.iter().zip(inst.b.as_slice()) {
            assert!(*c >= bi - 1e-8, "{}: adversary violates a bound", inst.name);
        }

        // saddle inequalities against 100 random opposing strategies
        let g_star = predictor_strategy(&inst.f, &res.sigma).unwrap();
        for _ in 0..100 {
            let g_rand: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let payoff = dot(adv.z.as_slice(), &g_rand) / n as f64;
            assert!(payoff <= value + 1e-6, "{}: z* exceeded by random g", inst.name);

            let lambda: f64 = rng.gen_range(0.0..1.0);
            let z_mix: Vec<f64> = inst
                .z_true
                .as_slice()
                .iter()
                .zip(adv.z.as_slice())
                .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
                .collect();
            let payoff_z = dot(&z_mix, g_star.as_slice()) / n as f64;
            assert!(payoff_z >= value - 1e-6, "{}: g* undercut by feasible z", inst.name);
        }
    }
    println!("criterion 09 PASS: adversary strategies valid on all suite instances, saddle inequalities hold");
}

#[test]
fn criterion_10_noise_propositions() {
    let config = lp_config();
    let mut found = 0;
    let mut seed = 0u64;
    let mut worst_gain = f64::INFINITY;
    while found < 20 {
        seed += 1;
        assert!(seed < 20_000, "could not collect 20 clipping instances");
        let mut rng = ChaCha8Rng::seed_from_u64(10_000 + seed);
        let p = rng.gen_range(1..=3);
        let n = rng.gen_range(3..=10);
        let mut rows: Vec<Vec<f64>> = (0..p)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let z: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.35..0.35)).collect();
        for row in rows.iter_mut() {
            if row.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>() < 0.0 {
                row.iter_mut().for_each(|v| *v = -*v);
            }
        }
        let f = PredictionMatrix::from_rows(&rows).unwrap();
        let zt = LabelVector::new(z).unwrap();
        let corr = test_correlations(&f, &zt).unwrap();
        let b = match CorrelationVector::new(
            corr.iter().map(|c| (c - 0.01).clamp(0.0, 1.0)).collect(),
        ) {
            Ok(b) => b,
            Err(_) => continue,
        };

        let res = minimize_slack(&f, &b, &config, None).unwrap();
        let part = partition(&f, &res.sigma, config.tau).unwrap();
        let strongly_clipped = part
            .clipped
            .iter()
            .any(|&j| part.margins[j].abs() > 1.01);
        if !strongly_clipped {
            continue;
        }
        found += 1;
        let base = -res.objective;

        let make = |a: f64| NoiseProfile::symmetric(vec![a; n]).unwrap();
        let v_unit =
            ensemble_minimax::game::noisy_game_value(&f, &b, &make(1.0), &config).unwrap();
        let v_half =
            ensemble_minimax::game::noisy_game_value(&f, &b, &make(0.5), &config).unwrap();
        let v_small =
            ensemble_minimax::game::noisy_game_value(&f, &b, &make(0.4), &config).unwrap();
        let v_mid =
            ensemble_minimax::game::noisy_game_value(&f, &b, &make(0.7), &config).unwrap();

        assert!((v_unit - base).abs() <= 1e-8, "unit box must reduce to the base game");
        assert!(v_half > base, "half box must strictly help: {v_half} vs {base}");
        assert!(v_unit <= v_mid + 1e-9 && v_mid <= v_small + 1e-9, "monotone in the box");
        worst_gain = worst_gain.min(v_half - base);
    }
    println!("criterion 10 PASS: 20 clipping instances, minimum half-noise gain {worst_gain:.2e}");
}

#[test]
fn criterion_11_bound_coverage() {
    let start = Instant::now();
    let (p, m, n, delta, trials) = (10usize, 200usize, 200usize, 0.1f64, 1000usize);
    let accuracies: Vec<f64> = (0..p).map(|i| 0.65 + 0.03 * i as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    let mut violations = 0usize;
    for _ in 0..trials {
        let draw = |rng: &mut ChaCha8Rng, count: usize, acc: &[f64]| {
            let labels: Vec<f64> = (0..count)
                .map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
                .collect();
            let rows: Vec<Vec<f64>> = acc
                .iter()
                .map(|&a| {
                    labels
                        .iter()
                        .map(|&y| if rng.gen::<f64>() < a { y } else { -y })
                        .collect()
                })
                .collect();
            (rows, labels)
        };
        let (train_rows, train_labels) = draw(&mut rng, m, &accuracies);
        let set = LabeledSet::new(
            PredictionMatrix::from_rows(&train_rows).unwrap(),
            train_labels,
        )
        .unwrap();
        let config = BoundConfig::new(delta, n).unwrap();
        let est = estimate_b(&set, &config).unwrap();

        let (test_rows, test_labels) = draw(&mut rng, n, &accuracies);
        let f = PredictionMatrix::from_rows(&test_rows).unwrap();
        let corr_u = test_correlations(&f, &LabelVector::new(test_labels).unwrap()).unwrap();
        if est
            .b
            .as_slice()
            .iter()
            .zip(&corr_u)
            .any(|(bi, cu)| bi > cu)
        {
            violations += 1;
        }
    }
    let freq = violations as f64 / trials as f64;
    let limit = delta + 3.0 * (delta * (1.0 - delta) / trials as f64).sqrt();
    assert!(freq <= limit, "violation frequency {freq} exceeds {limit}");
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "{elapsed:?}");
    println!("criterion 11 PASS: coverage violations {freq:.4} <= {limit:.4} over {trials} trials ({elapsed:?})");
}

#[test]
fn criterion_12_cli_contract() {
    use std::process::Command;
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_ensemble-game");
    let run = |args: &[&str]| {
        Command::new(bin)
            .args(args)
            .current_dir(dir.path())
            .output()
            .expect("binary runs")
    };

    let out = run(&["generate", "table1", "--out", "inst"]);
    assert!(out.status.success());

    let first = run(&["solve", "inst/F.csv", "--b", "inst/b.json"]);
    let second = run(&["solve", "inst/F.csv", "--b", "inst/b.json"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout, "reports must be byte-identical");

    std::fs::write(dir.path().join("bad_b.json"), "[1.0, 0.5]").unwrap();
    std::fs::write(dir.path().join("bad_F.csv"), "1,-1\n1,1\n").unwrap();
    let infeasible = run(&["solve", "bad_F.csv", "--b", "bad_b.json"]);
    assert_eq!(infeasible.status.code(), Some(2));

    std::fs::write(dir.path().join("broken.csv"), "1,oops\n").unwrap();
    let parse = run(&["solve", "broken.csv", "--b", "bad_b.json"]);
    assert_eq!(parse.status.code(), Some(1));

    println!("criterion 12 PASS: byte-identical reports, exit 2 on infeasible, exit 1 on parse error");
}
