// scratch: subgradient convergence experiments (deleted before ship)
use ensemble_minimax::bounds::test_correlations;
use ensemble_minimax::solver::minimize_slack;
use ensemble_minimax::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_instance(seed: u64, max_p: usize, max_n: usize) -> (PredictionMatrix, CorrelationVector) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = rng.gen_range(1..=max_p);
    let n = rng.gen_range(1..=max_n);
    let mut rows: Vec<Vec<f64>> = (0..p)
        .map(|_| (0..n).map(|_| {
            if rng.gen_bool(0.5) { if rng.gen_bool(0.5) { 1.0 } else { -1.0 } }
            else { rng.gen_range(-1.0..1.0) }
        }).collect())
        .collect();
    let z: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    for row in rows.iter_mut() {
        if row.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>() < 0.0 {
            row.iter_mut().for_each(|v| *v = -*v);
        }
    }
    let f = PredictionMatrix::from_rows(&rows).unwrap();
    let zt = LabelVector::new(z).unwrap();
    let corr = test_correlations(&f, &zt).unwrap();
    let slack_amt = rng.gen_range(0.0..0.2);
    let b = CorrelationVector::new(corr.iter().map(|c| (c - slack_amt).clamp(0.0, 1.0)).collect()).unwrap();
    (f, b)
}

fn main() {
    let scales = [1.5, 2.0, 3.0, 4.0, 8.0];
    let mut worst = vec![0.0f64; scales.len()];
    let mut fails = vec![0usize; scales.len()];
    for i in 0..50u64 {
        let (f, b) = random_instance(91000 + i, 6, 50);
        let lp = minimize_slack(&f, &b, &SolverConfig::default(), None).unwrap();
        for (k, &s) in scales.iter().enumerate() {
            let max_norm = (0..f.n())
                .map(|j| f.column(j).iter().map(|v| v * v).sum::<f64>().sqrt())
                .fold(0.0_f64, f64::max).max(1e-12);
            let config = SolverConfig {
                method: Method::Subgradient,
                max_iters: 50_000,
                step_schedule: StepSchedule::InverseSqrt(Some(s / max_norm)),
                ..SolverConfig::default()
            };
            let sub = minimize_slack(&f, &b, &config, None).unwrap();
            let gap = sub.objective - lp.objective;
            worst[k] = worst[k].max(gap);
            if gap > 1e-3 { fails[k] += 1; }
        }
    }
    for (k, &s) in scales.iter().enumerate() {
        println!("eta0 scale {s}: worst gap {:.3e}, failures {}", worst[k], fails[k]);
    }
}
