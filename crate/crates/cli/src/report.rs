//! The machine-readable solve report. Field names and order are part of
//! the stable interface; identical inputs, flags and seed produce
//! byte-identical reports (`timing_ms` stays null unless `--timing` is
//! passed, since wall-clock time is not a function of the inputs).

use ensemble_minimax::{GameSolution, PartitionClass};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub status: String,
    pub value: Option<f64>,
    pub sigma: Option<Vec<f64>>,
    pub g: Option<Vec<f64>>,
    pub z: Option<Vec<f64>>,
    pub partition_labels: Option<Vec<String>>,
    pub zbr: Option<bool>,
    pub duality_gap: Option<f64>,
    pub eq7_residual: Option<f64>,
    pub iterations: Option<usize>,
    pub config: ConfigEcho,
    pub timing_ms: Option<u64>,
}

#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub matrix_file: String,
    pub b_file: Option<String>,
    pub labeled_file: Option<String>,
    pub delta: Option<f64>,
    pub method: String,
    pub iters: usize,
    pub tol: f64,
    pub tau: f64,
    pub seed: u64,
    pub noise_file: Option<String>,
}

impl RunReport {
    pub fn infeasible(config: ConfigEcho) -> Self {
        Self {
            status: "infeasible".into(),
            value: None,
            sigma: None,
            g: None,
            z: None,
            partition_labels: None,
            zbr: None,
            duality_gap: None,
            eq7_residual: None,
            iterations: None,
            config,
            timing_ms: None,
        }
    }

    pub fn solved(
        solution: &GameSolution,
        duality_gap: Option<f64>,
        iterations: usize,
        config: ConfigEcho,
    ) -> Self {
        let labels = (0..solution.partition.margins.len())
            .map(|j| {
                match solution.partition.class_of(j) {
                    PartitionClass::Hedged => "H",
                    PartitionClass::Clipped => "C",
                    PartitionClass::Borderline => "B",
                }
                .to_string()
            })
            .collect();
        Self {
            status: if solution.converged {
                "optimal".into()
            } else {
                "non_converged".into()
            },
            value: Some(solution.value),
            sigma: Some(solution.sigma.as_slice().to_vec()),
            g: Some(solution.g.as_slice().to_vec()),
            z: Some(solution.z.as_slice().to_vec()),
            partition_labels: Some(labels),
            zbr: Some(solution.zbr),
            duality_gap,
            eq7_residual: solution.eq7_residual,
            iterations: Some(iterations),
            config,
            timing_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}
