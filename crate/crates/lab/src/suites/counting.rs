use anyhow::Result;
use lab_core::geometry::counting_sum;
use rand::Rng;

use super::{per_trial, ratio, row};
use crate::config::ExperimentConfig;
use crate::corpus::{random_step_function, rng, trial_seed};
use crate::report::{Assertion, Report};

const COLUMNS: [&str; 10] = [
    "kind", "trial", "seed", "lambda", "x", "l1_norm", "lhs", "rhs", "ratio", "pass",
];

/// Random step functions against `Σ |J| inf_J g ≤ 6λ‖g‖₁`; every trial is a
/// hard assertion.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    let g = &config.geometry;
    let lambdas = &config.analysis.lambda;
    let window = f64::from(1u32 << g.window_exp);
    let trials = per_trial(config.trials, |t| {
        let seed = trial_seed(config.seed, t);
        let mut r = rng(seed);
        let step = random_step_function(&mut r, g.window_exp, g.base_exp);
        lambdas
            .iter()
            .map(|&lambda| {
                let x = r.random_range(-window..2.0 * window);
                let sum = counting_sum(&step, x, lambda)?;
                Ok((seed, lambda, x, step.l1_norm(), sum))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut report = Report::new(config, COLUMNS.to_vec());
    let mut violations = 0usize;
    let mut per_lambda = vec![0.0f64; lambdas.len()];
    for (t, rows) in trials.into_iter().enumerate() {
        for (k, (seed, lambda, x, l1, s)) in rows.into_iter().enumerate() {
            let q = ratio(s.sum, s.bound);
            violations += usize::from(!s.holds());
            per_lambda[k] = per_lambda[k].max(q);
            report.observe(q);
            report.push_row(row![
                "trial",
                t,
                seed,
                lambda,
                x,
                l1,
                s.sum,
                s.bound,
                q,
                s.holds()
            ]);
        }
    }
    for (lambda, max) in lambdas.iter().zip(&per_lambda) {
        report.record(format!("max_ratio/lambda={lambda}"), *max);
        report.push_row(row!["max", "", "", lambda, "", "", "", "", max, ""]);
    }
    report.assert(Assertion::at_most(
        "counting/violations",
        violations as f64,
        0.0,
    ));
    Ok(report)
}
