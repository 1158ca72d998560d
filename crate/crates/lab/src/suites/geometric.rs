use std::collections::BTreeMap;

use anyhow::Result;
use lab_core::geometry::{pow2, OpenSetGeometry};

use super::journe::corpus;
use super::{per_trial, ratio, row};
use crate::config::{ExperimentConfig, Family};
use crate::corpus::{random_point, rng};
use crate::report::{drift, Assertion, Report};

const COLUMNS: [&str; 14] = [
    "kind", "trial", "seed", "family", "base_exp", "beta", "u", "v", "x1", "x2", "lhs", "rhs",
    "ratio", "pass",
];

struct Sample {
    family: Family,
    seed: u64,
    level: usize,
    base_exp: u32,
    beta: f64,
    u: u32,
    v: u32,
    x: (f64, f64),
    sum: f64,
    rhs: f64,
}

/// `Σ_{R ∈ M₂(Ω), x ∈ 2ᵘI×2ᵛJ} γ₁(R)^β|R|` over `2^{u+v}|Ω|`, maximized over
/// sampled points; one row per (Ω, level, β, u, v).
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    let a = &config.analysis;
    let window = f64::from(1u32 << config.geometry.window_exp);
    let trials = per_trial(config.trials, |t| {
        let mut out = Vec::new();
        for &family in &config.geometry.families {
            let (seed, sets) = corpus(config, t, family);
            let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
            let points: Vec<(f64, f64)> = (0..a.x_samples)
                .map(|_| random_point(&mut r, window))
                .collect();
            for (level, set) in sets.into_iter().enumerate() {
                let base_exp = set.base_exp();
                let measure = set.measure();
                let geometry = OpenSetGeometry::new(set);
                for &beta in &a.beta {
                    for &u in &a.u {
                        for &v in &a.v {
                            let rhs = pow2((u + v) as i32) * measure;
                            let mut best = (0.0, points.first().copied().unwrap_or((0.0, 0.0)));
                            for &x in &points {
                                let sum = geometry.geometric_sum(x, u, v, beta)?;
                                if sum > best.0 {
                                    best = (sum, x);
                                }
                            }
                            out.push(Sample {
                                family,
                                seed,
                                level,
                                base_exp,
                                beta,
                                u,
                                v,
                                x: best.1,
                                sum: best.0,
                                rhs,
                            });
                        }
                    }
                }
            }
        }
        Ok(out)
    })?;
    let mut report = Report::new(config, COLUMNS.to_vec());
    let mut maxima: BTreeMap<(&str, usize), [f64; 2]> = BTreeMap::new();
    for (t, samples) in trials.iter().enumerate() {
        for s in samples {
            let q = ratio(s.sum, s.rhs);
            let bi = a
                .beta
                .iter()
                .position(|b| *b == s.beta)
                .expect("β from config");
            let slot = maxima.entry((s.family.name(), bi)).or_insert([0.0; 2]);
            slot[s.level] = slot[s.level].max(q);
            report.observe(q);
            report.push_row(row![
                "trial",
                t,
                s.seed,
                s.family.name(),
                s.base_exp,
                s.beta,
                s.u,
                s.v,
                s.x.0,
                s.x.1,
                s.sum,
                s.rhs,
                q,
                q.is_finite()
            ]);
        }
    }
    let k = config.geometry.base_exp;
    let mut per_beta = vec![0.0f64; a.beta.len()];
    for ((family, bi), [coarse, fine]) in maxima {
        let beta = a.beta[bi];
        per_beta[bi] = per_beta[bi].max(coarse).max(fine);
        let key = format!("geometric/{family}/beta={beta}");
        report.push_row(row![
            "max", "", "", family, k, beta, "", "", "", "", "", "", coarse, ""
        ]);
        report.push_row(row![
            "max",
            "",
            "",
            family,
            k + 1,
            beta,
            "",
            "",
            "",
            "",
            "",
            "",
            fine,
            ""
        ]);
        let check = Assertion::at_most(
            format!("{key}/refinement_drift"),
            drift(coarse, fine),
            a.drift_tolerance,
        );
        report.push_row(row![
            "drift",
            "",
            "",
            family,
            "",
            beta,
            "",
            "",
            "",
            "",
            coarse,
            fine,
            check.value,
            check.pass
        ]);
        report.assert(check);
    }
    for (beta, max) in a.beta.iter().zip(per_beta) {
        report.record(format!("geometric/beta={beta}/constant"), max);
    }
    Ok(report)
}
