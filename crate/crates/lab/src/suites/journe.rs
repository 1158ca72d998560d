use std::collections::BTreeMap;

use anyhow::Result;
use lab_core::geometry::{Direction, GridOpenSet, OpenSetGeometry};
use rand::Rng;

use super::{per_trial, ratio, row};
use crate::config::{ExperimentConfig, Family};
use crate::corpus::{random_open_set, rng, trial_seed};
use crate::report::{drift, Assertion, Report};

const COLUMNS: [&str; 12] = [
    "kind",
    "trial",
    "seed",
    "family",
    "base_exp",
    "direction",
    "delta",
    "measure",
    "lhs",
    "rhs",
    "ratio",
    "pass",
];

/// One open set per trial and family, evaluated at `K` and `K + 1`.
pub(crate) fn corpus(
    config: &ExperimentConfig,
    t: usize,
    family: Family,
) -> (u64, [GridOpenSet; 2]) {
    let seed = trial_seed(config.seed, t);
    let mut r = rng(seed);
    let [lo, hi] = config.geometry.rect_count;
    let count = r.random_range(lo..=hi);
    let coarse = random_open_set(&mut r, &config.geometry, family, count);
    let fine = coarse.refined();
    (seed, [coarse, fine])
}

struct Sample {
    family: Family,
    seed: u64,
    level: usize,
    base_exp: u32,
    direction: Direction,
    delta: f64,
    measure: f64,
    sum: f64,
    enlargement: f64,
}

/// `Σ_{R ∈ M_d(Ω)} γ(R)^{−δ}|R|` over `|Ω|`, per family, direction and δ;
/// asserts refinement stability of the maxima.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    let families = &config.geometry.families;
    let deltas = &config.analysis.delta;
    let trials = per_trial(config.trials, |t| {
        let mut out = Vec::new();
        for &family in families {
            let (seed, sets) = corpus(config, t, family);
            for (level, set) in sets.into_iter().enumerate() {
                let base_exp = set.base_exp();
                let measure = set.measure();
                let geometry = OpenSetGeometry::new(set);
                let enlargement = geometry.enlargement_ratio();
                for direction in [Direction::First, Direction::Second] {
                    for &delta in deltas {
                        let sum = geometry.journe_sum(delta, direction)?;
                        out.push(Sample {
                            family,
                            seed,
                            level,
                            base_exp,
                            direction,
                            delta,
                            measure,
                            sum,
                            enlargement,
                        });
                    }
                }
            }
        }
        Ok(out)
    })?;
    let mut report = Report::new(config, COLUMNS.to_vec());
    // (family, direction, δ index) → max ratio per level
    let mut maxima: BTreeMap<(&str, u8, usize), [f64; 2]> = BTreeMap::new();
    let mut enlargement = 0.0f64;
    for (t, samples) in trials.iter().enumerate() {
        for s in samples {
            let q = ratio(s.sum, s.measure);
            let d = s.direction.index();
            let di = deltas
                .iter()
                .position(|x| *x == s.delta)
                .expect("δ from config");
            let slot = maxima.entry((s.family.name(), d, di)).or_insert([0.0; 2]);
            slot[s.level] = slot[s.level].max(q);
            enlargement = enlargement.max(s.enlargement);
            report.observe(q);
            report.push_row(row![
                "trial",
                t,
                s.seed,
                s.family.name(),
                s.base_exp,
                d,
                s.delta,
                s.measure,
                s.sum,
                s.measure,
                q,
                q.is_finite()
            ]);
        }
    }
    let k = config.geometry.base_exp;
    let tol = config.analysis.drift_tolerance;
    for ((family, d, di), [coarse, fine]) in maxima {
        let delta = deltas[di];
        let change = drift(coarse, fine);
        let key = format!("journe/{family}/d{d}/delta={delta}");
        report.record(format!("{key}/max_ratio"), coarse.max(fine));
        report.push_row(row![
            "max", "", "", family, k, d, delta, "", "", "", coarse, ""
        ]);
        report.push_row(row![
            "max",
            "",
            "",
            family,
            k + 1,
            d,
            delta,
            "",
            "",
            "",
            fine,
            ""
        ]);
        let a = Assertion::at_most(format!("{key}/refinement_drift"), change, tol);
        report.push_row(row![
            "drift", "", "", family, "", d, delta, "", coarse, fine, change, a.pass
        ]);
        report.assert(a);
    }
    report.record("journe/max_enlargement_ratio", enlargement);
    Ok(report)
}
