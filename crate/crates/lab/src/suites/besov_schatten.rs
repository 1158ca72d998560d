use anyhow::Result;
use lab_core::hankel::{besov_lattice_norms, hankel_matrix, schatten_norm};

use super::{per_trial, row};
use crate::config::ExperimentConfig;
use crate::corpus::{random_symbol, trial_seed};
use crate::report::{Assertion, Report};

const COLUMNS: [&str; 10] = [
    "kind",
    "trial",
    "seed",
    "n",
    "p",
    "resolution_exp",
    "lhs",
    "rhs",
    "ratio",
    "pass",
];

/// Smallest `K′ ≥ floor` whose grid holds lattice index `2N − 2` below the
/// Nyquist wavenumber at window exponent `L ≥ 0`.
pub fn resolution_for(n: usize, window_exp: i32, floor: i32) -> i32 {
    let top = ((2 * n - 2) as u64) << window_exp.max(0);
    let mut kp = floor.max(1 - window_exp);
    while (1u64 << (window_exp + kp - 1)) <= top {
        kp += 1;
    }
    kp
}

/// `‖H_φ‖_{S^p} / ‖φ‖_{B^{1/p}_{p,p}}` on random symbols per size `N`; the
/// spread `max/min` may grow by at most the tolerance per step in `N`.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    let s = &config.spectral;
    let ps = &config.analysis.p;
    let mut report = Report::new(config, COLUMNS.to_vec());
    let mut spreads: Vec<Vec<f64>> = Vec::new();
    for (ni, &n) in s.sizes.iter().enumerate() {
        let kp = resolution_for(n, s.window_exp, s.resolution_exp);
        let rows = per_trial(config.trials, |t| {
            let seed = trial_seed(config.seed, ni * config.trials + t);
            let symbol = random_symbol(seed, n, s.alpha, true);
            let h = hankel_matrix(&symbol);
            let besov = besov_lattice_norms(&symbol, ps, s.window_exp, kp)?;
            ps.iter()
                .zip(besov)
                .map(|(&p, b)| Ok((seed, p, schatten_norm(&h, p)?, b)))
                .collect::<Result<Vec<_>>>()
        })?;
        let mut lo = vec![f64::INFINITY; ps.len()];
        let mut hi = vec![0.0f64; ps.len()];
        let mut positive = true;
        for (t, samples) in rows.into_iter().enumerate() {
            for (k, (seed, p, schatten, besov)) in samples.into_iter().enumerate() {
                let ratio = schatten / besov;
                let ok = ratio.is_finite() && ratio > 0.0;
                positive &= ok;
                lo[k] = lo[k].min(ratio);
                hi[k] = hi[k].max(ratio);
                report.observe(ratio);
                report.push_row(row!["trial", t, seed, n, p, kp, schatten, besov, ratio, ok]);
            }
        }
        report.assert(Assertion {
            name: format!("besov_schatten/n={n}/ratios_positive_finite"),
            value: f64::from(u8::from(positive)),
            limit: 1.0,
            pass: positive,
        });
        let spread: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| h / l).collect();
        for (k, &p) in ps.iter().enumerate() {
            report.record(format!("besov_schatten/n={n}/p={p}/min_ratio"), lo[k]);
            report.record(format!("besov_schatten/n={n}/p={p}/max_ratio"), hi[k]);
            report.record(format!("besov_schatten/n={n}/p={p}/spread"), spread[k]);
            report.push_row(row![
                "spread", "", "", n, p, kp, lo[k], hi[k], spread[k], ""
            ]);
        }
        spreads.push(spread);
    }
    let tol = config.analysis.drift_tolerance;
    for w in 1..s.sizes.len() {
        for (k, &p) in ps.iter().enumerate() {
            let growth = spreads[w][k] / spreads[w - 1][k] - 1.0;
            let name = format!(
                "besov_schatten/p={p}/spread_growth/n={}->{}",
                s.sizes[w - 1],
                s.sizes[w]
            );
            let a = Assertion::at_most(name, growth, tol);
            report.push_row(row![
                "growth",
                "",
                "",
                s.sizes[w],
                p,
                "",
                spreads[w - 1][k],
                spreads[w][k],
                growth,
                a.pass
            ]);
            report.assert(a);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_clears_nyquist() {
        assert_eq!(resolution_for(4, 0, 1), 4);
        assert_eq!(resolution_for(32, 0, 3), 7);
        assert_eq!(resolution_for(4, 1, 1), 4);
        assert_eq!(resolution_for(4, 0, 6), 6);
    }
}
