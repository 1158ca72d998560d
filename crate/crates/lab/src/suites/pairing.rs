use anyhow::Result;
use lab_core::atoms::atom_bound_check;
use lab_core::spectral::GridSpec;
use rand::Rng;

use super::{per_trial, row};
use crate::config::ExperimentConfig;
use crate::corpus::{random_open_set, rng, trial_seed, CellAtom};
use crate::report::{drift, Assertion, Report};

const COLUMNS: [&str; 13] = [
    "kind",
    "trial",
    "seed",
    "rects",
    "class",
    "p",
    "resolution_exp",
    "pieces",
    "measure",
    "lhs",
    "rhs",
    "ratio",
    "pass",
];

/// Rectangle-count classes `[1, 2], [3, 4], [5, 8], …` up to `max`, each
/// doubling the previous.
pub fn complexity_classes(max: usize) -> Vec<[usize; 2]> {
    let mut classes = vec![[1, 2.min(max.max(1))]];
    let mut hi = 2;
    while hi < max {
        classes.push([hi + 1, (2 * hi).min(max)]);
        hi *= 2;
    }
    classes
}

struct Sample {
    seed: u64,
    rects: usize,
    class: usize,
    p: f64,
    level: usize,
    pieces: usize,
    measure: f64,
    lhs: f64,
    rhs: f64,
    ratio: f64,
}

/// `|⟨f, a⟩| / ‖f‖_{B^{1/p}_{p,p}}` with `f` the band-limited analytic part
/// of the atom, at `K′` and `K′ + 1`. Trials cycle through the complexity
/// classes.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    let s = &config.spectral;
    let ps = &config.analysis.p;
    let delta = config.analysis.delta[0];
    let classes: Vec<[usize; 2]> = complexity_classes(config.geometry.rect_count[1])
        .into_iter()
        .filter(|c| c[1] >= config.geometry.rect_count[0])
        .collect();
    let family = config.geometry.families[0];
    let grids = [
        GridSpec::new(s.window_exp, s.resolution_exp),
        GridSpec::new(s.window_exp, s.resolution_exp + 1),
    ];
    let trials = per_trial(config.trials, |t| {
        let seed = trial_seed(config.seed, t);
        let mut r = rng(seed);
        let class = t % classes.len();
        let [lo, hi] = classes[class];
        let rects = r.random_range(lo.max(config.geometry.rect_count[0])..=hi);
        let omega = random_open_set(&mut r, &config.geometry, family, rects);
        let pattern_seed = r.random();
        let mut out = Vec::new();
        for &p in ps {
            let q = p / (p - 1.0);
            for (level, &grid) in grids.iter().enumerate() {
                let atom = CellAtom::random(&omega, grid, q, delta, pattern_seed)?;
                let f = atom.band_projection(grid, s.band)?;
                let check = atom_bound_check(&f, &atom.atom, p)?;
                out.push(Sample {
                    seed,
                    rects,
                    class,
                    p,
                    level,
                    pieces: atom.cells.len(),
                    measure: omega.measure(),
                    lhs: check.lhs,
                    rhs: check.rhs,
                    ratio: check.ratio,
                });
            }
        }
        Ok(out)
    })?;
    let mut report = Report::new(config, COLUMNS.to_vec());
    // [p][level] and [p][class] maxima
    let mut by_level = vec![[0.0f64; 2]; ps.len()];
    let mut by_class = vec![vec![0.0f64; classes.len()]; ps.len()];
    for (t, samples) in trials.iter().enumerate() {
        for x in samples {
            let pi = ps.iter().position(|p| *p == x.p).expect("p from config");
            by_level[pi][x.level] = by_level[pi][x.level].max(x.ratio);
            if x.level == 0 {
                by_class[pi][x.class] = by_class[pi][x.class].max(x.ratio);
            }
            report.observe(x.ratio);
            report.push_row(row![
                "trial",
                t,
                x.seed,
                x.rects,
                x.class,
                x.p,
                s.resolution_exp + x.level as i32,
                x.pieces,
                x.measure,
                x.lhs,
                x.rhs,
                x.ratio,
                x.ratio.is_finite()
            ]);
        }
    }
    let tol = config.analysis.drift_tolerance;
    for (pi, &p) in ps.iter().enumerate() {
        let [coarse, fine] = by_level[pi];
        report.record(format!("pairing/p={p}/constant"), coarse.max(fine));
        for (level, max) in [coarse, fine].into_iter().enumerate() {
            report.push_row(row![
                "max",
                "",
                "",
                "",
                "",
                p,
                s.resolution_exp + level as i32,
                "",
                "",
                "",
                "",
                max,
                ""
            ]);
        }
        let a = Assertion::at_most(
            format!("pairing/p={p}/refinement_drift"),
            drift(coarse, fine),
            tol,
        );
        report.push_row(row![
            "drift", "", "", "", "", p, "", "", "", coarse, fine, a.value, a.pass
        ]);
        report.assert(a);
        for (c, max) in by_class[pi].iter().enumerate() {
            let [lo, hi] = classes[c];
            report.record(format!("pairing/p={p}/class={lo}-{hi}/max_ratio"), *max);
            report.push_row(row![
                "class_max",
                "",
                "",
                format!("{lo}-{hi}"),
                c,
                p,
                s.resolution_exp,
                "",
                "",
                "",
                "",
                max,
                ""
            ]);
        }
        // Larger Ω lowers the normalized atom's height, so the class maxima
        // may fall; the assertion is that they do not grow.
        for c in 1..classes.len() {
            let (prev, next) = (by_class[pi][c - 1], by_class[pi][c]);
            let [_, hi] = classes[c];
            report.record(
                format!("pairing/p={p}/class_drift/upto={hi}"),
                drift(prev, next),
            );
            let a = Assertion::at_most(
                format!("pairing/p={p}/complexity_growth/upto={hi}"),
                next / prev - 1.0,
                tol,
            );
            report.push_row(row![
                "complexity_growth",
                "",
                "",
                hi,
                c,
                p,
                "",
                "",
                "",
                prev,
                next,
                a.value,
                a.pass
            ]);
            report.assert(a);
        }
    }
    Ok(report)
}
