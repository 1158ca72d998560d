//! Experiment suites. Each returns a [`Report`]; trials run in parallel and
//! rows keep trial order.

mod annular;
mod besov_schatten;
mod counting;
mod geometric;
mod journe;
mod pairing;

use anyhow::Result;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Suite};
use crate::report::Report;

pub use annular::torus_cross_check;
pub use besov_schatten::resolution_for;
pub use pairing::complexity_classes;

/// Builds a CSV row from displayable cells.
macro_rules! row {
    ($($cell:expr),* $(,)?) => {
        vec![$($cell.to_string()),*]
    };
}
pub(crate) use row;

pub fn run_suite(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    match config.suite {
        Suite::Counting => counting::run(config),
        Suite::Journe => journe::run(config),
        Suite::Geometric => geometric::run(config),
        Suite::Annular => annular::run(config),
        Suite::Pairing => pairing::run(config),
        Suite::BesovSchatten => besov_schatten::run(config),
    }
}

/// `f(trial)` for every trial, in trial order.
pub(crate) fn per_trial<T, F>(trials: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    (0..trials).into_par_iter().map(&f).collect()
}

/// `lhs / rhs`, zero when `lhs` vanishes.
pub(crate) fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}
