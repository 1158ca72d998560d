//! Experiment configuration: suite defaults overlaid with a user JSON file.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Counting,
    Journe,
    Geometric,
    Annular,
    Pairing,
    BesovSchatten,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Counting,
        Suite::Journe,
        Suite::Geometric,
        Suite::Annular,
        Suite::Pairing,
        Suite::BesovSchatten,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Counting => "counting",
            Suite::Journe => "journe",
            Suite::Geometric => "geometric",
            Suite::Annular => "annular",
            Suite::Pairing => "pairing",
            Suite::BesovSchatten => "besov-schatten",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .with_context(|| format!("unknown suite `{s}`"))
    }
}

/// Random open-set families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Union of independent dyadic rectangles.
    Rectangles,
    /// Corner-anchored staircase of nested dyadic rectangles.
    Staircase,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Rectangles => "rectangles",
            Family::Staircase => "staircase",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryParams {
    /// Window `[0, 2ᴸ)²`.
    pub window_exp: u32,
    /// Base cells of side `2⁻ᴷ`.
    pub base_exp: u32,
    /// Inclusive range for the number of rectangles (or staircase steps).
    pub rect_count: [usize; 2],
    /// Inclusive range of side scales `n` (side `2ⁿ`).
    pub scale_range: [i32; 2],
    pub families: Vec<Family>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralParams {
    /// Spectral window `[0, 2ᴸ)²`.
    pub window_exp: i32,
    /// `2^{K′}` samples per unit length.
    pub resolution_exp: i32,
    /// Decay exponents `M`.
    pub m_sweep: Vec<f64>,
    /// Hankel truncation sizes.
    pub sizes: Vec<usize>,
    /// Envelope exponent for random symbols.
    pub alpha: f64,
    /// Largest wavenumber (per axis) kept in band-limited test functions.
    pub band: i64,
    /// Cap on sample points per annulus segment.
    pub sample_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisParams {
    pub p: Vec<f64>,
    /// Dual exponents; derived from `p` when absent and checked otherwise.
    #[serde(default)]
    pub q: Option<Vec<f64>>,
    pub delta: Vec<f64>,
    pub beta: Vec<f64>,
    pub u: Vec<u32>,
    pub v: Vec<u32>,
    pub lambda: Vec<f64>,
    /// Points sampled per open set.
    pub x_samples: usize,
    /// Inclusive block-index range.
    pub blocks: [i32; 2],
    /// Inclusive range of side exponents for annular pieces.
    pub side_exps: [i32; 2],
    /// Relative drift allowed between refinement levels.
    pub drift_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub seed: u64,
    pub trials: usize,
    pub geometry: GeometryParams,
    pub spectral: SpectralParams,
    pub analysis: AnalysisParams,
}

fn defaults(suite: Suite) -> Value {
    let mut base = json!({
        "suite": suite,
        "seed": 0,
        "trials": 100,
        "geometry": {
            "window_exp": 3,
            "base_exp": 3,
            "rect_count": [1, 8],
            "scale_range": [-1, 1],
            "families": ["rectangles", "staircase"],
        },
        "spectral": {
            "window_exp": 3,
            "resolution_exp": 3,
            "m_sweep": [2.0, 4.0],
            "sizes": [8, 16, 32],
            "alpha": 1.0,
            "band": 8,
            "sample_cap": 128,
        },
        "analysis": {
            "p": [3.0, 4.0],
            "delta": [0.25, 0.5, 1.0],
            "beta": [0.25, 0.5, 0.75],
            "u": [0, 4, 5, 6],
            "v": [0, 4, 5, 6],
            "lambda": [1.0, 2.0, 4.0, 8.0],
            "x_samples": 20,
            "blocks": [-2, 5],
            "side_exps": [-3, 0],
            "drift_tolerance": 0.25,
        },
    });
    let specific = match suite {
        Suite::Counting => json!({
            "trials": 1000,
            "geometry": { "window_exp": 2, "base_exp": 4 },
        }),
        Suite::Journe | Suite::Geometric => json!({ "trials": 200 }),
        Suite::Annular => json!({
            "trials": 2,
            "analysis": { "p": [3.0], "u": [0, 4, 6], "v": [0, 4, 6] },
        }),
        Suite::Pairing => json!({
            "geometry": { "base_exp": 1, "rect_count": [1, 16], "families": ["rectangles"] },
            "analysis": { "delta": [0.25] },
        }),
        Suite::BesovSchatten => json!({
            "trials": 50,
            "spectral": { "window_exp": 0 },
            "analysis": { "p": [2.0, 4.0] },
        }),
    };
    merge(&mut base, specific);
    base
}

/// Recursive object merge; arrays and scalars in `overlay` replace.
fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

impl ExperimentConfig {
    /// Suite defaults.
    pub fn default_for(suite: Suite) -> Self {
        Self::from_overlay(suite, Value::Object(Default::default())).expect("defaults are valid")
    }

    /// Suite defaults overlaid with `overlay`, then validated. A `suite` key
    /// in the overlay must agree with `suite`.
    pub fn from_overlay(suite: Suite, overlay: Value) -> Result<Self> {
        if let Some(named) = overlay.get("suite") {
            let named: Suite =
                serde_json::from_value(named.clone()).context("config field `suite`")?;
            if named != suite {
                bail!("config is for suite `{named}` but `{suite}` was requested");
            }
        }
        let mut value = defaults(suite);
        merge(&mut value, overlay);
        let config: ExperimentConfig = serde_json::from_value(value).context("invalid config")?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(suite: Suite, path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let overlay: Value =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        Self::from_overlay(suite, overlay)
    }

    /// Dual exponents `q = p/(p−1)`.
    pub fn q(&self) -> Vec<f64> {
        self.analysis.p.iter().map(|p| p / (p - 1.0)).collect()
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(canonical.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.geometry;
        let s = &self.spectral;
        let a = &self.analysis;
        if self.trials == 0 {
            bail!("trials must be positive");
        }
        if g.window_exp + g.base_exp > 12 {
            bail!("geometry grid 2^(L+K) per side exceeds 2^12");
        }
        if g.rect_count[0] > g.rect_count[1] {
            bail!("rect_count range is empty");
        }
        let [lo, hi] = g.scale_range;
        if lo > hi || lo < -(g.base_exp as i32) || hi > g.window_exp as i32 {
            bail!(
                "scale_range [{lo}, {hi}] must lie in [−K, L] = [{}, {}]",
                -(g.base_exp as i32),
                g.window_exp
            );
        }
        if g.families.is_empty() {
            bail!("at least one open-set family is required");
        }
        if s.window_exp + s.resolution_exp < 1 || s.window_exp + s.resolution_exp > 14 {
            bail!("spectral grid needs 1 ≤ L + K′ ≤ 14");
        }
        if s.m_sweep.iter().any(|m| m.is_nan() || *m < 1.0) {
            bail!("every M must be ≥ 1");
        }
        if s.sizes.iter().any(|n| *n < 2 || *n > 32) {
            bail!("Hankel sizes must lie in [2, 32]");
        }
        if s.band < 1 || s.sample_cap < 8 {
            bail!("band ≥ 1 and sample_cap ≥ 8 required");
        }
        if a.p.is_empty() || a.p.iter().any(|p| !(p.is_finite() && *p > 1.0)) {
            bail!("every p must be finite and > 1");
        }
        if let Some(q) = &a.q {
            let derived = self.q();
            if q.len() != derived.len()
                || q.iter()
                    .zip(&derived)
                    .any(|(x, y)| (x - y).abs() > 1e-12 * y)
            {
                bail!("q must equal p/(p−1) for each p: expected {derived:?}, got {q:?}");
            }
        }
        if a.delta.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            bail!("every δ must be positive and finite");
        }
        if a.beta.iter().any(|b| !(*b > 0.0 && *b < 1.0)) {
            bail!("violates β<1 (with β>0): got β = {:?}", a.beta);
        }
        if self.suite == Suite::Pairing {
            if a.p.iter().any(|p| *p <= 2.0) {
                bail!("pairing needs p > 2 so that q = p/(p−1) < 2");
            }
            for &d in &a.delta {
                for &p in &a.p {
                    if d * (p - 1.0) >= 1.0 {
                        bail!("violates β:=δ(p−1)<1 at δ = {d}, p = {p}");
                    }
                }
            }
        }
        if a.u
            .iter()
            .chain(&a.v)
            .any(|u| (1..=3).contains(u) || *u > 12)
        {
            bail!("annulus indices must be 0 or in 4..=12");
        }
        if a.lambda.iter().any(|l| !(l.is_finite() && *l >= 1.0)) {
            bail!("every λ must be finite and ≥ 1");
        }
        if a.blocks[0] > a.blocks[1] || a.side_exps[0] > a.side_exps[1] {
            bail!("block and side ranges must be nonempty");
        }
        if a.drift_tolerance.is_nan() || a.drift_tolerance <= 0.0 {
            bail!("drift_tolerance must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_hash_stably() {
        for suite in Suite::ALL {
            let c = ExperimentConfig::default_for(suite);
            assert_eq!(c.suite, suite);
            assert_eq!(c.hash(), ExperimentConfig::default_for(suite).hash());
            assert_eq!(suite.name().parse::<Suite>().unwrap(), suite);
        }
        assert_eq!(ExperimentConfig::default_for(Suite::Counting).trials, 1000);
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn overlay_replaces_leaves() {
        let c = ExperimentConfig::from_overlay(
            Suite::Journe,
            json!({ "seed": 7, "geometry": { "base_exp": 2 }, "analysis": { "delta": [0.5] } }),
        )
        .unwrap();
        assert_eq!(
            (c.seed, c.geometry.base_exp, c.geometry.window_exp),
            (7, 2, 3)
        );
        assert_eq!(c.analysis.delta, vec![0.5]);
        assert_ne!(
            c.hash(),
            ExperimentConfig::default_for(Suite::Journe).hash()
        );
    }

    #[test]
    fn invariants_enforced() {
        let err = ExperimentConfig::from_overlay(
            Suite::Pairing,
            json!({ "analysis": { "delta": [0.5], "p": [3.0] } }),
        )
        .unwrap_err();
        assert!(err.to_string().contains("β:=δ(p−1)<1"), "{err}");
        let err = ExperimentConfig::from_overlay(
            Suite::Geometric,
            json!({ "analysis": { "beta": [1.0] } }),
        )
        .unwrap_err();
        assert!(err.to_string().contains("β<1"));
        let err = ExperimentConfig::from_overlay(
            Suite::Pairing,
            json!({ "analysis": { "q": [1.4, 1.3] } }),
        )
        .unwrap_err();
        assert!(err.to_string().contains("p/(p−1)"));
        assert!(ExperimentConfig::from_overlay(
            Suite::Pairing,
            json!({ "analysis": { "q": [1.5, 4.0 / 3.0] } })
        )
        .is_ok());
        assert!(
            ExperimentConfig::from_overlay(Suite::Journe, json!({ "suite": "counting" })).is_err()
        );
        assert!(ExperimentConfig::from_overlay(Suite::Journe, json!({ "bogus": 1 })).is_err());
        assert!(ExperimentConfig::from_overlay(
            Suite::Annular,
            json!({ "analysis": { "u": [2] } })
        )
        .is_err());
    }
}
