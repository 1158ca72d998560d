use super::blocks::{block_project_with, Axis, BlockIndex};
use super::bump::{BumpVariant, SpectralBump};
use super::grid::GridFunction;
use crate::atoms::check_piece_values;
use crate::error::{check_exponent, LabError, Result};
use crate::geometry::{pow2, product_annulus, DyadicInterval, DyadicRectangle};

/// `(m_i(I), θ_u(i, I))` with `m_i(I) = min(1, 2ⁱ|I|)` and
/// `θ_u(i, I) = (1 + 2ᵘ 2ⁱ |I|)^{−M}`, `θ₀ = 1`.
pub fn decay_profile(i: i32, interval: &DyadicInterval, u: u32, m_exp: f64) -> Result<(f64, f64)> {
    check_exponent("M", m_exp, m_exp >= 1.0, "[1, ∞)")?;
    let t = pow2(i + interval.scale());
    let m = t.min(1.0);
    let theta = match u {
        0 => 1.0,
        1..=3 => return Err(LabError::ExcludedAnnulus(u)),
        _ => (1.0 + pow2(u as i32) * t).powf(-m_exp),
    };
    Ok((m, theta))
}

/// Terms of the `A_u` series below this size are dropped.
const SERIES_CUTOFF: f64 = 1e-18;

/// `A_u(I) = (Σ_i [2^{−i/p} m_i(I) θ_u(i, I)]^q)^{1/q}` with `q = p/(p−1)`.
///
/// The summation window is fixed in `t = i + log₂|I|`, where the terms are
/// `2^{t(1−1/p)}`-small below and `2^{−t/p}`-small above, so the scaling
/// `A_u(I) = |I|^{1/p} A_u([0, 1))` holds term by term.
pub fn a_u(interval: &DyadicInterval, u: u32, p: f64, m_exp: f64) -> Result<f64> {
    check_exponent("p", p, p > 1.0, "(1, ∞)")?;
    let q = p / (p - 1.0);
    let cutoff = SERIES_CUTOFF.log2();
    let t_lo = (cutoff / (1.0 - 1.0 / p)).floor() as i32 - 1;
    let t_hi = (-p * cutoff).ceil() as i32 + 1;
    let n = interval.scale();
    let mut sum = 0.0;
    for i in (t_lo - n)..=(t_hi - n) {
        let (m, theta) = decay_profile(i, interval, u, m_exp)?;
        sum += (2f64.powf(-i as f64 / p) * m * theta).powf(q);
    }
    Ok(sum.powf(1.0 / q))
}

/// Reusable evaluation of the annular-decay ratio for one piece and block.
#[derive(Debug, Clone)]
pub struct DecayProbe {
    rect: DyadicRectangle,
    block: BlockIndex,
    piece: GridFunction,
    filtered: GridFunction,
}

impl DecayProbe {
    pub fn new(piece: &GridFunction, rect: &DyadicRectangle, block: BlockIndex) -> Result<Self> {
        check_piece_values(piece, rect)?;
        // ψ̃ is real, so the adjoint multiplier equals the multiplier itself.
        let filtered = block_project_with(
            &SpectralBump::default(),
            &piece.spectrum(),
            block,
            BumpVariant::Tilde,
            Axis::Both,
        );
        Ok(DecayProbe {
            rect: *rect,
            block,
            piece: piece.clone(),
            filtered,
        })
    }

    pub fn filtered(&self) -> &GridFunction {
        &self.filtered
    }

    /// `‖Δ̃*_{i,j} a_R‖_{L^q(E_{u,v}(R))} / (m_i m_j θ_u θ_v ‖a_R‖_q)`.
    pub fn ratio(&self, u: u32, v: u32, q: f64, m_exp: f64) -> Result<f64> {
        check_exponent("q", q, q >= 1.0, "[1, ∞)")?;
        let (mi, tu) = decay_profile(self.block.i, &self.rect.first, u, m_exp)?;
        let (mj, tv) = decay_profile(self.block.j, &self.rect.second, v, m_exp)?;
        let region = product_annulus(&self.rect, u, v)?;
        let norm = self.piece.lp_norm(q);
        if norm == 0.0 {
            return Ok(0.0);
        }
        let lhs = self.filtered.local_norm(&region, q)?;
        Ok(lhs / (mi * mj * tu * tv * norm))
    }
}

pub fn annular_decay_check(
    piece: &GridFunction,
    rect: &DyadicRectangle,
    block: BlockIndex,
    u: u32,
    v: u32,
    q: f64,
    m_exp: f64,
) -> Result<f64> {
    DecayProbe::new(piece, rect, block)?.ratio(u, v, q, m_exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atoms::haar_values;
    use crate::spectral::GridSpec;

    #[test]
    fn profile_examples() {
        let unit = DyadicInterval::new(0, 0);
        assert_eq!(decay_profile(0, &unit, 0, 3.0).unwrap(), (1.0, 1.0));
        assert_eq!(decay_profile(0, &unit, 4, 2.0).unwrap(), (1.0, 1.0 / 289.0));
        assert_eq!(decay_profile(-3, &unit, 0, 1.0).unwrap().0, 0.125);
        assert_eq!(
            decay_profile(0, &unit, 2, 1.0),
            Err(LabError::ExcludedAnnulus(2))
        );
        assert!(decay_profile(0, &unit, 0, 0.5).is_err());
    }

    #[test]
    fn a_u_scaling_identity() {
        for (u, p, m) in [(0, 3.0, 2.0), (4, 2.0, 4.0), (7, 4.0, 8.0)] {
            let unit = a_u(&DyadicInterval::new(0, 0), u, p, m).unwrap();
            for scale in -3..=3 {
                let i = DyadicInterval::new(5, scale);
                let scaled = a_u(&i, u, p, m).unwrap() / pow2(scale).powf(1.0 / p);
                assert!((scaled - unit).abs() <= 1e-10 * unit, "u={u} scale={scale}");
            }
        }
        assert!(a_u(&DyadicInterval::new(0, 0), 0, 1.0, 2.0).is_err());
    }

    /// Independent oracle: sum over i directly with a wide symmetric window.
    #[test]
    fn a_u_regression_value() {
        let (p, q, m) = (2.0f64, 2.0f64, 4.0f64);
        let mut oracle = 0.0;
        for i in -400..=400 {
            let t = 2f64.powi(i);
            let term = 2f64.powf(-i as f64 / p) * t.min(1.0) * (1.0 + 16.0 * t).powf(-m);
            oracle += term.powf(q);
        }
        let oracle = oracle.powf(1.0 / q);
        let got = a_u(&DyadicInterval::new(0, 0), 4, p, m).unwrap();
        assert!((got - oracle).abs() <= 1e-14 * oracle, "{got} vs {oracle}");
    }

    #[test]
    fn a_u_decays_like_two_to_minus_u_over_q() {
        let p = 3.0;
        let q = 1.5;
        let values: Vec<f64> = (4..=12)
            .map(|u| {
                a_u(&DyadicInterval::new(0, 0), u, p, 2.0).unwrap() * pow2(u as i32).powf(1.0 / q)
            })
            .collect();
        let max = values.iter().cloned().fold(0.0, f64::max);
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min < 2.0, "{values:?}");
    }

    fn centered_probe(level: i32, block: BlockIndex) -> DecayProbe {
        // window of side 64|I| with R near its center, 4 cells per side of R
        let grid = GridSpec::new(6 + level, 2 - level);
        let side = pow2(level);
        let m = pow2(6 + level) / side / 2.0;
        let r = DyadicRectangle::new(
            DyadicInterval::new(m as i64, level),
            DyadicInterval::new(m as i64, level),
        );
        let values = haar_values(grid, &r);
        DecayProbe::new(&values, &r, block).unwrap()
    }

    #[test]
    fn ratio_is_dilation_invariant() {
        let unit = centered_probe(0, BlockIndex::new(0, 0));
        let small = centered_probe(-3, BlockIndex::new(3, 3));
        for (u, v) in [(0, 0), (4, 0), (4, 5)] {
            let a = unit.ratio(u, v, 1.5, 2.0).unwrap();
            let b = small.ratio(u, v, 1.5, 2.0).unwrap();
            assert!(a.is_finite() && a > 0.0);
            assert!((a - b).abs() <= 0.05 * a, "({u},{v}): {a} vs {b}");
        }
    }

    #[test]
    fn zero_piece_gives_zero_ratio() {
        let grid = GridSpec::new(3, 2);
        let r = DyadicRectangle::new(DyadicInterval::new(3, 0), DyadicInterval::new(3, 0));
        let zero = GridFunction::zeros(grid);
        assert_eq!(
            annular_decay_check(&zero, &r, BlockIndex::new(0, 0), 0, 0, 2.0, 2.0).unwrap(),
            0.0
        );
    }
}
