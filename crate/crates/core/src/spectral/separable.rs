//! Annular decay of cell-valued pieces on the real line, one axis at a time.
//!
//! A piece that is constant on the cells of `3R` is a finite sum of
//! translated cell indicators, and `Δ̃_{i,j}` acts on each factor separately.
//! Each axis only needs `K̃_i ∗ χ_{[0,w)}`, computed from its exact Fourier
//! transform on a long periodic line with a resolution tied to `|I|` and
//! `2⁻ⁱ`. Rescaling `(R, i, j)` to `(λ₁I × λ₂J, i − log₂λ₁, j − log₂λ₂)`
//! rescales every sample point, so the computed ratios are exactly dilation
//! invariant.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

use super::blocks::BlockIndex;
use super::bump::{BumpVariant, SpectralBump};
use super::decay::decay_profile;
use crate::error::{check_exponent, Result};
use crate::geometry::{annulus, pow2, DyadicInterval, DyadicRectangle, Span};
use crate::spectral::{GridFunction, GridSpec};

/// A piece constant on a `3k × 3k` array of cells covering `3R`; row index
/// follows `x₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellPiece {
    rect: DyadicRectangle,
    per_side: usize,
    values: Vec<f64>,
    factors: Option<(Vec<f64>, Vec<f64>)>,
}

impl CellPiece {
    /// `h_I ⊗ h_J` at unit height, two cells per side of `R`.
    pub fn haar(rect: DyadicRectangle) -> Self {
        let factor = vec![0.0, 0.0, 1.0, -1.0, 0.0, 0.0];
        let values = factor
            .iter()
            .flat_map(|b| factor.iter().map(move |a| a * b))
            .collect();
        CellPiece {
            rect,
            per_side: 2,
            values,
            factors: Some((factor.clone(), factor)),
        }
    }

    /// Seeded uniform cell values with row means, then column means, removed.
    pub fn random(rect: DyadicRectangle, per_side: usize, seed: u64) -> Self {
        assert!(
            per_side.is_power_of_two(),
            "cells per side must be a power of two"
        );
        let n = 3 * per_side;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        remove_line_means(&mut values, n);
        CellPiece {
            rect,
            per_side,
            values,
            factors: None,
        }
    }

    /// Like [`CellPiece::random`] but with values only on the `k × k` cells
    /// of `R` itself.
    pub fn random_inner(rect: DyadicRectangle, per_side: usize, seed: u64) -> Self {
        assert!(
            per_side.is_power_of_two(),
            "cells per side must be a power of two"
        );
        let k = per_side;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut block: Vec<f64> = (0..k * k).map(|_| rng.random_range(-1.0..1.0)).collect();
        remove_line_means(&mut block, k);
        let n = 3 * k;
        let mut values = vec![0.0; n * n];
        for r in 0..k {
            values[(r + k) * n + k..(r + k) * n + 2 * k]
                .copy_from_slice(&block[r * k..(r + 1) * k]);
        }
        CellPiece {
            rect,
            per_side,
            values,
            factors: None,
        }
    }

    /// The same cell values carried by another rectangle.
    pub fn moved(&self, rect: DyadicRectangle) -> Self {
        CellPiece {
            rect,
            ..self.clone()
        }
    }

    pub fn rect(&self) -> &DyadicRectangle {
        &self.rect
    }

    pub fn per_side(&self) -> usize {
        self.per_side
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn cells(&self) -> usize {
        3 * self.per_side
    }

    fn cell_width(&self, side: &DyadicInterval) -> f64 {
        side.length() / self.per_side as f64
    }

    pub fn lq_norm(&self, q: f64) -> f64 {
        let area = self.cell_width(&self.rect.first) * self.cell_width(&self.rect.second);
        let s: f64 = self.values.iter().map(|v| v.abs().powf(q)).sum();
        (area * s).powf(1.0 / q)
    }

    /// Samples the piece on `grid` (value of the cell holding each sample
    /// point, zero off `3R`).
    pub fn sample(&self, grid: GridSpec) -> GridFunction {
        let (first, second) = self.rect.triple();
        let w1 = self.cell_width(&self.rect.first);
        let w2 = self.cell_width(&self.rect.second);
        let n = self.cells();
        GridFunction::from_fn(grid, |x1, x2| {
            if !first.contains(x1) || !second.contains(x2) {
                return Complex64::new(0.0, 0.0);
            }
            let c = ((x1 - first.lo) / w1).floor() as usize;
            let r = ((x2 - second.lo) / w2).floor() as usize;
            Complex64::new(self.values[r.min(n - 1) * n + c.min(n - 1)], 0.0)
        })
    }

    /// Exact coefficient `W⁻² ∫ a(x) e^{−2πi k·x/W} dx` on the torus of side
    /// `W`, with `3R` taken inside `[0, W)²`.
    pub fn torus_coefficient(&self, window: f64, k1: i64, k2: i64) -> Complex64 {
        let n = self.cells();
        let axis = |side: &DyadicInterval, k: i64| -> Vec<Complex64> {
            let w = self.cell_width(side);
            let lo = side.start() - side.length();
            (0..n)
                .map(|m| cell_transform(lo + m as f64 * w, w, k as f64 / window))
                .collect()
        };
        let e1 = axis(&self.rect.first, k1);
        let e2 = axis(&self.rect.second, k2);
        let mut sum = Complex64::new(0.0, 0.0);
        for (r, b) in e2.iter().enumerate() {
            let row: Complex64 = e1
                .iter()
                .zip(&self.values[r * n..(r + 1) * n])
                .map(|(a, v)| a * v)
                .sum();
            sum += row * b;
        }
        sum / (window * window)
    }
}

/// Row means, then column means, of an `n × n` array removed in place.
fn remove_line_means(values: &mut [f64], n: usize) {
    for r in 0..n {
        let mean = values[r * n..(r + 1) * n].iter().sum::<f64>() / n as f64;
        values[r * n..(r + 1) * n]
            .iter_mut()
            .for_each(|v| *v -= mean);
    }
    for c in 0..n {
        let mean = (0..n).map(|r| values[r * n + c]).sum::<f64>() / n as f64;
        (0..n).for_each(|r| values[r * n + c] -= mean);
    }
}

/// `∫_a^{a+w} e^{−2πiνx} dx`.
fn cell_transform(a: f64, w: f64, nu: f64) -> Complex64 {
    if nu == 0.0 {
        return Complex64::new(w, 0.0);
    }
    let tau = std::f64::consts::TAU;
    (Complex64::from_polar(1.0, -tau * nu * a) - Complex64::from_polar(1.0, -tau * nu * (a + w)))
        / Complex64::new(0.0, tau * nu)
}

/// Periodic line of length `W = 2^window_exp` sampled every `h = 2^step_exp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct AxisGrid {
    step_exp: i32,
    window_exp: i32,
}

impl AxisGrid {
    /// Steps resolve both the cells and the block frequency; the line is long
    /// enough for the outermost annulus and the kernel tail.
    fn for_axis(side: &DyadicInterval, per_side: usize, i: i32) -> AxisGrid {
        let cell_exp = side.scale() - per_side.trailing_zeros() as i32;
        let step_exp = (cell_exp - 3).min(-i - 4);
        let window_exp = (side.scale() + 8).max(-i + 8);
        AxisGrid {
            step_exp,
            window_exp,
        }
    }

    fn len(&self) -> usize {
        1usize << (self.window_exp - self.step_exp)
    }

    fn step(&self) -> f64 {
        pow2(self.step_exp)
    }
}

/// `(K̃_i ∗ χ_{[0,w)})(n·h)` for `n = 0..N`, periodic.
fn cell_response(bump: &SpectralBump, i: i32, w: f64, grid: AxisGrid) -> Vec<Complex64> {
    let n = grid.len();
    let window = pow2(grid.window_exp);
    let tau = std::f64::consts::TAU;
    let mut coeffs: Vec<Complex64> = (0..n)
        .map(|k| {
            let k = if k < n / 2 {
                k as f64
            } else {
                k as f64 - n as f64
            };
            let xi = k / window;
            let m = bump.scaled(BumpVariant::Tilde, i, xi);
            if m == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            // ∫₀ʷ e^{−2πiξx} dx
            let hat = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -tau * xi * w))
                / Complex64::new(0.0, tau * xi);
            hat * (m / window)
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut coeffs);
    coeffs
}

/// For each retained sample point of `spans`, the responses of all cells;
/// points are thinned to at most `cap` per span by a power-of-two stride.
struct AxisSamples {
    weight: f64,
    rows: Vec<Vec<Complex64>>,
}

fn axis_samples(
    response: &[Complex64],
    grid: AxisGrid,
    cell_starts: &[f64],
    spans: &[Span],
    cap: usize,
) -> AxisSamples {
    let h = grid.step();
    let n = grid.len() as i64;
    let mut stride = 1usize;
    let longest = spans
        .iter()
        .map(|s| (s.length() / h).ceil() as usize)
        .max()
        .unwrap_or(0);
    while longest / stride > cap {
        stride *= 2;
    }
    let mut rows = Vec::new();
    for span in spans {
        let start = (span.lo / h).ceil() as i64;
        let end = (span.hi / h).ceil() as i64;
        let mut j = start;
        while j < end {
            let row = cell_starts
                .iter()
                .map(|a| response[(j - (a / h).round() as i64).rem_euclid(n) as usize])
                .collect();
            rows.push(row);
            j += stride as i64;
        }
    }
    AxisSamples {
        weight: h * stride as f64,
        rows,
    }
}

/// Evaluates `∫_{E_{u,v}(R)} |Δ̃_{i,j} a|^q` for one piece and block.
#[derive(Debug, Clone)]
pub struct SeparableProbe {
    piece: CellPiece,
    block: BlockIndex,
    grids: (AxisGrid, AxisGrid),
    responses: (Vec<Complex64>, Vec<Complex64>),
    cap: usize,
}

impl SeparableProbe {
    /// `cap` bounds the number of sample points per annulus segment used for
    /// non-tensor pieces.
    pub fn new(piece: &CellPiece, block: BlockIndex, cap: usize) -> Self {
        let bump = SpectralBump::default();
        let rect = piece.rect;
        let g1 = AxisGrid::for_axis(&rect.first, piece.per_side, block.i);
        let g2 = AxisGrid::for_axis(&rect.second, piece.per_side, block.j);
        let r1 = cell_response(&bump, block.i, piece.cell_width(&rect.first), g1);
        let r2 = cell_response(&bump, block.j, piece.cell_width(&rect.second), g2);
        SeparableProbe {
            piece: piece.clone(),
            block,
            grids: (g1, g2),
            responses: (r1, r2),
            cap,
        }
    }

    fn starts(&self, side: &DyadicInterval) -> Vec<f64> {
        let w = self.piece.cell_width(side);
        let lo = side.start() - side.length();
        (0..self.piece.cells()).map(|m| lo + m as f64 * w).collect()
    }

    /// `∫_{E_{u,v}(R)} |Δ̃_{i,j} a|^q`.
    pub fn integral(&self, u: u32, v: u32, q: f64) -> Result<f64> {
        check_exponent("q", q, q >= 1.0, "[1, ∞)")?;
        let rect = self.piece.rect;
        let spans1 = annulus(&rect.first, u)?;
        let spans2 = annulus(&rect.second, v)?;
        let starts1 = self.starts(&rect.first);
        let starts2 = self.starts(&rect.second);
        if let Some((a, b)) = &self.piece.factors {
            let one_axis = |response: &[Complex64],
                            grid: AxisGrid,
                            starts: &[f64],
                            spans: &[Span],
                            f: &[f64]| {
                let s = axis_samples(response, grid, starts, spans, usize::MAX);
                s.rows
                    .iter()
                    .map(|row| {
                        row.iter()
                            .zip(f)
                            .map(|(g, c)| g * c)
                            .sum::<Complex64>()
                            .norm()
                            .powf(q)
                    })
                    .sum::<f64>()
                    * s.weight
            };
            let x = one_axis(&self.responses.0, self.grids.0, &starts1, &spans1, a);
            let y = one_axis(&self.responses.1, self.grids.1, &starts2, &spans2, b);
            return Ok(x * y);
        }
        let s1 = axis_samples(&self.responses.0, self.grids.0, &starts1, &spans1, self.cap);
        let s2 = axis_samples(&self.responses.1, self.grids.1, &starts2, &spans2, self.cap);
        let n = self.piece.cells();
        let values = &self.piece.values;
        // B[x₁][r] = Σ_c a[r][c] g₁(x₁ − a_c)
        let partial: Vec<Vec<Complex64>> = s1
            .rows
            .iter()
            .map(|g| {
                (0..n)
                    .map(|r| (0..n).map(|c| g[c] * values[r * n + c]).sum())
                    .collect()
            })
            .collect();
        let mut total = 0.0;
        for b in &partial {
            for g2 in &s2.rows {
                let z: Complex64 = b.iter().zip(g2).map(|(x, y)| x * y).sum();
                total += z.norm().powf(q);
            }
        }
        Ok(total * s1.weight * s2.weight)
    }

    /// `(∫_{E_{u,v}} |Δ̃ a|^q)^{1/q} / (m_i m_j θ_u θ_v ‖a‖_q)`.
    pub fn ratio(&self, u: u32, v: u32, q: f64, m_exp: f64) -> Result<f64> {
        let lhs = self.integral(u, v, q)?.powf(1.0 / q);
        self.ratio_from_integral(lhs, u, v, q, m_exp)
    }

    /// Ratio from an already computed `L^q(E_{u,v})` norm.
    pub fn ratio_from_integral(&self, lhs: f64, u: u32, v: u32, q: f64, m_exp: f64) -> Result<f64> {
        let rect = self.piece.rect;
        let (mi, tu) = decay_profile(self.block.i, &rect.first, u, m_exp)?;
        let (mj, tv) = decay_profile(self.block.j, &rect.second, v, m_exp)?;
        let norm = self.piece.lq_norm(q);
        if norm == 0.0 {
            return Ok(0.0);
        }
        Ok(lhs / (mi * mj * tu * tv * norm))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::DecayProbe;

    fn square(position: i64, scale: i32) -> DyadicRectangle {
        DyadicRectangle::new(
            DyadicInterval::new(position, scale),
            DyadicInterval::new(position, scale),
        )
    }

    #[test]
    fn random_cells_cancel() {
        let p = CellPiece::random(square(0, 0), 4, 7);
        let n = 12;
        for r in 0..n {
            let row: f64 = p.values()[r * n..(r + 1) * n].iter().sum();
            let col: f64 = (0..n).map(|k| p.values()[k * n + r]).sum();
            assert!(row.abs() < 1e-13 && col.abs() < 1e-13);
        }
    }

    #[test]
    fn inner_pattern_lives_on_r() {
        let p = CellPiece::random_inner(square(1, 0), 2, 5);
        let n = 6;
        for r in 0..n {
            for c in 0..n {
                let inside = (2..4).contains(&r) && (2..4).contains(&c);
                assert!(inside || p.values()[r * n + c] == 0.0);
            }
            let row: f64 = p.values()[r * n..(r + 1) * n].iter().sum();
            assert!(row.abs() < 1e-15);
        }
        assert!(p.values().iter().any(|v| *v != 0.0));
    }

    #[test]
    fn torus_coefficients_match_fft_of_samples() {
        // Dyadic cells on a grid that resolves them: the sampled DFT agrees up
        // to the left-endpoint rule, whose error at low k is O(h·k/W).
        let piece = CellPiece::random_inner(square(2, 0), 2, 11);
        let grid = GridSpec::new(3, 7);
        let spectrum = piece.sample(grid).spectrum();
        for (k1, k2) in [(0, 0), (1, 2), (3, 1), (-2, 5)] {
            let exact = piece.torus_coefficient(8.0, k1, k2);
            let sampled = spectrum.get(k1, k2);
            assert!(
                (exact - sampled).norm() <= 5e-3 * piece.lq_norm(1.0) / 64.0,
                "{k1},{k2}"
            );
        }
        assert!(piece.torus_coefficient(8.0, 0, 0).norm() < 1e-15);
    }

    #[test]
    fn haar_norm() {
        let p = CellPiece::haar(square(0, -2));
        assert!((p.lq_norm(1.5) - (1.0f64 / 16.0).powf(1.0 / 1.5)).abs() < 1e-15);
    }

    #[test]
    fn anisotropic_dilation_is_exact() {
        let base = DyadicRectangle::new(DyadicInterval::new(3, 0), DyadicInterval::new(5, 0));
        let moved = DyadicRectangle::new(DyadicInterval::new(3, -3), DyadicInterval::new(5, -1));
        for piece in [CellPiece::haar(base), CellPiece::random(base, 2, 1)] {
            let a = SeparableProbe::new(&piece, BlockIndex::new(1, -1), 128);
            let b = SeparableProbe::new(&piece.moved(moved), BlockIndex::new(4, 0), 128);
            for (u, v) in [(0, 0), (4, 6), (6, 0)] {
                let ra = a.ratio(u, v, 1.5, 2.0).unwrap();
                let rb = b.ratio(u, v, 1.5, 2.0).unwrap();
                assert!((ra - rb).abs() <= 1e-9 * ra, "{ra} vs {rb}");
            }
        }
    }

    #[test]
    fn tensor_and_general_paths_agree() {
        let r = square(0, 0);
        let haar = CellPiece::haar(r);
        let general = CellPiece {
            factors: None,
            ..haar.clone()
        };
        let a = SeparableProbe::new(&haar, BlockIndex::new(0, 1), usize::MAX);
        let b = SeparableProbe::new(&general, BlockIndex::new(0, 1), usize::MAX);
        for (u, v) in [(0, 0), (4, 0)] {
            let x = a.integral(u, v, 1.5).unwrap();
            let y = b.integral(u, v, 1.5).unwrap();
            assert!((x - y).abs() <= 1e-10 * x);
        }
    }

    #[test]
    fn agrees_with_torus_grid() {
        // R = [16, 17)² in a window of side 32, 64 samples per unit length.
        let r = square(16, 0);
        let piece = CellPiece::haar(r);
        let grid = GridSpec::new(5, 6);
        let sampled = piece.sample(grid);
        let block = BlockIndex::new(0, 0);
        let torus = DecayProbe::new(&sampled, &r, block).unwrap();
        let line = SeparableProbe::new(&piece, block, usize::MAX);
        for (u, v) in [(0, 0), (4, 0), (4, 4)] {
            let a = torus.ratio(u, v, 1.5, 2.0).unwrap();
            let b = line.ratio(u, v, 1.5, 2.0).unwrap();
            assert!(
                (a - b).abs() <= 0.02 * b,
                "({u},{v}): torus {a} vs line {b}"
            );
        }
    }
}
