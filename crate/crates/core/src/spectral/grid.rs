use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::error::{LabError, Result};
use crate::geometry::{pow2, Region};

/// Periodic window `[0, 2ᴸ)²` sampled with `M = 2^(L+K′)` points per side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    pub window_exp: i32,
    pub resolution_exp: i32,
}

impl GridSpec {
    pub fn new(window_exp: i32, resolution_exp: i32) -> Self {
        assert!(
            window_exp + resolution_exp >= 1 && window_exp + resolution_exp <= 14,
            "grid side 2^(L+K′) must lie in [2, 2^14]"
        );
        GridSpec {
            window_exp,
            resolution_exp,
        }
    }

    pub fn side(&self) -> usize {
        1usize << (self.window_exp + self.resolution_exp)
    }

    pub fn len(&self) -> usize {
        self.side() * self.side()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_length(&self) -> f64 {
        pow2(-self.resolution_exp)
    }

    pub fn window_length(&self) -> f64 {
        pow2(self.window_exp)
    }

    pub fn cell_area(&self) -> f64 {
        pow2(-2 * self.resolution_exp)
    }

    /// Sample point of index `n` along an axis.
    pub fn coordinate(&self, n: usize) -> f64 {
        n as f64 * self.cell_length()
    }

    /// Signed wavenumber of FFT index `n`; the Nyquist index maps to `−M/2`.
    pub fn wavenumber(&self, n: usize) -> i64 {
        let m = self.side();
        if n < m / 2 {
            n as i64
        } else {
            n as i64 - m as i64
        }
    }

    /// Frequency `ξ = k / 2ᴸ` of FFT index `n`.
    pub fn frequency(&self, n: usize) -> f64 {
        self.wavenumber(n) as f64 / self.window_length()
    }

    /// FFT index of a signed wavenumber, if it is representable.
    pub fn index_of(&self, k: i64) -> Option<usize> {
        let m = self.side() as i64;
        if k >= -(m / 2) && k < m / 2 {
            Some(k.rem_euclid(m) as usize)
        } else {
            None
        }
    }

    /// Sample indices along an axis whose points lie in `[lo, hi)`.
    pub fn index_range(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let h = self.cell_length();
        let m = self.side() as f64;
        let start = (lo / h).ceil().clamp(0.0, m) as usize;
        let end = (hi / h).ceil().clamp(0.0, m) as usize;
        start..end.max(start)
    }

    /// Row-major membership mask of the sample points in `region`.
    pub fn region_mask(&self, region: &Region) -> Vec<bool> {
        let m = self.side();
        let mut mask = vec![false; m * m];
        for (first, second) in &region.boxes {
            let cols = self.index_range(first.lo, first.hi);
            for row in self.index_range(second.lo, second.hi) {
                mask[row * m + cols.start..row * m + cols.end].fill(true);
            }
        }
        mask
    }
}

/// Complex function sampled on a [`GridSpec`].
///
/// `samples[row * M + col]` is the value at `(x₁, x₂) = (col·h, row·h)` with
/// `h = 2^−K′`. The function is read as a trigonometric polynomial
/// `f(x) = Σ_k c_k e^{2πi k·x / 2ᴸ}` on the torus of side `2ᴸ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: GridSpec,
    samples: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(grid: GridSpec) -> Self {
        GridFunction {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_samples(grid: GridSpec, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(LabError::ShapeMismatch {
                expected: grid.len(),
                actual: samples.len(),
            });
        }
        Ok(GridFunction { grid, samples })
    }

    pub fn from_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64,
    {
        let m = grid.side();
        let mut samples = Vec::with_capacity(grid.len());
        for row in 0..m {
            let x2 = grid.coordinate(row);
            for col in 0..m {
                samples.push(f(grid.coordinate(col), x2));
            }
        }
        GridFunction { grid, samples }
    }

    /// `e^{2πi (k₁x₁ + k₂x₂)/2ᴸ}`, i.e. frequency `(k₁, k₂)/2ᴸ`.
    pub fn pure_tone(grid: GridSpec, k1: i64, k2: i64) -> Self {
        let w = grid.window_length();
        let tau = std::f64::consts::TAU;
        // Reduce the phase with exact integer arithmetic to keep it accurate.
        let m = grid.side() as i64;
        let mut samples = Vec::with_capacity(grid.len());
        for row in 0..m {
            for col in 0..m {
                let phase = (k1 * col + k2 * row).rem_euclid(m) as f64 / m as f64;
                samples.push(Complex64::from_polar(1.0, tau * phase));
            }
        }
        let _ = w;
        GridFunction { grid, samples }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn side(&self) -> usize {
        self.grid.side()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn value(&self, row: usize, col: usize) -> Complex64 {
        self.samples[row * self.side() + col]
    }

    pub fn spectrum(&self) -> Spectrum {
        let mut data = self.samples.clone();
        fft2(&mut data, self.side(), Transform::Forward);
        let norm = 1.0 / self.grid.len() as f64;
        data.iter_mut().for_each(|c| *c *= norm);
        Spectrum {
            grid: self.grid,
            coeffs: data,
        }
    }

    pub fn map<F>(&self, f: F) -> GridFunction
    where
        F: Fn(Complex64) -> Complex64,
    {
        GridFunction {
            grid: self.grid,
            samples: self.samples.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scaled(&self, c: Complex64) -> GridFunction {
        self.map(|z| z * c)
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.check_grid(other)?;
        Ok(GridFunction {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    pub fn check_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(LabError::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )))
        }
    }

    /// Riemann-sum `L^p` norm over the window.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_sum(
            self.samples.iter().map(|z| z.norm()),
            p,
            self.grid.cell_area(),
        )
    }

    pub fn l2_norm(&self) -> f64 {
        self.lp_norm(2.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Window inner product `∫ f ḡ` by quadrature.
    pub fn inner(&self, other: &GridFunction) -> Result<Complex64> {
        self.check_grid(other)?;
        let sum: Complex64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(sum * self.grid.cell_area())
    }

    /// `(∫_region |f|^q)^{1/q}` by quadrature over sample points in the
    /// region (clipped to the window).
    pub fn local_norm(&self, region: &Region, q: f64) -> Result<f64> {
        crate::error::check_exponent("q", q, q >= 1.0, "[1, ∞)")?;
        let mask = self.grid.region_mask(region);
        Ok(lp_sum(
            self.samples
                .iter()
                .zip(&mask)
                .filter(|(_, &inside)| inside)
                .map(|(z, _)| z.norm()),
            q,
            self.grid.cell_area(),
        ))
    }
}

/// `(w·Σ a^p)^{1/p}` computed with a max-rescaling to avoid overflow.
pub(crate) fn lp_sum<I>(values: I, p: f64, weight: f64) -> f64
where
    I: Iterator<Item = f64> + Clone,
{
    let max = values.clone().fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let s: f64 = values.map(|a| (a / max).powf(p)).sum();
    max * (weight * s).powf(1.0 / p)
}

/// Fourier coefficients `c_k` of a [`GridFunction`], in FFT index order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(grid: GridSpec) -> Self {
        Spectrum {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(LabError::ShapeMismatch {
                expected: grid.len(),
                actual: coeffs.len(),
            });
        }
        Ok(Spectrum { grid, coeffs })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at signed wavenumbers `(k₁, k₂)`; zero if unrepresentable.
    pub fn get(&self, k1: i64, k2: i64) -> Complex64 {
        match (self.grid.index_of(k1), self.grid.index_of(k2)) {
            (Some(c), Some(r)) => self.coeffs[r * self.grid.side() + c],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn set(&mut self, k1: i64, k2: i64, value: Complex64) -> Result<()> {
        let m = self.grid.side();
        match (self.grid.index_of(k1), self.grid.index_of(k2)) {
            (Some(c), Some(r)) => {
                self.coeffs[r * m + c] = value;
                Ok(())
            }
            _ => Err(LabError::FrequencyOverflow {
                index: k1.unsigned_abs().max(k2.unsigned_abs()) as usize,
                nyquist: m / 2,
            }),
        }
    }

    /// `‖f‖_{L²}` from the coefficients: `2ᴸ·(Σ|c_k|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        lp_sum(self.coeffs.iter().map(|z| z.norm()), 2.0, 1.0) * self.grid.window_length()
    }

    /// Spectral-side inner product `4ᴸ Σ c_k d̄_k`.
    pub fn inner(&self, other: &Spectrum) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(LabError::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        let sum: Complex64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum();
        let w = self.grid.window_length();
        Ok(sum * w * w)
    }

    pub fn to_grid(&self) -> GridFunction {
        let mut data = self.coeffs.clone();
        fft2(&mut data, self.grid.side(), Transform::Inverse);
        GridFunction {
            grid: self.grid,
            samples: data,
        }
    }

    /// Inverse transform of the coefficients multiplied by a separable
    /// multiplier `m₁(k₁)·m₂(k₂)`; rows where `m₂` vanishes are skipped.
    pub(crate) fn to_grid_separable(&self, m1: &[f64], m2: &[f64]) -> GridFunction {
        let m = self.grid.side();
        let mut data = vec![Complex64::new(0.0, 0.0); m * m];
        let mut live_rows = Vec::new();
        for (row, &w2) in m2.iter().enumerate() {
            if w2 == 0.0 {
                continue;
            }
            let src = &self.coeffs[row * m..(row + 1) * m];
            let dst = &mut data[row * m..(row + 1) * m];
            let mut any = false;
            for ((d, s), &w1) in dst.iter_mut().zip(src).zip(m1) {
                if w1 != 0.0 {
                    *d = s * (w1 * w2);
                    any = true;
                }
            }
            if any {
                live_rows.push(row);
            }
        }
        if !live_rows.is_empty() {
            let fft = plan(m, Transform::Inverse);
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            for &row in &live_rows {
                fft.process_with_scratch(&mut data[row * m..(row + 1) * m], &mut scratch);
            }
            transpose_square(&mut data, m);
            fft.process_with_scratch(&mut data, &mut scratch);
            transpose_square(&mut data, m);
        }
        GridFunction {
            grid: self.grid,
            samples: data,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Transform {
    Forward,
    Inverse,
}

fn plan(m: usize, direction: Transform) -> Arc<dyn Fft<f64>> {
    let mut planner = FftPlanner::new();
    match direction {
        Transform::Forward => planner.plan_fft_forward(m),
        Transform::Inverse => planner.plan_fft_inverse(m),
    }
}

/// Unnormalized 2-D FFT of a square row-major array.
pub(crate) fn fft2(data: &mut [Complex64], m: usize, direction: Transform) {
    let fft = plan(m, direction);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(data, &mut scratch);
    transpose_square(data, m);
    fft.process_with_scratch(data, &mut scratch);
    transpose_square(data, m);
}

fn transpose_square(data: &mut [Complex64], m: usize) {
    for r in 0..m {
        for c in r + 1..m {
            data.swap(r * m + c, c * m + r);
        }
    }
}
