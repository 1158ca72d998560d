use num_complex::Complex64;

use super::bump::{BumpVariant, SpectralBump};
use super::grid::{lp_sum, GridFunction, GridSpec, Spectrum};
use crate::error::{check_exponent, LabError, Result};
use crate::geometry::pow2;

/// Frequency block `(i, j)`: `ξ₁ ~ 2ⁱ`, `ξ₂ ~ 2ʲ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockIndex {
    pub i: i32,
    pub j: i32,
}

impl BlockIndex {
    pub fn new(i: i32, j: i32) -> Self {
        BlockIndex { i, j }
    }
}

/// Axes a block projector acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    First,
    Second,
    Both,
}

/// `Δ_{i,j} f` (or `Δ̃`, or a single-axis factor) by spectral multiplication.
pub fn block_project(
    f: &GridFunction,
    b: BlockIndex,
    variant: BumpVariant,
    axis: Axis,
) -> GridFunction {
    block_project_with(&SpectralBump::default(), &f.spectrum(), b, variant, axis)
}

pub fn block_project_with(
    bump: &SpectralBump,
    spectrum: &Spectrum,
    b: BlockIndex,
    variant: BumpVariant,
    axis: Axis,
) -> GridFunction {
    let grid = spectrum.grid();
    let ones = vec![1.0; grid.side()];
    let m1 = match axis {
        Axis::Second => ones.clone(),
        _ => bump.axis_multiplier(grid, variant, b.i),
    };
    let m2 = match axis {
        Axis::First => ones,
        _ => bump.axis_multiplier(grid, variant, b.j),
    };
    spectrum.to_grid_separable(&m1, &m2)
}

/// Relative size below which spectral coefficients count as numerical noise
/// when classifying the support of an input.
const SUPPORT_NOISE: f64 = 1e-10;

/// Checks that the spectrum lives in the open positive quadrant.
pub fn check_analytic(spectrum: &Spectrum) -> Result<()> {
    let grid = spectrum.grid();
    let m = grid.side();
    let coeffs = spectrum.coeffs();
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(());
    }
    let floor = SUPPORT_NOISE * max;
    let mut negative = false;
    for (idx, c) in coeffs.iter().enumerate() {
        if c.norm() <= floor {
            continue;
        }
        let k1 = grid.wavenumber(idx % m);
        let k2 = grid.wavenumber(idx / m);
        if k1 == 0 || k2 == 0 {
            return Err(LabError::ZeroFrequencyUncovered);
        }
        if k1 < 0 || k2 < 0 {
            negative = true;
        }
    }
    if negative {
        Err(LabError::NotAnalytic)
    } else {
        Ok(())
    }
}

/// `Σ_{i,j} Δ̃_{i,j}Δ_{i,j} f` over the covered blocks, with the relative
/// `L²` error against `f`.
pub fn reproduce(f: &GridFunction) -> Result<(GridFunction, f64)> {
    let spectrum = f.spectrum();
    check_analytic(&spectrum)?;
    let bump = SpectralBump::default();
    let grid = f.grid();
    let axis = |_: ()| -> Vec<f64> {
        let mut total = vec![0.0; grid.side()];
        for i in bump.covered_scales(grid, BumpVariant::Plain) {
            let plain = bump.axis_multiplier(grid, BumpVariant::Plain, i);
            let tilde = bump.axis_multiplier(grid, BumpVariant::Tilde, i);
            for ((t, a), b) in total.iter_mut().zip(plain).zip(tilde) {
                *t += a * b;
            }
        }
        total
    };
    let weights = axis(());
    let rec = spectrum.to_grid_separable(&weights, &weights);
    let norm = f.l2_norm();
    let err = if norm == 0.0 {
        0.0
    } else {
        rec.sub(f)?.l2_norm() / norm
    };
    Ok((rec, err))
}

/// Block decomposition of one function: the spectrum plus cached per-axis
/// multipliers over the covered scales.
#[derive(Debug, Clone)]
pub struct BlockAnalysis {
    spectrum: Spectrum,
    scales: Vec<i32>,
    multipliers: Vec<Vec<f64>>,
    live_first: Vec<bool>,
    live_second: Vec<bool>,
}

impl BlockAnalysis {
    pub fn new(f: &GridFunction) -> Self {
        Self::from_spectrum(f.spectrum())
    }

    pub fn from_spectrum(spectrum: Spectrum) -> Self {
        let bump = SpectralBump::default();
        let grid = spectrum.grid();
        let m = grid.side();
        let scales: Vec<i32> = bump.covered_scales(grid, BumpVariant::Plain).collect();
        let multipliers: Vec<Vec<f64>> = scales
            .iter()
            .map(|&s| bump.axis_multiplier(grid, BumpVariant::Plain, s))
            .collect();
        // A block is skipped when the spectrum vanishes on its whole support.
        let mut col_mass = vec![false; m];
        let mut row_mass = vec![false; m];
        for (idx, c) in spectrum.coeffs().iter().enumerate() {
            if *c != Complex64::new(0.0, 0.0) {
                col_mass[idx % m] = true;
                row_mass[idx / m] = true;
            }
        }
        let touches = |mult: &Vec<f64>, mass: &Vec<bool>| {
            mult.iter().zip(mass).any(|(&w, &hit)| w != 0.0 && hit)
        };
        let live_first = multipliers.iter().map(|w| touches(w, &col_mass)).collect();
        let live_second = multipliers.iter().map(|w| touches(w, &row_mass)).collect();
        BlockAnalysis {
            spectrum,
            scales,
            multipliers,
            live_first,
            live_second,
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.spectrum.grid()
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn scales(&self) -> &[i32] {
        &self.scales
    }

    /// Blocks that can be nonzero for this function.
    pub fn live_blocks(&self) -> Vec<BlockIndex> {
        let mut out = Vec::new();
        for (a, &i) in self.scales.iter().enumerate() {
            if !self.live_first[a] {
                continue;
            }
            for (b, &j) in self.scales.iter().enumerate() {
                if self.live_second[b] {
                    out.push(BlockIndex::new(i, j));
                }
            }
        }
        out
    }

    pub fn block(&self, b: BlockIndex) -> GridFunction {
        let pos = |s: i32| self.scales.iter().position(|&x| x == s);
        match (pos(b.i), pos(b.j)) {
            (Some(a), Some(c)) => self
                .spectrum
                .to_grid_separable(&self.multipliers[a], &self.multipliers[c]),
            _ => GridFunction::zeros(self.grid()),
        }
    }

    /// `S_p(f)^p` at every sample point for each requested `p`, from a single
    /// pass over the blocks.
    pub fn square_function_powers(&self, ps: &[f64]) -> Result<Vec<Vec<f64>>> {
        for &p in ps {
            check_exponent("p", p, p >= 1.0, "[1, ∞)")?;
        }
        let len = self.grid().len();
        let mut acc = vec![vec![0.0; len]; ps.len()];
        for b in self.live_blocks() {
            let weight = pow2(b.i + b.j);
            let block = self.block(b);
            for (values, &p) in acc.iter_mut().zip(ps) {
                for (v, z) in values.iter_mut().zip(block.samples()) {
                    *v += weight * z.norm().powf(p);
                }
            }
        }
        Ok(acc)
    }
}

/// `S_p(f) = (Σ_{i,j} 2^{i+j} |Δ_{i,j} f|^p)^{1/p}` sampled on the grid.
pub fn square_function(f: &GridFunction, p: f64) -> Result<GridFunction> {
    let powers = BlockAnalysis::new(f).square_function_powers(&[p])?;
    let samples = powers[0]
        .iter()
        .map(|v| Complex64::new(v.powf(1.0 / p), 0.0))
        .collect();
    GridFunction::from_samples(f.grid(), samples)
}

/// `‖S_p(f)‖_{L^p}` over the window by quadrature.
pub fn besov_norm(f: &GridFunction, p: f64) -> Result<f64> {
    Ok(besov_norms(f, &[p])?[0])
}

/// Besov norms for several exponents sharing one block decomposition.
pub fn besov_norms(f: &GridFunction, ps: &[f64]) -> Result<Vec<f64>> {
    let analysis = BlockAnalysis::new(f);
    let powers = analysis.square_function_powers(ps)?;
    let area = f.grid().cell_area();
    Ok(powers
        .iter()
        .zip(ps)
        .map(|(values, &p)| (area * values.iter().sum::<f64>()).powf(1.0 / p))
        .collect())
}

/// `P₊₊`: keeps coefficients with both wavenumbers `≥ 0` (axes included).
pub fn analytic_project(f: &GridFunction) -> GridFunction {
    let grid = f.grid();
    let mask: Vec<f64> = (0..grid.side())
        .map(|n| if grid.wavenumber(n) >= 0 { 1.0 } else { 0.0 })
        .collect();
    f.spectrum().to_grid_separable(&mask, &mask)
}

/// `Jf(x) = f(−x)` on the torus.
pub fn involution(f: &GridFunction) -> GridFunction {
    let m = f.side();
    let src = f.samples();
    let mut out = Vec::with_capacity(src.len());
    for row in 0..m {
        let r = (m - row) % m;
        for col in 0..m {
            out.push(src[r * m + (m - col) % m]);
        }
    }
    GridFunction::from_samples(f.grid(), out).expect("same shape")
}

/// `‖f‖_{L^p}` of real sample values (used for square-function fields).
pub fn field_norm(grid: GridSpec, values: &[f64], p: f64) -> f64 {
    lp_sum(values.iter().map(|v| v.abs()), p, grid.cell_area())
}
