use super::matrix::{hankel_matrix, schatten_norm, HankelMatrix};
use super::symbol::AnalyticSymbol;
use crate::error::{LabError, Result};
use crate::spectral::{besov_norms, GridFunction, GridSpec, Spectrum};

/// Synthesizes `Σ_κ φ̂(κ) e^{2πi κ·x}` on the grid: lattice index `κ` sits at
/// frequency `ξ = κ`, i.e. wavenumber `κ·2ᴸ`.
pub fn symbol_function(
    symbol: &AnalyticSymbol,
    window_exp: i32,
    resolution_exp: i32,
) -> Result<GridFunction> {
    if symbol.has_axis_mass() {
        return Err(LabError::AxisCoefficients);
    }
    let grid = GridSpec::new(window_exp, resolution_exp);
    let top = symbol.side() - 1;
    let nyquist = grid.side() / 2;
    let stretch = 1i64 << window_exp.max(0);
    if window_exp < 0 || (top as i64) * stretch >= nyquist as i64 {
        return Err(LabError::FrequencyOverflow {
            index: top,
            nyquist,
        });
    }
    let mut spectrum = Spectrum::zeros(grid);
    let side = symbol.side();
    for (idx, c) in symbol.coeffs().iter().enumerate() {
        if c.norm() != 0.0 {
            let (k1, k2) = ((idx / side) as i64, (idx % side) as i64);
            spectrum.set(k1 * stretch, k2 * stretch, *c)?;
        }
    }
    Ok(spectrum.to_grid())
}

/// `‖φ‖_{B^{1/p}_{p,p}}` of the embedded symbol on the window `[0, 2ᴸ)²`.
pub fn besov_lattice_norm(
    symbol: &AnalyticSymbol,
    p: f64,
    window_exp: i32,
    resolution_exp: i32,
) -> Result<f64> {
    Ok(besov_lattice_norms(symbol, &[p], window_exp, resolution_exp)?[0])
}

pub fn besov_lattice_norms(
    symbol: &AnalyticSymbol,
    ps: &[f64],
    window_exp: i32,
    resolution_exp: i32,
) -> Result<Vec<f64>> {
    let f = symbol_function(symbol, window_exp, resolution_exp)?;
    besov_norms(&f, ps)
}

/// `‖H_φ‖_{S^p} / ‖φ‖_{B^{1/p}_{p,p}}`.
pub fn equivalence_ratio(
    symbol: &AnalyticSymbol,
    p: f64,
    window_exp: i32,
    resolution_exp: i32,
) -> Result<f64> {
    if symbol.is_zero() {
        return Err(LabError::RatioUndefined);
    }
    let h = hankel_matrix(symbol);
    equivalence_ratio_with(&h, symbol, p, window_exp, resolution_exp)
}

/// [`equivalence_ratio`] reusing an already built (and possibly already
/// decomposed) matrix.
pub fn equivalence_ratio_with(
    h: &HankelMatrix,
    symbol: &AnalyticSymbol,
    p: f64,
    window_exp: i32,
    resolution_exp: i32,
) -> Result<f64> {
    if symbol.is_zero() {
        return Err(LabError::RatioUndefined);
    }
    let besov = besov_lattice_norm(symbol, p, window_exp, resolution_exp)?;
    Ok(schatten_norm(h, p)? / besov)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn zero_symbol() {
        let zero = AnalyticSymbol::from_fn(4, true, |_, _| Complex64::new(0.0, 0.0));
        assert_eq!(besov_lattice_norm(&zero, 3.0, 0, 5).unwrap(), 0.0);
        assert_eq!(
            equivalence_ratio(&zero, 3.0, 0, 5),
            Err(LabError::RatioUndefined)
        );
    }

    #[test]
    fn single_tone_closed_form() {
        // κ = (2, 4) ⇒ frequency (2¹, 2²)
        let symbol = AnalyticSymbol::single(4, (2, 4), true);
        for (l, kp) in [(0, 5), (1, 5)] {
            for p in [2.0, 3.0] {
                let got = besov_lattice_norm(&symbol, p, l, kp).unwrap();
                let closed = 2f64.powf(3.0 / p) * 4f64.powf(l as f64 / p);
                assert!((got - closed).abs() <= 1e-12 * closed, "L={l} p={p}");
            }
        }
    }

    #[test]
    fn homogeneity() {
        let symbol = AnalyticSymbol::from_fn(3, true, |a, b| {
            Complex64::new(1.0 / (1 + a * b) as f64, a as f64)
        });
        let c = Complex64::new(0.0, -3.0);
        let a = besov_lattice_norm(&symbol, 2.5, 0, 5).unwrap();
        let b = besov_lattice_norm(&symbol.scaled(c), 2.5, 0, 5).unwrap();
        assert!((b - 3.0 * a).abs() <= 1e-12 * b);
        let ratio = equivalence_ratio(&symbol, 2.5, 0, 5).unwrap();
        assert!(ratio.is_finite() && ratio > 0.0);
    }

    #[test]
    fn preconditions() {
        let axis = AnalyticSymbol::single(3, (0, 2), false);
        assert_eq!(
            besov_lattice_norm(&axis, 2.0, 0, 5),
            Err(LabError::AxisCoefficients)
        );
        let symbol = AnalyticSymbol::single(4, (1, 1), true);
        // 2N − 2 = 6 needs 2^{K′−1} > 6
        assert!(matches!(
            besov_lattice_norm(&symbol, 2.0, 0, 3),
            Err(LabError::FrequencyOverflow { .. })
        ));
        assert!(besov_lattice_norm(&symbol, 2.0, 0, 4).is_ok());
    }
}
