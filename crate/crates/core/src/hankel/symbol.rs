use num_complex::Complex64;

use crate::error::{LabError, Result};

/// Fourier coefficients `φ̂(κ)` for `κ ∈ {0, …, 2N−2}²`, stored as
/// `coeffs[κ₁·(2N−1) + κ₂]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSymbol {
    n: usize,
    coeffs: Vec<Complex64>,
    zero_axis_excluded: bool,
}

impl AnalyticSymbol {
    /// With `zero_axis_excluded` the coefficients on `κ₁ = 0` or `κ₂ = 0`
    /// are set to zero.
    pub fn new(n: usize, mut coeffs: Vec<Complex64>, zero_axis_excluded: bool) -> Result<Self> {
        assert!(n >= 1, "truncation size must be positive");
        let side = 2 * n - 1;
        if coeffs.len() != side * side {
            return Err(LabError::ShapeMismatch {
                expected: side * side,
                actual: coeffs.len(),
            });
        }
        if let Some(index) = coeffs
            .iter()
            .position(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(LabError::NonFiniteValue { index });
        }
        if zero_axis_excluded {
            for k in 0..side {
                coeffs[k] = Complex64::new(0.0, 0.0);
                coeffs[k * side] = Complex64::new(0.0, 0.0);
            }
        }
        Ok(AnalyticSymbol {
            n,
            coeffs,
            zero_axis_excluded,
        })
    }

    pub fn from_fn<F>(n: usize, zero_axis_excluded: bool, f: F) -> Self
    where
        F: Fn(usize, usize) -> Complex64,
    {
        let side = 2 * n - 1;
        let coeffs = (0..side * side)
            .map(|idx| f(idx / side, idx % side))
            .collect();
        Self::new(n, coeffs, zero_axis_excluded).expect("generated coefficients are finite")
    }

    /// Indicator of a single lattice point.
    pub fn single(n: usize, kappa: (usize, usize), zero_axis_excluded: bool) -> Self {
        Self::from_fn(n, zero_axis_excluded, |a, b| {
            Complex64::new(((a, b) == kappa) as u8 as f64, 0.0)
        })
    }

    /// `φ̂(κ) = r^{κ₁+κ₂}`.
    pub fn geometric(n: usize, r: f64) -> Self {
        Self::from_fn(n, false, |a, b| Complex64::new(r.powi((a + b) as i32), 0.0))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> usize {
        2 * self.n - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn zero_axis_excluded(&self) -> bool {
        self.zero_axis_excluded
    }

    pub fn get(&self, k1: usize, k2: usize) -> Complex64 {
        self.coeffs[k1 * self.side() + k2]
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        AnalyticSymbol {
            coeffs: self.coeffs.iter().map(|z| z * c).collect(),
            ..self.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    pub fn has_axis_mass(&self) -> bool {
        let side = self.side();
        (0..side).any(|k| {
            self.coeffs[k] != Complex64::new(0.0, 0.0)
                || self.coeffs[k * side] != Complex64::new(0.0, 0.0)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_flag_clears_axes() {
        let s = AnalyticSymbol::from_fn(3, true, |_, _| Complex64::new(1.0, 0.0));
        assert_eq!(s.get(0, 2), Complex64::new(0.0, 0.0));
        assert_eq!(s.get(3, 0), Complex64::new(0.0, 0.0));
        assert_eq!(s.get(1, 4), Complex64::new(1.0, 0.0));
        assert!(!s.has_axis_mass());
        assert!(AnalyticSymbol::single(3, (0, 1), false).has_axis_mass());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            AnalyticSymbol::new(2, vec![Complex64::new(0.0, 0.0); 8], false),
            Err(LabError::ShapeMismatch {
                expected: 9,
                actual: 8
            })
        ));
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 9];
        coeffs[4].im = f64::NAN;
        assert_eq!(
            AnalyticSymbol::new(2, coeffs, false),
            Err(LabError::NonFiniteValue { index: 4 })
        );
    }
}
