use std::sync::OnceLock;

use faer::Mat;
use num_complex::Complex64;

use super::symbol::AnalyticSymbol;
use crate::error::{check_exponent, LabError, Result};
use crate::spectral::{fft2, Transform};

/// Finite section `A[ξ][λ] = φ̂(ξ + λ)` for `ξ, λ ∈ {0, …, N−1}²`, with the
/// bi-index `ξ` flattened as `ξ₁·N + ξ₂`.
#[derive(Debug, Clone)]
pub struct HankelMatrix {
    n: usize,
    entries: Vec<Complex64>,
    singular: OnceLock<Vec<f64>>,
}

pub fn hankel_matrix(symbol: &AnalyticSymbol) -> HankelMatrix {
    let n = symbol.n();
    let dim = n * n;
    let mut entries = Vec::with_capacity(dim * dim);
    for row in 0..dim {
        let (x1, x2) = (row / n, row % n);
        for col in 0..dim {
            let (l1, l2) = (col / n, col % n);
            entries.push(symbol.get(x1 + l1, x2 + l2));
        }
    }
    HankelMatrix {
        n,
        entries,
        singular: OnceLock::new(),
    }
}

impl HankelMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entry(&self, xi: (usize, usize), lambda: (usize, usize)) -> Complex64 {
        let n = self.n;
        self.entries[(xi.0 * n + xi.1) * self.dim() + lambda.0 * n + lambda.1]
    }

    /// Whether every entry depends only on `ξ + λ`.
    pub fn is_hankel(&self) -> bool {
        let n = self.n;
        let side = 2 * n - 1;
        let mut seen: Vec<Option<Complex64>> = vec![None; side * side];
        for row in 0..self.dim() {
            for col in 0..self.dim() {
                let k = (row / n + col / n) * side + row % n + col % n;
                let value = self.entries[row * self.dim() + col];
                match seen[k] {
                    None => seen[k] = Some(value),
                    Some(v) if v != value => return false,
                    _ => {}
                }
            }
        }
        true
    }

    /// Singular values in nonincreasing order, computed once.
    pub fn singular_values(&self) -> Result<&[f64]> {
        if let Some(s) = self.singular.get() {
            return Ok(s);
        }
        let dim = self.dim();
        let mat = Mat::<Complex64>::from_fn(dim, dim, |i, j| self.entries[i * dim + j]);
        let values: Vec<f64> = mat
            .singular_values()
            .map_err(|_| LabError::SvdFailed)?
            .into_iter()
            .map(|s| s.max(0.0))
            .collect();
        Ok(self.singular.get_or_init(|| values))
    }
}

/// `(Σ σ_k^p)^{1/p}`.
pub fn schatten_norm(h: &HankelMatrix, p: f64) -> Result<f64> {
    check_exponent("p", p, p >= 1.0, "[1, ∞)")?;
    let sv = h.singular_values()?;
    let max = sv.first().copied().unwrap_or(0.0);
    if max == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = sv.iter().map(|s| (s / max).powf(p)).sum();
    Ok(max * sum.powf(1.0 / p))
}

/// Number of pairs `(ξ, λ)` in the section with `ξ + λ = κ`.
pub fn anti_diagonal_weight(n: usize, kappa: (usize, usize)) -> usize {
    let w = |k: usize| k.min(n - 1) + 1 - k.saturating_sub(n - 1);
    w(kappa.0) * w(kappa.1)
}

/// `Σ_κ w(κ) |φ̂(κ)|²`, the squared Hilbert–Schmidt norm of the section.
pub fn frobenius_identity(symbol: &AnalyticSymbol) -> f64 {
    let n = symbol.n();
    let side = symbol.side();
    symbol
        .coeffs()
        .iter()
        .enumerate()
        .map(|(idx, c)| anti_diagonal_weight(n, (idx / side, idx % side)) as f64 * c.norm_sqr())
        .sum()
}

fn check_input(n: usize, fhat: &[Complex64]) -> Result<()> {
    if fhat.len() != n * n {
        return Err(LabError::ShapeMismatch {
            expected: n * n,
            actual: fhat.len(),
        });
    }
    Ok(())
}

/// `ĝ(ξ) = Σ_λ φ̂(ξ + λ) f̂(λ)` as a matrix-vector product.
pub fn operator_apply(h: &HankelMatrix, fhat: &[Complex64]) -> Result<Vec<Complex64>> {
    check_input(h.n, fhat)?;
    let dim = h.dim();
    Ok((0..dim)
        .map(|row| {
            h.entries[row * dim..(row + 1) * dim]
                .iter()
                .zip(fhat)
                .map(|(a, f)| a * f)
                .sum()
        })
        .collect())
}

/// Same sum through a zero-padded 2-D FFT convolution of `φ̂` with the
/// reversed input: `ĝ(ξ) = (φ̂ ∗ f̂(N−1−·))(ξ + N − 1)`.
pub fn operator_apply_fft(symbol: &AnalyticSymbol, fhat: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = symbol.n();
    check_input(n, fhat)?;
    let side = symbol.side();
    let size = (3 * n - 2).next_power_of_two().max(2);
    let zero = Complex64::new(0.0, 0.0);
    let mut a = vec![zero; size * size];
    let mut b = vec![zero; size * size];
    for k1 in 0..side {
        for k2 in 0..side {
            a[k1 * size + k2] = symbol.get(k1, k2);
        }
    }
    for l1 in 0..n {
        for l2 in 0..n {
            b[(n - 1 - l1) * size + (n - 1 - l2)] = fhat[l1 * n + l2];
        }
    }
    fft2(&mut a, size, Transform::Forward);
    fft2(&mut b, size, Transform::Forward);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    fft2(&mut a, size, Transform::Inverse);
    let norm = 1.0 / (size * size) as f64;
    let mut out = Vec::with_capacity(n * n);
    for x1 in 0..n {
        for x2 in 0..n {
            out.push(a[(x1 + n - 1) * size + x2 + n - 1] * norm);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symbol(n: usize, seed: u64) -> AnalyticSymbol {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let side = 2 * n - 1;
        let coeffs = (0..side * side)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        AnalyticSymbol::new(n, coeffs, false).unwrap()
    }

    /// Weight oracle by direct enumeration of pairs.
    fn weight_by_count(n: usize, kappa: (usize, usize)) -> usize {
        let mut count = 0;
        for x1 in 0..n {
            for x2 in 0..n {
                for l1 in 0..n {
                    for l2 in 0..n {
                        count += (x1 + l1 == kappa.0 && x2 + l2 == kappa.1) as usize;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn single_entry_matrix() {
        let h = hankel_matrix(&AnalyticSymbol::single(3, (0, 0), false));
        let nonzero: Vec<usize> = h
            .entries()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() != 0.0)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(nonzero, vec![0]);
        for p in [1.0, 2.0, 3.5] {
            assert!((schatten_norm(&h, p).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn geometric_symbol_is_rank_one() {
        let (n, r) = (4usize, 0.6f64);
        let h = hankel_matrix(&AnalyticSymbol::geometric(n, r));
        let closed = (1.0 - r.powi(2 * n as i32)).powi(2) / (1.0 - r * r).powi(2);
        let sv = h.singular_values().unwrap();
        assert!((sv[0] - closed).abs() <= 1e-12 * closed);
        assert!(sv[1] <= 1e-12 * closed);
        for p in [1.0, 1.5, 4.0] {
            assert!((schatten_norm(&h, p).unwrap() - closed).abs() <= 1e-12 * closed);
        }
    }

    #[test]
    fn structure_and_frobenius() {
        for seed in 0..3 {
            let symbol = random_symbol(3, seed);
            let h = hankel_matrix(&symbol);
            assert!(h.is_hankel());
            assert_eq!(h.entry((1, 2), (1, 0)), h.entry((2, 0), (0, 2)));
            let s2 = schatten_norm(&h, 2.0).unwrap();
            let frob = frobenius_identity(&symbol).sqrt();
            assert!((s2 - frob).abs() <= 1e-10 * frob);
        }
        for k1 in 0..7 {
            for k2 in 0..7 {
                assert_eq!(
                    anti_diagonal_weight(4, (k1, k2)),
                    weight_by_count(4, (k1, k2))
                );
            }
        }
    }

    #[test]
    fn singular_values_sorted_and_phase_invariant() {
        let symbol = random_symbol(3, 9);
        let h = hankel_matrix(&symbol);
        let sv = h.singular_values().unwrap().to_vec();
        assert!(sv.windows(2).all(|w| w[0] >= w[1]) && sv.iter().all(|&s| s >= 0.0));
        let rotated = hankel_matrix(&symbol.scaled(Complex64::from_polar(1.0, 0.7)));
        for (a, b) in sv.iter().zip(rotated.singular_values().unwrap()) {
            assert!((a - b).abs() <= 1e-10 * sv[0]);
        }
        let norms: Vec<f64> = [1.0, 1.5, 2.0, 3.0, 6.0]
            .iter()
            .map(|&p| schatten_norm(&h, p).unwrap())
            .collect();
        assert!(norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        assert!(schatten_norm(&h, 0.5).is_err());
    }

    #[test]
    fn apply_paths_agree() {
        let n = 5;
        let symbol = random_symbol(n, 1);
        let h = hankel_matrix(&symbol);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f: Vec<Complex64> = (0..n * n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let direct = operator_apply(&h, &f).unwrap();
        let fast = operator_apply_fft(&symbol, &f).unwrap();
        for (a, b) in direct.iter().zip(&fast) {
            assert!((a - b).norm() <= 1e-10 * (1.0 + a.norm()));
        }
        let zero = vec![Complex64::new(0.0, 0.0); n * n];
        assert!(operator_apply(&h, &zero)
            .unwrap()
            .iter()
            .all(|c| c.norm() == 0.0));
        assert!(operator_apply(&h, &f[1..]).is_err());
        assert!(operator_apply_fft(&symbol, &f[1..]).is_err());
    }

    #[test]
    fn indicator_applied_to_indicator() {
        let symbol = AnalyticSymbol::single(3, (0, 0), false);
        let mut f = vec![Complex64::new(0.0, 0.0); 9];
        f[0] = Complex64::new(1.0, 0.0);
        let g = operator_apply_fft(&symbol, &f).unwrap();
        assert!((g[0] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(g[1..].iter().all(|c| c.norm() < 1e-14));
    }
}
