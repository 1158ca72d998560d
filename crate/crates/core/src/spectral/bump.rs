use num_complex::Complex64;

use super::grid::{GridFunction, GridSpec, Spectrum};
use crate::geometry::pow2;

/// Smooth step profile `h(s) = exp(−1/s)` for `s > 0`, zero otherwise.
pub fn exp_profile(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Telescoping Littlewood–Paley bumps built from a transition profile.
///
/// `η` falls from 1 on `(−∞, 1]` to 0 on `[2, ∞)`, `ψ(ξ) = η(ξ) − η(2ξ)` lives
/// on `[1/2, 2]` and `ψ̃(ξ) = η(ξ/2) − η(4ξ)` on `[1/4, 4]`, equal to 1 on
/// `[1/2, 2]`.
#[derive(Clone, Copy)]
pub struct SpectralBump {
    profile: fn(f64) -> f64,
}

impl std::fmt::Debug for SpectralBump {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralBump").finish_non_exhaustive()
    }
}

impl Default for SpectralBump {
    fn default() -> Self {
        build_bumps(exp_profile)
    }
}

/// Which member of the bump pair a projector uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BumpVariant {
    Plain,
    Tilde,
}

pub fn build_bumps(profile: fn(f64) -> f64) -> SpectralBump {
    SpectralBump { profile }
}

impl SpectralBump {
    pub fn eta(&self, t: f64) -> f64 {
        let a = (self.profile)(2.0 - t);
        let b = (self.profile)(t - 1.0);
        a / (a + b)
    }

    pub fn psi(&self, xi: f64) -> f64 {
        if xi <= 0.0 {
            return 0.0;
        }
        self.eta(xi) - self.eta(2.0 * xi)
    }

    pub fn psi_tilde(&self, xi: f64) -> f64 {
        if xi <= 0.0 {
            return 0.0;
        }
        self.eta(xi / 2.0) - self.eta(4.0 * xi)
    }

    /// `ψ_j(ξ) = ψ(2⁻ʲξ)` or the tilde version.
    pub fn scaled(&self, variant: BumpVariant, j: i32, xi: f64) -> f64 {
        let t = xi * pow2(-j);
        match variant {
            BumpVariant::Plain => self.psi(t),
            BumpVariant::Tilde => self.psi_tilde(t),
        }
    }

    /// Multiplier of scale `j` on the FFT axis of `grid`, one weight per index.
    pub fn axis_multiplier(&self, grid: GridSpec, variant: BumpVariant, j: i32) -> Vec<f64> {
        (0..grid.side())
            .map(|n| self.scaled(variant, j, grid.frequency(n)))
            .collect()
    }

    /// Scales whose bump is nonzero somewhere on the positive lattice
    /// frequencies of `grid`.
    pub fn covered_scales(
        &self,
        grid: GridSpec,
        variant: BumpVariant,
    ) -> std::ops::RangeInclusive<i32> {
        let top = (grid.side() / 2).saturating_sub(1);
        if top == 0 {
            return std::ops::RangeInclusive::new(1, 0);
        }
        let lo_xi = 1.0 / grid.window_length();
        let hi_xi = top as f64 / grid.window_length();
        let reach = match variant {
            BumpVariant::Plain => 1,
            BumpVariant::Tilde => 2,
        };
        // Support of the scale-j bump is the open interval (2^{j−reach}, 2^{j+reach}).
        let lo = (lo_xi.log2().floor() as i32) - reach + 1;
        let hi = (hi_xi.log2().ceil() as i32) + reach - 1;
        let live = |j: i32| {
            (1..=top).any(|k| self.scaled(variant, j, k as f64 / grid.window_length()) != 0.0)
        };
        let mut a = lo - 1;
        while !live(a) && a <= hi {
            a += 1;
        }
        let mut b = hi + 1;
        while !live(b) && b >= a {
            b -= 1;
        }
        a..=b
    }

    /// Kernel `K` of `Δ̃_{i,j}` on the torus: `Δ̃_{i,j} f = K * f` with the
    /// periodic convolution `∫ K(x − y) f(y) dy`.
    pub fn kernel(&self, grid: GridSpec, i: i32, j: i32) -> GridFunction {
        let m = grid.side();
        let area = grid.window_length() * grid.window_length();
        let m1 = self.axis_multiplier(grid, BumpVariant::Tilde, i);
        let m2 = self.axis_multiplier(grid, BumpVariant::Tilde, j);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); m * m];
        for (row, &w2) in m2.iter().enumerate() {
            for (col, &w1) in m1.iter().enumerate() {
                coeffs[row * m + col] = Complex64::new(w1 * w2 / area, 0.0);
            }
        }
        Spectrum::from_coeffs(grid, coeffs)
            .expect("coefficient array has the grid shape")
            .to_grid()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn telescoping_values() {
        let b = SpectralBump::default();
        assert_eq!(b.psi(1.0), 1.0);
        assert_eq!(b.psi(0.5), 0.0);
        assert_eq!(b.psi(2.0), 0.0);
        assert_eq!(b.psi(0.0), 0.0);
        assert_eq!(b.eta(0.3), 1.0);
        assert_eq!(b.eta(2.5), 0.0);
    }

    #[test]
    fn partition_of_unity() {
        let b = SpectralBump::default();
        for xi in [0.7, 1.0, 3.3, 1e-3, 517.25, 1.0 / 3.0] {
            let s: f64 = (-40..=40).map(|j| b.psi(xi * pow2(-j))).sum();
            assert!((s - 1.0).abs() <= 1e-12, "ξ = {xi}: {s}");
        }
    }

    #[test]
    fn tilde_dominates_plain_support() {
        let b = SpectralBump::default();
        let mut xi = 0.25;
        while xi < 4.5 {
            if b.psi(xi) != 0.0 {
                assert!((b.psi_tilde(xi) - 1.0).abs() <= 1e-15, "ξ = {xi}");
            }
            if !(0.25..=4.0).contains(&xi) {
                assert_eq!(b.psi_tilde(xi), 0.0);
            }
            xi += 1.0 / 256.0;
        }
        assert_eq!(b.psi_tilde(0.25), 0.0);
        assert_eq!(b.psi_tilde(4.0), 0.0);
    }

    #[test]
    fn covered_scales_bracket_the_lattice() {
        let b = SpectralBump::default();
        let grid = GridSpec::new(2, 3);
        // positive frequencies run from 1/4 to 15/4
        assert_eq!(b.covered_scales(grid, BumpVariant::Plain), -2..=2);
        assert_eq!(b.covered_scales(grid, BumpVariant::Tilde), -3..=3);
    }

    #[test]
    fn kernel_convolution_matches_multiplier() {
        let b = SpectralBump::default();
        let grid = GridSpec::new(1, 2);
        let k = b.kernel(grid, 0, 0);
        let s = k.spectrum();
        let w = grid.window_length();
        assert!((s.get(2, 2).re * w * w - 1.0).abs() < 1e-12);
        assert!(s.get(-2, 2).norm() < 1e-15);
    }
}
