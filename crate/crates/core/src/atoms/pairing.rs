use num_complex::Complex64;

use super::atom::{validate_atom, Atom};
use super::piece::AtomPiece;
use crate::error::{check_exponent, LabError, Result};
use crate::geometry::{annulus, annulus_indices, pow2, DyadicInterval, Span};
use crate::spectral::{besov_norm, BlockAnalysis, GridFunction, GridSpec};

/// `|lhs| ≤ C·rhs` sample; `ratio` is 0 when both sides vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl BoundCheck {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let ratio = if lhs == 0.0 {
            0.0
        } else if rhs == 0.0 {
            f64::INFINITY
        } else {
            lhs / rhs
        };
        BoundCheck { lhs, rhs, ratio }
    }
}

/// `⟨f, a⟩ = ∫ f ā` by spatial quadrature.
pub fn pair(f: &GridFunction, atom: &Atom) -> Result<Complex64> {
    match atom.values() {
        None => Ok(Complex64::new(0.0, 0.0)),
        Some(a) => f.inner(&a),
    }
}

/// `⟨f, a⟩` from Fourier coefficients.
pub fn pair_spectral(f: &GridFunction, atom: &Atom) -> Result<Complex64> {
    match atom.values() {
        None => Ok(Complex64::new(0.0, 0.0)),
        Some(a) => {
            f.check_grid(&a)?;
            f.spectrum().inner(&a.spectrum())
        }
    }
}

/// `S_p(f)^p` on the grid with a summed-area table for box integrals.
#[derive(Debug, Clone)]
pub struct SquareFunctionField {
    grid: GridSpec,
    p: f64,
    prefix: Vec<f64>,
}

impl SquareFunctionField {
    pub fn new(f: &GridFunction, p: f64) -> Result<Self> {
        let powers = BlockAnalysis::new(f).square_function_powers(&[p])?;
        Ok(Self::from_powers(f.grid(), p, &powers[0]))
    }

    pub fn from_powers(grid: GridSpec, p: f64, powers: &[f64]) -> Self {
        let m = grid.side();
        let stride = m + 1;
        let mut prefix = vec![0.0; stride * stride];
        for r in 0..m {
            let mut row = 0.0;
            for c in 0..m {
                row += powers[r * m + c];
                prefix[(r + 1) * stride + c + 1] = prefix[r * stride + c + 1] + row;
            }
        }
        SquareFunctionField { grid, p, prefix }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `∫_{S₁×S₂} S_p(f)^p` over sample points in the box.
    pub fn box_integral(&self, first: Span, second: Span) -> f64 {
        let cols = self.grid.index_range(first.lo, first.hi);
        let rows = self.grid.index_range(second.lo, second.hi);
        let stride = self.grid.side() + 1;
        let at = |r: usize, c: usize| self.prefix[r * stride + c];
        let sum = at(rows.end, cols.end) - at(rows.start, cols.end) - at(rows.end, cols.start)
            + at(rows.start, cols.start);
        sum.max(0.0) * self.grid.cell_area()
    }

    /// Whole-window `∫ S_p(f)^p`.
    pub fn total(&self) -> f64 {
        let w = self.grid.window_length();
        self.box_integral(Span::new(0.0, w), Span::new(0.0, w))
    }
}

/// Annulus indices whose ring still meets the window.
fn live_annuli(interval: &DyadicInterval, window: f64) -> Vec<u32> {
    let full = Span::new(0.0, window);
    annulus_indices(64)
        .take_while(|&u| u == 0 || !interval.dilate(pow2(u as i32 - 1)).contains_span(&full))
        .collect()
}

/// The dual exponent `q = p/(p−1)` after checking `p > 2`.
fn dual_exponent(p: f64) -> Result<f64> {
    check_exponent("p", p, p > 2.0, "(2, ∞)")?;
    Ok(p / (p - 1.0))
}

/// Piece-level pairing bound: `|⟨f, a_R⟩|` against
/// `|R|^{1/p} ‖a_R‖_q Σ_{u,v} 2^{−(u+v)/q} (∫_{E_{u,v}(R)} S_p(f)^p)^{1/p}`.
pub fn piece_bound_check(f: &GridFunction, piece: &AtomPiece, p: f64) -> Result<BoundCheck> {
    dual_exponent(p)?;
    let field = SquareFunctionField::new(f, p)?;
    piece_bound_check_with(f, &field, piece)
}

/// [`piece_bound_check`] reusing a precomputed square-function field of `f`.
pub fn piece_bound_check_with(
    f: &GridFunction,
    field: &SquareFunctionField,
    piece: &AtomPiece,
) -> Result<BoundCheck> {
    let p = field.p();
    let q = dual_exponent(p)?;
    f.check_grid(piece.values())?;
    let lhs = f.inner(piece.values())?.norm();
    let rect = piece.rect();
    let window = f.grid().window_length();
    let us = live_annuli(&rect.first, window);
    let vs = live_annuli(&rect.second, window);
    let firsts: Vec<Vec<Span>> = us
        .iter()
        .map(|&u| annulus(&rect.first, u))
        .collect::<Result<_>>()?;
    let seconds: Vec<Vec<Span>> = vs
        .iter()
        .map(|&v| annulus(&rect.second, v))
        .collect::<Result<_>>()?;
    let mut series = 0.0;
    for (&u, a) in us.iter().zip(&firsts) {
        for (&v, b) in vs.iter().zip(&seconds) {
            let mut integral = 0.0;
            for s1 in a {
                for s2 in b {
                    integral += field.box_integral(*s1, *s2);
                }
            }
            series += pow2(-((u + v) as i32)).powf(1.0 / q) * integral.powf(1.0 / p);
        }
    }
    let rhs = rect.area().powf(1.0 / p) * piece.values().lp_norm(q) * series;
    Ok(BoundCheck::new(lhs, rhs))
}

/// `|⟨f, a⟩|` against `‖f‖_{B^{1/p}_{p,p}}` for a valid atom.
pub fn atom_bound_check(f: &GridFunction, atom: &Atom, p: f64) -> Result<BoundCheck> {
    dual_exponent(p)?;
    let report = validate_atom(atom);
    if !report.all_ok() {
        return Err(LabError::InvalidAtom(format!("{report:?}")));
    }
    let lhs = pair(f, atom)?.norm();
    let rhs = besov_norm(f, p)?;
    Ok(BoundCheck::new(lhs, rhs))
}
