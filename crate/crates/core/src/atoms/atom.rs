use num_complex::Complex64;

use super::piece::{AtomPiece, CANCELLATION_TOLERANCE};
use crate::error::{check_exponent, LabError, Result};
use crate::geometry::{is_maximal, GridOpenSet, OpenSetGeometry};
use crate::spectral::{GridFunction, GridSpec};

/// Slack allowed when re-checking bounds that hold with constant 1 by
/// construction.
pub const BOUND_TOLERANCE: f64 = 1e-12;

/// δ values the validator re-checks besides the atom's own.
pub const DELTA_SWEEP: [f64; 3] = [0.25, 0.5, 1.0];

/// A finite sum of adapted pieces, rescaled by a common factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    omega: GridOpenSet,
    pieces: Vec<AtomPiece>,
    q: f64,
    delta: f64,
    scale: f64,
}

impl Atom {
    /// Builds an atom without normalizing or validating it.
    pub fn from_parts(
        omega: GridOpenSet,
        pieces: Vec<AtomPiece>,
        q: f64,
        delta: f64,
        scale: f64,
    ) -> Self {
        Atom {
            omega,
            pieces,
            q,
            delta,
            scale,
        }
    }

    pub fn omega(&self) -> &GridOpenSet {
        &self.omega
    }

    pub fn pieces(&self) -> &[AtomPiece] {
        &self.pieces
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn scaled(&self, factor: f64) -> Atom {
        Atom {
            scale: self.scale * factor,
            ..self.clone()
        }
    }

    pub fn grid(&self) -> Option<GridSpec> {
        self.pieces.first().map(|p| p.grid())
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty() || self.scale == 0.0
    }

    /// `a = scale · Σ a_R`, or `None` when there are no pieces.
    pub fn values(&self) -> Option<GridFunction> {
        let grid = self.grid()?;
        let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
        for piece in &self.pieces {
            for (a, v) in acc.iter_mut().zip(piece.values().samples()) {
                *a += v;
            }
        }
        acc.iter_mut().for_each(|a| *a *= self.scale);
        Some(GridFunction::from_samples(grid, acc).expect("pieces share the grid"))
    }

    /// `(Σ_R γ(R)^{−δ} ‖scale·a_R‖_q^q)^{1/q}`.
    fn weighted_norm(&self, geometry: &OpenSetGeometry, delta: f64) -> Result<f64> {
        let mut sum = 0.0;
        for piece in &self.pieces {
            let embedded = geometry.embed(piece.rect(), piece.direction())?;
            let norm = self.scale * piece.values().lp_norm(self.q);
            sum += embedded.gamma().powf(-delta) * norm.powf(self.q);
        }
        Ok(sum.powf(1.0 / self.q))
    }
}

fn check_grid(omega: &GridOpenSet, piece: &AtomPiece) -> Result<()> {
    let grid = piece.grid();
    if grid.window_exp != omega.window_exp() as i32 {
        return Err(LabError::GridMismatch(format!(
            "piece window 2^{} vs open-set window 2^{}",
            grid.window_exp,
            omega.window_exp()
        )));
    }
    Ok(())
}

/// Normalizes the pieces so that `‖a‖_q ≤ |Ω|^{1/q−1}` and the γ-weighted
/// piece sum at `δ` are both bounded with constant 1.
pub fn assemble_atom(
    omega: &GridOpenSet,
    pieces: Vec<AtomPiece>,
    q: f64,
    delta: f64,
) -> Result<Atom> {
    check_exponent("q", q, q > 1.0 && q < 2.0, "(1, 2)")?;
    if !(delta.is_finite() && delta > 0.0) {
        return Err(LabError::NonPositiveDelta(delta));
    }
    if let Some(first) = pieces.first() {
        for piece in &pieces {
            check_grid(omega, piece)?;
            if piece.grid() != first.grid() {
                return Err(LabError::GridMismatch("pieces use different grids".into()));
            }
            if !is_maximal(omega, piece.rect(), piece.direction()) {
                return Err(LabError::PieceNotAdapted(format!(
                    "{} is not in the maximal family of direction {}",
                    piece.rect(),
                    piece.direction().index()
                )));
            }
        }
    }
    let unit = Atom::from_parts(omega.clone(), pieces, q, delta, 1.0);
    if unit.is_zero() {
        return Ok(unit);
    }
    let geometry = OpenSetGeometry::new(omega.clone());
    let weighted = unit.weighted_norm(&geometry, delta)?;
    let global = unit.values().map_or(0.0, |v| v.lp_norm(q));
    let denominator = weighted.max(global);
    if denominator == 0.0 {
        return Ok(unit);
    }
    let target = omega.measure().powf(1.0 / q - 1.0);
    Ok(unit.scaled(target / denominator))
}

/// One bound `value ≤ bound` with its margin `bound/value − 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundMargin {
    pub delta: f64,
    pub value: f64,
    pub bound: f64,
}

impl BoundMargin {
    pub fn ok(&self) -> bool {
        self.value <= self.bound * (1.0 + BOUND_TOLERANCE)
    }

    pub fn margin(&self) -> f64 {
        if self.value == 0.0 {
            f64::INFINITY
        } else {
            self.bound / self.value - 1.0
        }
    }
}

/// Outcome of [`validate_atom`]; failures are fields, not errors.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomReport {
    pub adapted_ok: bool,
    pub support_ok: bool,
    pub global_ok: bool,
    pub weighted_ok: bool,
    pub cancellation_ok: bool,
    /// `‖a‖_q` against `|Ω|^{1/q−1}`.
    pub global: BoundMargin,
    /// Weighted piece norm at the atom's own δ.
    pub weighted: BoundMargin,
    /// The same bound re-checked over [`DELTA_SWEEP`].
    pub sweep: Vec<BoundMargin>,
    pub max_residual: f64,
    /// `|supp a \ Ω|`, reported but not enforced.
    pub outside_omega: f64,
}

impl AtomReport {
    pub fn all_ok(&self) -> bool {
        self.adapted_ok
            && self.support_ok
            && self.global_ok
            && self.weighted_ok
            && self.cancellation_ok
    }
}

pub fn validate_atom(atom: &Atom) -> AtomReport {
    let omega = atom.omega();
    let bound = if omega.is_empty() {
        f64::INFINITY
    } else {
        omega.measure().powf(1.0 / atom.q - 1.0)
    };
    let adapted_ok = atom
        .pieces
        .iter()
        .all(|p| check_grid(omega, p).is_ok() && is_maximal(omega, p.rect(), p.direction()));
    let checks: Vec<_> = atom.pieces.iter().map(|p| p.check()).collect();
    let support_ok = checks.iter().all(|c| c.support_ok);
    let max_residual = checks.iter().map(|c| c.residual).fold(0.0, f64::max);
    let values = if atom.scale == 0.0 {
        None
    } else {
        atom.values()
    };
    let global_value = values.as_ref().map_or(0.0, |v| v.lp_norm(atom.q));
    let global = BoundMargin {
        delta: atom.delta,
        value: global_value,
        bound,
    };
    let outside_omega = values.as_ref().map_or(0.0, |v| support_outside(v, omega));

    let margin_at = |delta: f64, geometry: Option<&OpenSetGeometry>| -> BoundMargin {
        let value = match geometry {
            Some(g) if adapted_ok => atom.weighted_norm(g, delta).unwrap_or(f64::INFINITY),
            Some(_) => f64::INFINITY,
            None => 0.0,
        };
        BoundMargin {
            delta,
            value,
            bound,
        }
    };
    let geometry = if atom.is_zero() {
        None
    } else {
        Some(OpenSetGeometry::new(omega.clone()))
    };
    let weighted = margin_at(atom.delta, geometry.as_ref());
    let sweep = DELTA_SWEEP
        .iter()
        .map(|&d| margin_at(d, geometry.as_ref()))
        .collect();
    AtomReport {
        adapted_ok,
        support_ok,
        global_ok: global.ok(),
        weighted_ok: weighted.ok(),
        cancellation_ok: max_residual <= CANCELLATION_TOLERANCE,
        global,
        weighted,
        sweep,
        max_residual,
        outside_omega,
    }
}

/// Area of the cells of Ω's grid whose sample points carry a nonzero value
/// and lie outside Ω.
fn support_outside(values: &GridFunction, omega: &GridOpenSet) -> f64 {
    let grid = values.grid();
    let m = grid.side();
    let count = values
        .samples()
        .iter()
        .enumerate()
        .filter(|(idx, z)| {
            **z != Complex64::new(0.0, 0.0)
                && !omega.contains_point((grid.coordinate(idx % m), grid.coordinate(idx / m)))
        })
        .count();
    count as f64 * grid.cell_area()
}
