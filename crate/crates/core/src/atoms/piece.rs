use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{LabError, Result};
use crate::geometry::{Direction, DyadicRectangle, Span};
use crate::spectral::{GridFunction, GridSpec};

/// Relative size of row and column sums tolerated as roundoff.
pub const CANCELLATION_TOLERANCE: f64 = 1e-12;

/// Sample pattern used to synthesize a piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PiecePattern {
    /// `h_I ⊗ h_J` at unit height.
    Haar,
    /// Seeded uniform field on `3R` with row and column means removed.
    Random { seed: u64 },
}

/// Support and cancellation diagnostics of sampled piece values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PieceCheck {
    pub support_ok: bool,
    /// `max |row or column sum| / Σ|a|`; zero for the zero piece.
    pub residual: f64,
}

impl PieceCheck {
    pub fn ok(&self) -> bool {
        self.support_ok && self.residual <= CANCELLATION_TOLERANCE
    }
}

/// Sample index ranges of `3R` on `grid`, clipped to the window.
fn triple_ranges(
    grid: GridSpec,
    rect: &DyadicRectangle,
) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
    let (first, second) = rect.triple();
    (
        grid.index_range(first.lo, first.hi),
        grid.index_range(second.lo, second.hi),
    )
}

pub fn piece_check(values: &GridFunction, rect: &DyadicRectangle) -> PieceCheck {
    let grid = values.grid();
    let m = grid.side();
    let (cols, rows) = triple_ranges(grid, rect);
    let mut support_ok = true;
    let mut row_sums = vec![Complex64::new(0.0, 0.0); m];
    let mut col_sums = vec![Complex64::new(0.0, 0.0); m];
    let mut mass = 0.0;
    for (idx, z) in values.samples().iter().enumerate() {
        if *z == Complex64::new(0.0, 0.0) {
            continue;
        }
        let (row, col) = (idx / m, idx % m);
        if !rows.contains(&row) || !cols.contains(&col) {
            support_ok = false;
        }
        row_sums[row] += z;
        col_sums[col] += z;
        mass += z.norm();
    }
    let worst = row_sums
        .iter()
        .chain(&col_sums)
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    PieceCheck {
        support_ok,
        residual: if mass == 0.0 { 0.0 } else { worst / mass },
    }
}

/// Errors unless `values` is supported in `3R` and cancels along rows and
/// columns.
pub fn check_piece_values(values: &GridFunction, rect: &DyadicRectangle) -> Result<()> {
    let check = piece_check(values, rect);
    if !check.support_ok {
        return Err(LabError::InvalidPiece(format!(
            "values leave 3R for R = {rect}"
        )));
    }
    if check.residual > CANCELLATION_TOLERANCE {
        return Err(LabError::InvalidPiece(format!(
            "cancellation residual {:e} on R = {rect}",
            check.residual
        )));
    }
    Ok(())
}

fn check_resolution(grid: GridSpec, rect: &DyadicRectangle) -> Result<()> {
    let window = Span::new(0.0, grid.window_length());
    for side in [rect.first, rect.second] {
        if !window.contains_span(&side.span()) {
            return Err(LabError::OutsideWindow {
                what: format!("rectangle {rect}"),
            });
        }
        if side.scale() - 1 < -grid.resolution_exp {
            return Err(LabError::InvalidPiece(format!(
                "rectangle {rect} is finer than the grid allows"
            )));
        }
    }
    Ok(())
}

/// Unit-height Haar tensor `h_I(x₁) h_J(x₂)`: `+1` on the left half, `−1` on
/// the right half of each side.
pub fn haar_values(grid: GridSpec, rect: &DyadicRectangle) -> GridFunction {
    let haar = |side: &crate::geometry::DyadicInterval, x: f64| -> f64 {
        if !side.contains_point(x) {
            0.0
        } else if x < side.center() {
            1.0
        } else {
            -1.0
        }
    };
    GridFunction::from_fn(grid, |x1, x2| {
        Complex64::new(haar(&rect.first, x1) * haar(&rect.second, x2), 0.0)
    })
}

/// Seeded field on `3R ∩ window`, projected onto the cancellation subspace by
/// subtracting row means and then column means.
pub fn random_values(grid: GridSpec, rect: &DyadicRectangle, seed: u64) -> GridFunction {
    let m = grid.side();
    let (cols, rows) = triple_ranges(grid, rect);
    let (w, h) = (cols.len(), rows.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut block: Vec<f64> = (0..w * h).map(|_| rng.random_range(-1.0..1.0)).collect();
    for r in 0..h {
        let row = &mut block[r * w..(r + 1) * w];
        let mean = row.iter().sum::<f64>() / w as f64;
        row.iter_mut().for_each(|v| *v -= mean);
    }
    for c in 0..w {
        let mean = (0..h).map(|r| block[r * w + c]).sum::<f64>() / h as f64;
        for r in 0..h {
            block[r * w + c] -= mean;
        }
    }
    let mut samples = vec![Complex64::new(0.0, 0.0); m * m];
    for (r, row) in rows.clone().enumerate() {
        for (c, col) in cols.clone().enumerate() {
            samples[row * m + col] = Complex64::new(block[r * w + c], 0.0);
        }
    }
    GridFunction::from_samples(grid, samples).expect("shape matches grid")
}

/// A sampled function adapted to one maximal rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomPiece {
    rect: DyadicRectangle,
    direction: Direction,
    values: GridFunction,
}

impl AtomPiece {
    pub fn new(rect: DyadicRectangle, direction: Direction, values: GridFunction) -> Result<Self> {
        check_piece_values(&values, &rect)?;
        Ok(AtomPiece {
            rect,
            direction,
            values,
        })
    }

    pub fn rect(&self) -> &DyadicRectangle {
        &self.rect
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn values(&self) -> &GridFunction {
        &self.values
    }

    pub fn grid(&self) -> GridSpec {
        self.values.grid()
    }

    pub fn check(&self) -> PieceCheck {
        piece_check(&self.values, &self.rect)
    }
}

pub fn make_piece(
    rect: DyadicRectangle,
    direction: Direction,
    pattern: PiecePattern,
    grid: GridSpec,
) -> Result<AtomPiece> {
    check_resolution(grid, &rect)?;
    let values = match pattern {
        PiecePattern::Haar => haar_values(grid, &rect),
        PiecePattern::Random { seed } => random_values(grid, &rect, seed),
    };
    AtomPiece::new(rect, direction, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DyadicInterval;

    fn unit_square() -> DyadicRectangle {
        DyadicRectangle::new(DyadicInterval::new(1, 0), DyadicInterval::new(1, 0))
    }

    #[test]
    fn haar_piece_cancels_and_has_unit_height() {
        let grid = GridSpec::new(2, 3);
        let piece = make_piece(unit_square(), Direction::Second, PiecePattern::Haar, grid).unwrap();
        let check = piece.check();
        assert!(check.support_ok);
        assert_eq!(check.residual, 0.0);
        for q in [1.25, 1.5, 1.9] {
            let norm = piece.values().lp_norm(q);
            assert!((norm - 1.0).abs() < 1e-14);
        }
        let small = DyadicRectangle::new(DyadicInterval::new(0, -2), DyadicInterval::new(0, -1));
        let piece = make_piece(small, Direction::First, PiecePattern::Haar, grid).unwrap();
        let area: f64 = small.area();
        assert!((piece.values().lp_norm(1.5) - area.powf(1.0 / 1.5)).abs() < 1e-14);
    }

    #[test]
    fn random_pieces_cancel_for_every_seed() {
        let grid = GridSpec::new(2, 3);
        for seed in 0..20 {
            let piece = make_piece(
                unit_square(),
                Direction::Second,
                PiecePattern::Random { seed },
                grid,
            )
            .unwrap();
            let check = piece.check();
            assert!(
                check.support_ok && check.residual <= CANCELLATION_TOLERANCE,
                "{check:?}"
            );
            assert!(piece.values().max_abs() > 0.0);
        }
    }

    #[test]
    fn random_piece_at_window_edge_is_clipped() {
        let grid = GridSpec::new(1, 3);
        let corner = DyadicRectangle::new(DyadicInterval::new(0, 0), DyadicInterval::new(0, -1));
        let piece = make_piece(
            corner,
            Direction::First,
            PiecePattern::Random { seed: 4 },
            grid,
        )
        .unwrap();
        assert!(piece.check().ok());
    }

    #[test]
    fn invalid_values_are_rejected() {
        let grid = GridSpec::new(2, 2);
        let spike = GridFunction::from_fn(grid, |x, y| {
            Complex64::new(if x == 0.0 && y == 0.0 { 1.0 } else { 0.0 }, 0.0)
        });
        assert!(AtomPiece::new(unit_square(), Direction::Second, spike).is_err());
        let outside = DyadicRectangle::new(DyadicInterval::new(4, 0), DyadicInterval::new(0, 0));
        assert!(matches!(
            make_piece(outside, Direction::Second, PiecePattern::Haar, grid),
            Err(LabError::OutsideWindow { .. })
        ));
        let fine = DyadicRectangle::new(DyadicInterval::new(0, -2), DyadicInterval::new(0, 0));
        assert!(make_piece(fine, Direction::Second, PiecePattern::Haar, grid).is_err());
    }
}
