//! Product-dyadic geometry of open sets on a finite grid.
//!
//! Every set lives in the window `[0, 2ᴸ)²` at base resolution `2⁻ᴷ`, and
//! dyadic scales range over `[−K, L]`, so all maximal families and sums are
//! finite and computed exactly.

mod annulus;
mod counting;
mod enlarge;
mod interval;
mod maximal;
mod open_set;

use std::sync::{Arc, OnceLock};

pub use annulus::{annulus, annulus_indices, product_annulus, Region};
pub use counting::{counting_sum, CountingSum, StepFunction};
pub use enlarge::{
    enlarge, enlarge_with, strong_maximal_dyadic, Enlargement, EnlargementCache, MaximalOperator,
};
pub use interval::{pow2, Direction, DyadicInterval, DyadicRectangle, Span};
pub use maximal::{is_maximal, maximal_rects};
pub use open_set::{CellCounts, GridOpenSet};

use crate::error::{LabError, Result};

/// A maximal rectangle together with its embeddedness in Ω̃.
///
/// For `direction == Second` (R ∈ M₂(Ω)) `hat` is the maximal dyadic `Î ⊇ I`
/// with `Î × J ⊆ Ω̃` and `gamma = |Î|/|I|`; for `First` the roles of the two
/// sides swap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbeddedRectangle {
    pub rect: DyadicRectangle,
    pub hat: DyadicInterval,
    pub gamma_exp: u32,
    pub direction: Direction,
}

impl EmbeddedRectangle {
    pub fn gamma(&self) -> f64 {
        pow2(self.gamma_exp as i32)
    }
}

/// An open set with its enlargement and lazily computed maximal families.
#[derive(Debug, Clone)]
pub struct OpenSetGeometry {
    omega: GridOpenSet,
    enlargement: Arc<Enlargement>,
    first: OnceLock<Vec<EmbeddedRectangle>>,
    second: OnceLock<Vec<EmbeddedRectangle>>,
}

impl OpenSetGeometry {
    pub fn new(omega: GridOpenSet) -> Self {
        let enlargement = Arc::new(Enlargement::new(&omega));
        OpenSetGeometry::with_enlargement(omega, enlargement)
    }

    /// Uses a previously computed enlargement, e.g. from an
    /// [`EnlargementCache`].
    pub fn with_enlargement(omega: GridOpenSet, enlargement: Arc<Enlargement>) -> Self {
        OpenSetGeometry {
            omega,
            enlargement,
            first: OnceLock::new(),
            second: OnceLock::new(),
        }
    }

    pub fn omega(&self) -> &GridOpenSet {
        &self.omega
    }

    pub fn enlargement(&self) -> &Enlargement {
        &self.enlargement
    }

    /// `|Ω̃| / |Ω|`, or 1 for the empty set.
    pub fn enlargement_ratio(&self) -> f64 {
        let m = self.omega.measure();
        if m == 0.0 {
            1.0
        } else {
            self.enlargement.measure() / m
        }
    }

    /// The maximal family in `direction`, each rectangle embedded in Ω̃.
    pub fn embedded(&self, direction: Direction) -> &[EmbeddedRectangle] {
        let cell = match direction {
            Direction::First => &self.first,
            Direction::Second => &self.second,
        };
        cell.get_or_init(|| {
            maximal_rects(&self.omega, direction)
                .into_iter()
                .map(|r| self.embed_unchecked(r, direction))
                .collect()
        })
    }

    pub fn embed(&self, rect: &DyadicRectangle, direction: Direction) -> Result<EmbeddedRectangle> {
        if !self.omega.contains_rectangle(rect) {
            return Err(LabError::NotMemberRectangle(format!("{rect} ⊄ Ω")));
        }
        Ok(self.embed_unchecked(*rect, direction))
    }

    fn embed_unchecked(&self, rect: DyadicRectangle, direction: Direction) -> EmbeddedRectangle {
        let grow = direction.other();
        let top = self.omega.window_exp() as i32;
        let mut hat = rect.side(grow);
        let mut gamma_exp = 0;
        while hat.scale() < top
            && self
                .enlargement
                .contains_rectangle(&rect.with_side(grow, hat.parent()))
        {
            hat = hat.parent();
            gamma_exp += 1;
        }
        EmbeddedRectangle {
            rect,
            hat,
            gamma_exp,
            direction,
        }
    }

    /// `Σ_{R ∈ M_d(Ω)} γ(R)^{−δ} |R|`.
    pub fn journe_sum(&self, delta: f64, direction: Direction) -> Result<f64> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(LabError::NonPositiveDelta(delta));
        }
        Ok(self
            .embedded(direction)
            .iter()
            .map(|e| e.gamma().powf(-delta) * e.rect.area())
            .sum())
    }

    /// `Σ γ₁(R)^β |R|` over `R = I × J ∈ M₂(Ω)` with `x ∈ 2^u I × 2^v J`.
    pub fn geometric_sum(&self, x: (f64, f64), u: u32, v: u32, beta: f64) -> Result<f64> {
        check_beta(beta)?;
        Ok(self
            .embedded(Direction::Second)
            .iter()
            .filter(|e| {
                let (a, b) = e.rect.dilate(u, v);
                a.contains(x.0) && b.contains(x.1)
            })
            .map(|e| e.gamma().powf(beta) * e.rect.area())
            .sum())
    }

    /// `g(y) = |{x₁ : (x₁, y) ∈ Ω̃}|`.
    pub fn slice_measure(&self, y: f64) -> f64 {
        slice_measure(self.enlargement.set(), y)
    }

    /// Maximal dyadic `Î` with `Î × J ⊆ Ω̃`; their union is `F_J`.
    pub fn f_j_intervals(&self, j: &DyadicInterval) -> Vec<DyadicInterval> {
        let set = self.enlargement.set();
        let k = set.base_exp() as i32;
        let side = set.side();
        let Some((r0, r1)) = j.cells(k).filter(|&(_, r1)| r1 <= side) else {
            return Vec::new();
        };
        let counts = self.enlargement.counts();
        let bits: Vec<bool> = (0..side)
            .map(|c| counts.is_full(r0, r1, c, c + 1))
            .collect();
        let mut tree = vec![false; 2 * side];
        let mut out = Vec::new();
        maximal::collect_maximal_blocks(&bits, &mut tree, |pos, level| {
            out.push(DyadicInterval::new(pos as i64, level as i32 - k));
        });
        out.sort();
        out
    }

    /// `|F_J|`.
    pub fn f_j_measure(&self, j: &DyadicInterval) -> f64 {
        self.f_j_intervals(j)
            .iter()
            .map(DyadicInterval::length)
            .sum()
    }
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(LabError::BetaOutOfRange(beta))
    }
}

/// Embeds a member rectangle, computing Ω̃ from scratch.
pub fn embed(
    rect: &DyadicRectangle,
    omega: &GridOpenSet,
    direction: Direction,
) -> Result<EmbeddedRectangle> {
    OpenSetGeometry::new(omega.clone()).embed(rect, direction)
}

pub fn journe_sum(omega: &GridOpenSet, delta: f64, direction: Direction) -> Result<f64> {
    OpenSetGeometry::new(omega.clone()).journe_sum(delta, direction)
}

pub fn geometric_sum(omega: &GridOpenSet, x: (f64, f64), u: u32, v: u32, beta: f64) -> Result<f64> {
    OpenSetGeometry::new(omega.clone()).geometric_sum(x, u, v, beta)
}

pub fn f_j_measure(omega: &GridOpenSet, j: &DyadicInterval) -> f64 {
    OpenSetGeometry::new(omega.clone()).f_j_measure(j)
}

/// Slice measure of an (already enlarged) set at height `y`; zero outside
/// the window.
pub fn slice_measure(enlarged: &GridOpenSet, y: f64) -> f64 {
    let row = (y / enlarged.cell_length()).floor();
    if row < 0.0 || row >= enlarged.side() as f64 {
        return 0.0;
    }
    enlarged.row_measure(row as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(m1: i64, n1: i32, m2: i64, n2: i32) -> DyadicRectangle {
        DyadicRectangle::new(DyadicInterval::new(m1, n1), DyadicInterval::new(m2, n2))
    }

    fn unit_square(l: u32, k: u32) -> GridOpenSet {
        GridOpenSet::from_rectangles(l, k, &[rect(0, 0, 0, 0)]).unwrap()
    }

    #[test]
    fn embed_in_single_rectangle() {
        // Ω = [0,2)×[0,1/2), R = [1/2,3/4)×[0,1/2): Î = [0,2), γ = 8
        let omega = GridOpenSet::from_rectangles(1, 3, &[rect(0, 1, 0, -1)]).unwrap();
        let e = embed(&rect(2, -2, 0, -1), &omega, Direction::Second).unwrap();
        assert_eq!(e.hat, DyadicInterval::new(0, 1));
        assert_eq!(e.gamma(), 8.0);
    }

    #[test]
    fn embed_unit_square() {
        let omega = unit_square(1, 2);
        let e = embed(&rect(0, 0, 0, 0), &omega, Direction::Second).unwrap();
        assert_eq!(e.gamma(), 1.0);
        let e = embed(&rect(0, -2, 0, 0), &omega, Direction::Second).unwrap();
        assert_eq!(e.hat, DyadicInterval::new(0, 0));
        assert_eq!(e.gamma(), 4.0);
    }

    #[test]
    fn embed_rejects_non_members() {
        let omega = unit_square(1, 2);
        let err = embed(&rect(1, 0, 0, 0), &omega, Direction::Second).unwrap_err();
        assert!(matches!(err, LabError::NotMemberRectangle(_)));
    }

    #[test]
    fn hat_is_the_top_of_the_containment_chain() {
        // the intervals above I form a chain; every one below Î fits, none above
        let omega =
            GridOpenSet::from_cells(1, 2, [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1)]).unwrap();
        let geo = OpenSetGeometry::new(omega);
        for e in geo.embedded(Direction::Second) {
            let mut i = e.rect.first;
            while i.scale() < 1 {
                let fits = geo
                    .enlargement()
                    .contains_rectangle(&e.rect.with_side(Direction::First, i));
                assert_eq!(fits, e.hat.contains(&i));
                i = i.parent();
            }
        }
    }

    #[test]
    fn journe_sum_on_unit_square() {
        let omega = unit_square(1, 4);
        assert_eq!(journe_sum(&omega, 1.0, Direction::Second).unwrap(), 1.9375);
        assert_eq!(
            journe_sum(&GridOpenSet::empty(1, 4), 0.5, Direction::Second).unwrap(),
            0.0
        );
        assert_eq!(
            journe_sum(&omega, 0.0, Direction::Second),
            Err(LabError::NonPositiveDelta(0.0))
        );
    }

    #[test]
    fn geometric_sum_on_unit_square() {
        let omega = unit_square(1, 4);
        let got = geometric_sum(&omega, (0.5, 0.5), 0, 0, 0.5).unwrap();
        let expected: f64 = (0..=4).map(|n| 2f64.powf(-0.5 * n as f64)).sum();
        assert!((got - expected).abs() < 1e-14);
        assert!((got - 2.810_660_171_779_821).abs() < 1e-12);
        assert_eq!(
            geometric_sum(&GridOpenSet::empty(1, 4), (0.5, 0.5), 0, 0, 0.5).unwrap(),
            0.0
        );
        assert_eq!(
            geometric_sum(&omega, (0.5, 0.5), 0, 0, 1.0),
            Err(LabError::BetaOutOfRange(1.0))
        );
    }

    #[test]
    fn slices_of_unit_square() {
        let omega = unit_square(1, 2);
        let tilde = enlarge(&omega);
        assert_eq!(slice_measure(&tilde, 0.5), 1.0);
        assert_eq!(slice_measure(&tilde, 1.5), 0.0);
        assert_eq!(slice_measure(&tilde, -0.5), 0.0);
    }

    #[test]
    fn f_j_on_unit_square() {
        let omega = unit_square(1, 2);
        assert_eq!(f_j_measure(&omega, &DyadicInterval::new(0, 0)), 1.0);
        assert_eq!(
            f_j_measure(&GridOpenSet::empty(1, 2), &DyadicInterval::new(0, 0)),
            0.0
        );
    }
}
