use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use super::interval::{pow2, DyadicInterval, DyadicRectangle};
use crate::error::{LabError, Result};

/// Finite-resolution open set Ω inside the window `[0, 2ᴸ)²`.
///
/// The set is a union of base cells of side `2⁻ᴷ`. Cell `(row, col)` covers
/// `x₁ ∈ [col·2⁻ᴷ, (col+1)·2⁻ᴷ)` and `x₂ ∈ [row·2⁻ᴷ, (row+1)·2⁻ᴷ)`, so a row
/// is a horizontal slice at fixed x₂.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridOpenSet {
    window_exp: u32,
    base_exp: u32,
    mask: Vec<bool>,
}

impl GridOpenSet {
    pub fn empty(window_exp: u32, base_exp: u32) -> Self {
        let side = 1usize << (window_exp + base_exp);
        GridOpenSet {
            window_exp,
            base_exp,
            mask: vec![false; side * side],
        }
    }

    pub fn from_mask(window_exp: u32, base_exp: u32, mask: Vec<bool>) -> Result<Self> {
        let side = 1usize << (window_exp + base_exp);
        if mask.len() != side * side {
            return Err(LabError::ShapeMismatch {
                expected: side * side,
                actual: mask.len(),
            });
        }
        Ok(GridOpenSet {
            window_exp,
            base_exp,
            mask,
        })
    }

    pub fn from_cells<I>(window_exp: u32, base_exp: u32, cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = GridOpenSet::empty(window_exp, base_exp);
        let side = set.side();
        for (row, col) in cells {
            if row >= side || col >= side {
                return Err(LabError::OutsideWindow {
                    what: format!("cell ({row}, {col})"),
                });
            }
            set.mask[row * side + col] = true;
        }
        Ok(set)
    }

    /// Union of dyadic rectangles, each at least one base cell wide.
    pub fn from_rectangles(
        window_exp: u32,
        base_exp: u32,
        rects: &[DyadicRectangle],
    ) -> Result<Self> {
        let mut set = GridOpenSet::empty(window_exp, base_exp);
        for rect in rects {
            set.insert_rectangle(rect)?;
        }
        Ok(set)
    }

    pub fn insert_rectangle(&mut self, rect: &DyadicRectangle) -> Result<()> {
        let (r0, r1, c0, c1) = self
            .rect_cells(rect)
            .ok_or_else(|| LabError::OutsideWindow {
                what: format!("rectangle {rect}"),
            })?;
        let side = self.side();
        for row in r0..r1 {
            self.mask[row * side + c0..row * side + c1].fill(true);
        }
        Ok(())
    }

    pub fn window_exp(&self) -> u32 {
        self.window_exp
    }

    pub fn base_exp(&self) -> u32 {
        self.base_exp
    }

    /// Number of base cells per window side, `2^(L+K)`.
    pub fn side(&self) -> usize {
        1usize << (self.window_exp + self.base_exp)
    }

    pub fn cell_length(&self) -> f64 {
        pow2(-(self.base_exp as i32))
    }

    pub fn window_length(&self) -> f64 {
        pow2(self.window_exp as i32)
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.mask[row * self.side() + col]
    }

    pub fn cell_count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn measure(&self) -> f64 {
        self.cell_count() as f64 * pow2(-2 * self.base_exp as i32)
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    /// True cells as `(row, col)` in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let side = self.side();
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(idx, _)| (idx / side, idx % side))
    }

    /// Whether `x` lies in the closure-free union of true cells.
    pub fn contains_point(&self, x: (f64, f64)) -> bool {
        let h = self.cell_length();
        let side = self.side() as f64;
        let col = (x.0 / h).floor();
        let row = (x.1 / h).floor();
        if col < 0.0 || row < 0.0 || col >= side || row >= side {
            return false;
        }
        self.get(row as usize, col as usize)
    }

    /// Cell index box `(row0, row1, col0, col1)` covered by `rect`, or `None`
    /// when the rectangle leaves the window or is finer than a base cell.
    pub fn rect_cells(&self, rect: &DyadicRectangle) -> Option<(usize, usize, usize, usize)> {
        let k = self.base_exp as i32;
        let (c0, c1) = rect.first.cells(k)?;
        let (r0, r1) = rect.second.cells(k)?;
        let side = self.side();
        if c1 > side || r1 > side {
            return None;
        }
        Some((r0, r1, c0, c1))
    }

    /// Whether the dyadic rectangle lies inside Ω.
    pub fn contains_rectangle(&self, rect: &DyadicRectangle) -> bool {
        match self.rect_cells(rect) {
            None => false,
            Some((r0, r1, c0, c1)) => {
                let side = self.side();
                (r0..r1).all(|row| {
                    self.mask[row * side + c0..row * side + c1]
                        .iter()
                        .all(|&b| b)
                })
            }
        }
    }

    /// Slice measure at row index: `|{x₁ : (x₁, y) ∈ Ω}|` for `y` in that row.
    pub fn row_measure(&self, row: usize) -> f64 {
        let side = self.side();
        let count = self.mask[row * side..(row + 1) * side]
            .iter()
            .filter(|&&b| b)
            .count();
        count as f64 * self.cell_length()
    }

    /// The same set at twice the base resolution.
    pub fn refined(&self) -> GridOpenSet {
        let side = self.side();
        let fine_side = 2 * side;
        let mut mask = vec![false; fine_side * fine_side];
        for (row, col) in self.cells() {
            for dr in 0..2 {
                for dc in 0..2 {
                    mask[(2 * row + dr) * fine_side + 2 * col + dc] = true;
                }
            }
        }
        GridOpenSet {
            window_exp: self.window_exp,
            base_exp: self.base_exp + 1,
            mask,
        }
    }

    /// Transposed set `{(x₂, x₁) : (x₁, x₂) ∈ Ω}`.
    pub fn transposed(&self) -> GridOpenSet {
        let side = self.side();
        let mut mask = vec![false; side * side];
        for (row, col) in self.cells() {
            mask[col * side + row] = true;
        }
        GridOpenSet {
            window_exp: self.window_exp,
            base_exp: self.base_exp,
            mask,
        }
    }

    /// Smallest and largest scale exponents of dyadic intervals in the window.
    pub fn scale_range(&self) -> (i32, i32) {
        (-(self.base_exp as i32), self.window_exp as i32)
    }

    /// Every dyadic interval inside the window, coarse scales first.
    pub fn dyadic_intervals(&self) -> Vec<DyadicInterval> {
        let (lo, hi) = self.scale_range();
        let mut out = Vec::new();
        for scale in (lo..=hi).rev() {
            let count = 1i64 << (self.window_exp as i32 - scale);
            out.extend((0..count).map(|m| DyadicInterval::new(m, scale)));
        }
        out
    }

    /// Content hash of `(L, K, mask)`, used to key enlargement caches.
    pub fn content_hash(&self) -> u64 {
        let mut hasher = DefaultHasher::new();
        self.hash(&mut hasher);
        hasher.finish()
    }
}

/// Summed-area table over a set's cells for O(1) box counts.
#[derive(Debug, Clone)]
pub struct CellCounts {
    side: usize,
    table: Vec<u32>,
}

impl CellCounts {
    pub fn new(set: &GridOpenSet) -> Self {
        let side = set.side();
        let stride = side + 1;
        let mut table = vec![0u32; stride * stride];
        for row in 0..side {
            let mut running = 0u32;
            for col in 0..side {
                running += set.mask[row * side + col] as u32;
                table[(row + 1) * stride + col + 1] = table[row * stride + col + 1] + running;
            }
        }
        CellCounts { side, table }
    }

    /// Number of true cells in rows `r0..r1` and columns `c0..c1`.
    pub fn count(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> u64 {
        let stride = self.side + 1;
        let t = |r: usize, c: usize| self.table[r * stride + c] as i64;
        (t(r1, c1) - t(r0, c1) - t(r1, c0) + t(r0, c0)) as u64
    }

    pub fn is_full(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> bool {
        self.count(r0, r1, c0, c1) == ((r1 - r0) * (c1 - c0)) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square(l: u32, k: u32) -> GridOpenSet {
        let r = DyadicRectangle::new(DyadicInterval::new(0, 0), DyadicInterval::new(0, 0));
        GridOpenSet::from_rectangles(l, k, &[r]).unwrap()
    }

    #[test]
    fn measure_counts_cells() {
        let set = unit_square(1, 2);
        assert_eq!(set.cell_count(), 16);
        assert_eq!(set.measure(), 1.0);
        assert!(GridOpenSet::empty(1, 2).is_empty());
        assert_eq!(GridOpenSet::empty(1, 2).measure(), 0.0);
    }

    #[test]
    fn rectangle_outside_window_is_rejected() {
        let r = DyadicRectangle::new(DyadicInterval::new(2, 0), DyadicInterval::new(0, 0));
        assert!(matches!(
            GridOpenSet::from_rectangles(1, 1, &[r]),
            Err(LabError::OutsideWindow { .. })
        ));
        assert!(GridOpenSet::from_cells(0, 1, [(2, 0)]).is_err());
    }

    #[test]
    fn refinement_preserves_measure_and_points() {
        let set = GridOpenSet::from_cells(1, 1, [(0, 1), (2, 3), (3, 3)]).unwrap();
        let fine = set.refined();
        assert_eq!(fine.measure(), set.measure());
        for &(x, y) in &[(0.6, 0.2), (1.7, 1.2), (0.2, 0.2), (1.9, 1.9)] {
            assert_eq!(fine.contains_point((x, y)), set.contains_point((x, y)));
        }
    }

    #[test]
    fn counts_match_scan() {
        let set = GridOpenSet::from_cells(0, 3, [(0, 0), (1, 1), (1, 2), (5, 7), (7, 7)]).unwrap();
        let counts = CellCounts::new(&set);
        for r0 in 0..8 {
            for r1 in r0..=8 {
                for c0 in 0..8 {
                    for c1 in c0..=8 {
                        let scan = (r0..r1)
                            .flat_map(|r| (c0..c1).map(move |c| (r, c)))
                            .filter(|&(r, c)| set.get(r, c))
                            .count() as u64;
                        assert_eq!(counts.count(r0, r1, c0, c1), scan);
                    }
                }
            }
        }
    }

    #[test]
    fn dyadic_intervals_cover_all_scales() {
        let set = GridOpenSet::empty(1, 2);
        // scales 1, 0, -1, -2 hold 1, 2, 4, 8 intervals
        assert_eq!(set.dyadic_intervals().len(), 15);
    }
}
