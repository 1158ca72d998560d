use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::interval::DyadicRectangle;
use super::open_set::{CellCounts, GridOpenSet};

/// Which strong maximal operator defines the enlargement Ω̃.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaximalOperator {
    /// Supremum of averages over dyadic rectangles containing the point.
    #[default]
    Dyadic,
    /// Supremum over every cell-aligned rectangle containing the point.
    /// Quartic in the grid side; meant for cross-checks on small windows.
    GridAligned,
}

/// Dyadic strong maximal function of `χ_Ω`, one value per base cell
/// (row-major). Only rectangles inside the window are tested; a dyadic
/// rectangle sticking out of the window contains the whole window in one
/// direction and so never has density above 1/2 for Ω inside the window.
pub fn strong_maximal_dyadic(omega: &GridOpenSet) -> Vec<f64> {
    let side = omega.side();
    let depth = (omega.window_exp() + omega.base_exp()) as usize;
    let levels = depth + 1;
    let idx = |a: usize, b: usize| a * levels + b;

    // counts[(a, b)] has (side >> b) rows and (side >> a) columns.
    let mut grids: Vec<Vec<f64>> = vec![Vec::new(); levels * levels];
    grids[idx(0, 0)] = omega.mask().iter().map(|&b| b as u8 as f64).collect();
    for a in 0..levels {
        if a > 0 {
            let prev = &grids[idx(a - 1, 0)];
            let (rows, cols) = (side, side >> a);
            let mut next = vec![0.0; rows * cols];
            for r in 0..rows {
                for c in 0..cols {
                    next[r * cols + c] =
                        prev[r * 2 * cols + 2 * c] + prev[r * 2 * cols + 2 * c + 1];
                }
            }
            grids[idx(a, 0)] = next;
        }
        for b in 1..levels {
            let prev = &grids[idx(a, b - 1)];
            let (rows, cols) = (side >> b, side >> a);
            let mut next = vec![0.0; rows * cols];
            for r in 0..rows {
                for c in 0..cols {
                    next[r * cols + c] = prev[2 * r * cols + c] + prev[(2 * r + 1) * cols + c];
                }
            }
            grids[idx(a, b)] = next;
        }
    }
    // Counts are exact small integers and areas are powers of two, so the
    // densities are exact.
    for a in 0..levels {
        for b in 0..levels {
            let area = (1u64 << (a + b)) as f64;
            grids[idx(a, b)].iter_mut().for_each(|v| *v /= area);
        }
    }
    // Top-down: best over all ancestors in either direction.
    for a in (0..levels).rev() {
        for b in (0..levels).rev() {
            let cols = side >> a;
            let rows = side >> b;
            let mut current = std::mem::take(&mut grids[idx(a, b)]);
            if a + 1 < levels {
                let up = &grids[idx(a + 1, b)];
                let up_cols = cols / 2;
                for r in 0..rows {
                    for c in 0..cols {
                        let v = up[r * up_cols + c / 2];
                        if v > current[r * cols + c] {
                            current[r * cols + c] = v;
                        }
                    }
                }
            }
            if b + 1 < levels {
                let up = &grids[idx(a, b + 1)];
                for r in 0..rows {
                    for c in 0..cols {
                        let v = up[(r / 2) * cols + c];
                        if v > current[r * cols + c] {
                            current[r * cols + c] = v;
                        }
                    }
                }
            }
            grids[idx(a, b)] = current;
        }
    }
    std::mem::take(&mut grids[idx(0, 0)])
}

/// Ω̃ = {x : M_s χ_Ω(x) > 1/2} with the dyadic strong maximal function.
pub fn enlarge(omega: &GridOpenSet) -> GridOpenSet {
    enlarge_with(omega, MaximalOperator::Dyadic)
}

pub fn enlarge_with(omega: &GridOpenSet, operator: MaximalOperator) -> GridOpenSet {
    let mask = match operator {
        MaximalOperator::Dyadic => strong_maximal_dyadic(omega)
            .into_iter()
            .map(|v| v > 0.5)
            .collect(),
        MaximalOperator::GridAligned => grid_aligned_mask(omega),
    };
    GridOpenSet::from_mask(omega.window_exp(), omega.base_exp(), mask)
        .expect("mask has the shape of its source")
}

fn grid_aligned_mask(omega: &GridOpenSet) -> Vec<bool> {
    let side = omega.side();
    let counts = CellCounts::new(omega);
    let stride = side + 1;
    let mut diff = vec![0i64; stride * stride];
    for r0 in 0..side {
        for r1 in r0 + 1..=side {
            for c0 in 0..side {
                for c1 in c0 + 1..=side {
                    let area = ((r1 - r0) * (c1 - c0)) as u64;
                    if 2 * counts.count(r0, r1, c0, c1) > area {
                        diff[r0 * stride + c0] += 1;
                        diff[r0 * stride + c1] -= 1;
                        diff[r1 * stride + c0] -= 1;
                        diff[r1 * stride + c1] += 1;
                    }
                }
            }
        }
    }
    let mut mask = vec![false; side * side];
    let mut acc = vec![0i64; stride * stride];
    for r in 0..side {
        for c in 0..side {
            let above = if r > 0 { acc[(r - 1) * stride + c] } else { 0 };
            let left = if c > 0 { acc[r * stride + c - 1] } else { 0 };
            let diag = if r > 0 && c > 0 {
                acc[(r - 1) * stride + c - 1]
            } else {
                0
            };
            let v = diff[r * stride + c] + above + left - diag;
            acc[r * stride + c] = v;
            mask[r * side + c] = v > 0;
        }
    }
    mask
}

/// A computed enlargement Ω̃ with box counts for containment queries.
#[derive(Debug, Clone)]
pub struct Enlargement {
    set: GridOpenSet,
    counts: CellCounts,
}

impl Enlargement {
    pub fn new(omega: &GridOpenSet) -> Self {
        Enlargement::from_enlarged(enlarge(omega))
    }

    pub fn from_enlarged(set: GridOpenSet) -> Self {
        let counts = CellCounts::new(&set);
        Enlargement { set, counts }
    }

    pub fn set(&self) -> &GridOpenSet {
        &self.set
    }

    pub fn measure(&self) -> f64 {
        self.set.measure()
    }

    pub fn contains_rectangle(&self, rect: &DyadicRectangle) -> bool {
        match self.set.rect_cells(rect) {
            None => false,
            Some((r0, r1, c0, c1)) => self.counts.is_full(r0, r1, c0, c1),
        }
    }

    pub(crate) fn counts(&self) -> &CellCounts {
        &self.counts
    }
}

type Bucket = Vec<(GridOpenSet, Arc<Enlargement>)>;

/// Write-once map from open sets to their enlargements, keyed by content
/// hash. Concurrent callers may race to compute the same entry; the first
/// insertion wins and every caller receives the stored value.
#[derive(Debug, Default)]
pub struct EnlargementCache {
    entries: Mutex<HashMap<u64, Bucket>>,
}

impl EnlargementCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_compute(&self, omega: &GridOpenSet) -> Arc<Enlargement> {
        let key = omega.content_hash();
        if let Some(hit) = self.lookup(key, omega) {
            return hit;
        }
        let computed = Arc::new(Enlargement::new(omega));
        let mut entries = self.entries.lock().expect("enlargement cache poisoned");
        let bucket = entries.entry(key).or_default();
        if let Some((_, existing)) = bucket.iter().find(|(set, _)| set == omega) {
            return Arc::clone(existing);
        }
        bucket.push((omega.clone(), Arc::clone(&computed)));
        computed
    }

    pub fn len(&self) -> usize {
        self.entries
            .lock()
            .expect("enlargement cache poisoned")
            .values()
            .map(Vec::len)
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn lookup(&self, key: u64, omega: &GridOpenSet) -> Option<Arc<Enlargement>> {
        let entries = self.entries.lock().expect("enlargement cache poisoned");
        entries
            .get(&key)?
            .iter()
            .find(|(set, _)| set == omega)
            .map(|(_, e)| Arc::clone(e))
    }
}
