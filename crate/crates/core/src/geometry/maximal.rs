use super::interval::{Direction, DyadicInterval, DyadicRectangle};
use super::open_set::GridOpenSet;

/// Dyadic rectangles `R ⊆ Ω` whose side in `direction` is maximal.
///
/// `Direction::Second` yields M₂(Ω): no dyadic `Ĵ ⊋ J` has `I × Ĵ ⊆ Ω`.
/// `Direction::First` yields M₁(Ω) symmetrically. Rectangles go down to the
/// base scale `2⁻ᴷ`; the output is sorted.
pub fn maximal_rects(omega: &GridOpenSet, direction: Direction) -> Vec<DyadicRectangle> {
    let mut out = match direction {
        Direction::Second => maximal_in_second(omega),
        Direction::First => maximal_in_second(&omega.transposed())
            .into_iter()
            .map(|r| DyadicRectangle::new(r.second, r.first))
            .collect(),
    };
    out.sort();
    out
}

/// Whether `rect` belongs to the maximal family of `omega` in `direction`.
pub fn is_maximal(omega: &GridOpenSet, rect: &DyadicRectangle, direction: Direction) -> bool {
    if !omega.contains_rectangle(rect) {
        return false;
    }
    let side = rect.side(direction);
    if side.scale() >= omega.window_exp() as i32 {
        return true;
    }
    !omega.contains_rectangle(&rect.with_side(direction, side.parent()))
}

fn maximal_in_second(omega: &GridOpenSet) -> Vec<DyadicRectangle> {
    let side = omega.side();
    let depth = (omega.window_exp() + omega.base_exp()) as usize;
    let k = omega.base_exp() as i32;
    let mut out = Vec::new();
    if omega.is_empty() {
        return out;
    }

    // full[row * width + t]: row `row` is entirely inside Ω across the t-th
    // column block of width 2^level cells.
    let mut full: Vec<bool> = omega.mask().to_vec();
    let mut width = side;
    let mut column = vec![false; side];
    let mut tree = vec![false; 2 * side];
    for level in 0..=depth {
        for t in 0..width {
            for row in 0..side {
                column[row] = full[row * width + t];
            }
            if !column.iter().any(|&b| b) {
                continue;
            }
            let first = DyadicInterval::new(t as i64, level as i32 - k);
            collect_maximal_blocks(&column, &mut tree, |pos, block_level| {
                let second = DyadicInterval::new(pos as i64, block_level as i32 - k);
                out.push(DyadicRectangle::new(first, second));
            });
        }
        if level < depth {
            let half = width / 2;
            let mut next = vec![false; side * half];
            for row in 0..side {
                for t in 0..half {
                    next[row * half + t] =
                        full[row * width + 2 * t] && full[row * width + 2 * t + 1];
                }
            }
            full = next;
            width = half;
        }
    }
    out
}

/// Calls `emit(position, level)` for every maximal dyadic block of true
/// entries in `bits` (length a power of two). `tree` is scratch space of
/// length `2 * bits.len()`.
pub(crate) fn collect_maximal_blocks<F>(bits: &[bool], tree: &mut [bool], mut emit: F)
where
    F: FnMut(usize, usize),
{
    let n = bits.len();
    // Heap layout: node 1 is the root, leaves at n..2n.
    tree[n..2 * n].copy_from_slice(bits);
    for node in (1..n).rev() {
        tree[node] = tree[2 * node] && tree[2 * node + 1];
    }
    let depth = n.trailing_zeros() as usize;
    for node in 1..2 * n {
        if !tree[node] || (node > 1 && tree[node / 2]) {
            continue;
        }
        let node_depth = (usize::BITS - 1 - node.leading_zeros()) as usize;
        let level = depth - node_depth;
        let position = node - (1usize << node_depth);
        emit(position, level);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(m1: i64, n1: i32, m2: i64, n2: i32) -> DyadicRectangle {
        DyadicRectangle::new(DyadicInterval::new(m1, n1), DyadicInterval::new(m2, n2))
    }

    /// Independent oracle: scan every dyadic rectangle in the window, test
    /// containment cell by cell and maximality against every ancestor.
    fn brute_force(omega: &GridOpenSet, direction: Direction) -> Vec<DyadicRectangle> {
        let intervals = omega.dyadic_intervals();
        let inside = |r: &DyadicRectangle| -> bool {
            let h = omega.cell_length();
            let mut x1 = r.first.start();
            while x1 < r.first.end() {
                let mut x2 = r.second.start();
                while x2 < r.second.end() {
                    if !omega.contains_point((x1 + 0.5 * h, x2 + 0.5 * h)) {
                        return false;
                    }
                    x2 += h;
                }
                x1 += h;
            }
            true
        };
        let mut out = Vec::new();
        for a in &intervals {
            for b in &intervals {
                let r = DyadicRectangle::new(*a, *b);
                if !inside(&r) {
                    continue;
                }
                let side = r.side(direction);
                let extendable = intervals
                    .iter()
                    .filter(|big| big.scale() > side.scale() && big.contains(&side))
                    .any(|big| inside(&r.with_side(direction, *big)));
                if !extendable {
                    out.push(r);
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn empty_set_has_no_maximal_rectangles() {
        let omega = GridOpenSet::empty(1, 2);
        assert!(maximal_rects(&omega, Direction::Second).is_empty());
        assert!(maximal_rects(&omega, Direction::First).is_empty());
    }

    #[test]
    fn unit_square_direction_two() {
        let omega = GridOpenSet::from_rectangles(1, 2, &[rect(0, 0, 0, 0)]).unwrap();
        let got = maximal_rects(&omega, Direction::Second);
        assert_eq!(got.len(), 7);
        for r in &got {
            assert_eq!(r.second, DyadicInterval::new(0, 0));
            assert!(r.first.scale() >= -2);
        }
        assert_eq!(got, brute_force(&omega, Direction::Second));
    }

    #[test]
    fn l_shape_matches_brute_force() {
        // [0,1)² ∪ [0,2)×[0,1/2)
        let omega =
            GridOpenSet::from_rectangles(1, 2, &[rect(0, 0, 0, 0), rect(0, 1, 0, -1)]).unwrap();
        for direction in [Direction::First, Direction::Second] {
            let got = maximal_rects(&omega, direction);
            assert_eq!(got, brute_force(&omega, direction));
            for r in &got {
                assert!(is_maximal(&omega, r, direction));
            }
        }
    }

    #[test]
    fn scattered_sets_match_brute_force() {
        let patterns: [&[(usize, usize)]; 3] = [
            &[
                (0, 0),
                (0, 1),
                (1, 0),
                (3, 3),
                (2, 3),
                (5, 6),
                (5, 7),
                (4, 6),
                (4, 7),
            ],
            &[(1, 1), (1, 2), (2, 1), (2, 2), (6, 0), (7, 0), (7, 1)],
            &[
                (0, 4),
                (1, 4),
                (2, 4),
                (3, 4),
                (0, 5),
                (1, 5),
                (2, 5),
                (3, 5),
                (3, 6),
            ],
        ];
        for cells in patterns {
            let omega = GridOpenSet::from_cells(1, 2, cells.iter().copied()).unwrap();
            for direction in [Direction::First, Direction::Second] {
                assert_eq!(
                    maximal_rects(&omega, direction),
                    brute_force(&omega, direction)
                );
            }
        }
    }

    #[test]
    fn maximal_blocks_of_bits() {
        let bits = [true, true, true, false, true, true, true, true];
        let mut tree = vec![false; 16];
        let mut got = Vec::new();
        collect_maximal_blocks(&bits, &mut tree, |p, l| got.push((p, l)));
        got.sort();
        assert_eq!(got, vec![(0, 1), (1, 2), (2, 0)]);
    }
}
