use super::interval::{pow2, DyadicInterval, DyadicRectangle, Span};
use crate::error::{LabError, Result};

/// Dyadic ring around `I`: `E₀(I) = 8I` and `E_u(I) = 2^u I \ 2^{u−1} I` for
/// `u ≥ 4`. All dilates are concentric and half-open, so the rings for
/// `u = 0, 4, 5, …` are pairwise disjoint and tile the line.
pub fn annulus(interval: &DyadicInterval, u: u32) -> Result<Vec<Span>> {
    match u {
        0 => Ok(vec![interval.dilate(8.0)]),
        1..=3 => Err(LabError::ExcludedAnnulus(u)),
        _ => {
            let outer = interval.dilate(pow2(u as i32));
            let inner = interval.dilate(pow2(u as i32 - 1));
            Ok(vec![
                Span::new(outer.lo, inner.lo),
                Span::new(inner.hi, outer.hi),
            ])
        }
    }
}

/// Annulus indices in use: 0, then 4, 5, 6, … up to `max` inclusive.
pub fn annulus_indices(max: u32) -> impl Iterator<Item = u32> {
    std::iter::once(0).chain(4..=max)
}

/// Union of axis-parallel boxes `S₁ × S₂`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Region {
    pub boxes: Vec<(Span, Span)>,
}

impl Region {
    pub fn new(boxes: Vec<(Span, Span)>) -> Self {
        Region { boxes }
    }

    pub fn rectangle(first: Span, second: Span) -> Self {
        Region::new(vec![(first, second)])
    }

    pub fn contains(&self, x: (f64, f64)) -> bool {
        self.boxes
            .iter()
            .any(|(a, b)| a.contains(x.0) && b.contains(x.1))
    }

    /// Intersection with the square `[0, side)²`, dropping empty boxes.
    pub fn clipped(&self, side: f64) -> Region {
        let window = Span::new(0.0, side);
        Region::new(
            self.boxes
                .iter()
                .map(|(a, b)| (a.intersect(&window), b.intersect(&window)))
                .filter(|(a, b)| !a.is_empty() && !b.is_empty())
                .collect(),
        )
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.iter().all(|(a, b)| a.is_empty() || b.is_empty())
    }
}

/// Product annulus `E_{u,v}(R) = E_u(I) × E_v(J)`.
pub fn product_annulus(rect: &DyadicRectangle, u: u32, v: u32) -> Result<Region> {
    let first = annulus(&rect.first, u)?;
    let second = annulus(&rect.second, v)?;
    let mut boxes = Vec::with_capacity(first.len() * second.len());
    for a in &first {
        for b in &second {
            boxes.push((*a, *b));
        }
    }
    Ok(Region::new(boxes))
}
