use std::fmt;

/// Half-open real interval `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
}

impl Span {
    pub fn new(lo: f64, hi: f64) -> Self {
        Span { lo, hi }
    }

    pub fn length(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x < self.hi
    }

    pub fn contains_span(&self, other: &Span) -> bool {
        other.is_empty() || (self.lo <= other.lo && other.hi <= self.hi)
    }

    pub fn intersect(&self, other: &Span) -> Span {
        Span::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }
}

/// Dyadic interval `[m·2ⁿ, (m+1)·2ⁿ)`.
///
/// Two dyadic intervals are either nested or disjoint, so the intervals
/// containing a given one form a chain ordered by scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicInterval {
    scale: i32,
    position: i64,
}

impl DyadicInterval {
    pub fn new(position: i64, scale: i32) -> Self {
        DyadicInterval { scale, position }
    }

    /// The dyadic interval of the given scale containing `x`.
    pub fn containing(x: f64, scale: i32) -> Self {
        let position = (x / pow2(scale)).floor() as i64;
        DyadicInterval::new(position, scale)
    }

    pub fn position(&self) -> i64 {
        self.position
    }

    pub fn scale(&self) -> i32 {
        self.scale
    }

    pub fn length(&self) -> f64 {
        pow2(self.scale)
    }

    pub fn start(&self) -> f64 {
        self.position as f64 * self.length()
    }

    pub fn end(&self) -> f64 {
        (self.position + 1) as f64 * self.length()
    }

    pub fn center(&self) -> f64 {
        (self.position as f64 + 0.5) * self.length()
    }

    pub fn span(&self) -> Span {
        Span::new(self.start(), self.end())
    }

    pub fn parent(&self) -> Self {
        DyadicInterval::new(self.position.div_euclid(2), self.scale + 1)
    }

    pub fn children(&self) -> [Self; 2] {
        [
            DyadicInterval::new(2 * self.position, self.scale - 1),
            DyadicInterval::new(2 * self.position + 1, self.scale - 1),
        ]
    }

    /// The ancestor (or self) at a coarser or equal scale.
    pub fn ancestor(&self, scale: i32) -> Self {
        assert!(scale >= self.scale, "ancestor scale below interval scale");
        let shift = (scale - self.scale) as u32;
        DyadicInterval::new(self.position >> shift, scale)
    }

    pub fn contains(&self, other: &DyadicInterval) -> bool {
        other.scale <= self.scale && other.ancestor(self.scale) == *self
    }

    pub fn intersects(&self, other: &DyadicInterval) -> bool {
        self.contains(other) || other.contains(self)
    }

    pub fn contains_point(&self, x: f64) -> bool {
        self.span().contains(x)
    }

    /// Concentric dilate `c·I`.
    pub fn dilate(&self, factor: f64) -> Span {
        let half = 0.5 * factor * self.length();
        let c = self.center();
        Span::new(c - half, c + half)
    }

    /// Cell range `[start, end)` of this interval on a grid of cell side
    /// `2^-base_exp`; `None` when the interval is finer than a cell.
    pub fn cells(&self, base_exp: i32) -> Option<(usize, usize)> {
        let width_exp = self.scale + base_exp;
        if width_exp < 0 || self.position < 0 {
            return None;
        }
        let width = 1usize << width_exp;
        let start = (self.position as usize) << width_exp;
        Some((start, start + width))
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start(), self.end())
    }
}

/// Dyadic rectangle `I × J`; `first` runs along x₁ and `second` along x₂.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicRectangle {
    pub first: DyadicInterval,
    pub second: DyadicInterval,
}

impl DyadicRectangle {
    pub fn new(first: DyadicInterval, second: DyadicInterval) -> Self {
        DyadicRectangle { first, second }
    }

    pub fn area(&self) -> f64 {
        self.first.length() * self.second.length()
    }

    pub fn side(&self, direction: Direction) -> DyadicInterval {
        match direction {
            Direction::First => self.first,
            Direction::Second => self.second,
        }
    }

    pub fn with_side(&self, direction: Direction, side: DyadicInterval) -> Self {
        match direction {
            Direction::First => DyadicRectangle::new(side, self.second),
            Direction::Second => DyadicRectangle::new(self.first, side),
        }
    }

    pub fn contains(&self, other: &DyadicRectangle) -> bool {
        self.first.contains(&other.first) && self.second.contains(&other.second)
    }

    pub fn contains_point(&self, x: (f64, f64)) -> bool {
        self.first.contains_point(x.0) && self.second.contains_point(x.1)
    }

    /// Concentric dilate `2^u I × 2^v J`.
    pub fn dilate(&self, u: u32, v: u32) -> (Span, Span) {
        (
            self.first.dilate(pow2(u as i32)),
            self.second.dilate(pow2(v as i32)),
        )
    }

    /// The concentric triple `3R`, which carries an atom piece.
    pub fn triple(&self) -> (Span, Span) {
        (self.first.dilate(3.0), self.second.dilate(3.0))
    }

    pub fn scaled(&self, exponent: i32) -> Self {
        DyadicRectangle::new(
            DyadicInterval::new(self.first.position, self.first.scale + exponent),
            DyadicInterval::new(self.second.position, self.second.scale + exponent),
        )
    }
}

impl fmt::Display for DyadicRectangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}×{}", self.first, self.second)
    }
}

/// Which side of a rectangle is maximal: `First` selects M₁(Ω) (I maximal),
/// `Second` selects M₂(Ω) (J maximal).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    First,
    Second,
}

impl Direction {
    pub fn other(self) -> Direction {
        match self {
            Direction::First => Direction::Second,
            Direction::Second => Direction::First,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Direction::First => 1,
            Direction::Second => 2,
        }
    }

    pub fn from_index(index: u8) -> Option<Direction> {
        match index {
            1 => Some(Direction::First),
            2 => Some(Direction::Second),
            _ => None,
        }
    }
}

/// Exact power of two as `f64`.
pub fn pow2(exponent: i32) -> f64 {
    2f64.powi(exponent)
}
