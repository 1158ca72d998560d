use super::interval::{pow2, DyadicInterval};
use crate::error::{LabError, Result};

/// Nonnegative step function on `[0, 2ᴸ)` with cells of length `2⁻ᴷ`,
/// extended by zero.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    window_exp: u32,
    base_exp: u32,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(window_exp: u32, base_exp: u32, values: Vec<f64>) -> Result<Self> {
        let side = 1usize << (window_exp + base_exp);
        if values.len() != side {
            return Err(LabError::ShapeMismatch {
                expected: side,
                actual: values.len(),
            });
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| v.is_nan() || **v < 0.0)
        {
            return Err(LabError::NegativeValue { index, value });
        }
        Ok(StepFunction {
            window_exp,
            base_exp,
            values,
        })
    }

    pub fn zero(window_exp: u32, base_exp: u32) -> Self {
        let side = 1usize << (window_exp + base_exp);
        StepFunction {
            window_exp,
            base_exp,
            values: vec![0.0; side],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn window_exp(&self) -> u32 {
        self.window_exp
    }

    pub fn base_exp(&self) -> u32 {
        self.base_exp
    }

    pub fn cell_length(&self) -> f64 {
        pow2(-(self.base_exp as i32))
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_length()
    }
}

/// Left and right sides of the dyadic counting inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountingSum {
    pub sum: f64,
    pub bound: f64,
}

impl CountingSum {
    pub fn holds(&self) -> bool {
        self.sum <= self.bound
    }
}

/// `Σ |J|·inf_J g` over dyadic `J` (scales `−K..=L`) with `x ∈ λJ`, together
/// with the bound `6λ‖g‖₁`.
///
/// Intervals where `inf_J g = 0` contribute nothing, so the walk only descends
/// into blocks where `g` stays positive. Larger intervals would contain the
/// whole window and hence points where `g` vanishes.
pub fn counting_sum(g: &StepFunction, x: f64, lambda: f64) -> Result<CountingSum> {
    if !(lambda.is_finite() && lambda >= 1.0) {
        return Err(LabError::DilationBelowOne(lambda));
    }
    let n = g.values.len();
    let k = g.base_exp as i32;
    // Heap-ordered minimum tree: node 1 covers the window, leaves at n..2n.
    let mut tree = vec![0.0f64; 2 * n];
    tree[n..].copy_from_slice(&g.values);
    for node in (1..n).rev() {
        tree[node] = tree[2 * node].min(tree[2 * node + 1]);
    }
    let depth = n.trailing_zeros() as i32;
    let mut sum = 0.0;
    for (node, &inf) in tree.iter().enumerate().skip(1) {
        if inf <= 0.0 {
            continue;
        }
        let node_depth = (usize::BITS - 1 - node.leading_zeros()) as i32;
        let interval = DyadicInterval::new(
            (node - (1usize << node_depth)) as i64,
            depth - node_depth - k,
        );
        if interval.dilate(lambda).contains(x) {
            sum += interval.length() * inf;
        }
    }
    Ok(CountingSum {
        sum,
        bound: 6.0 * lambda * g.l1_norm(),
    })
}
