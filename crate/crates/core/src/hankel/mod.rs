//! Finite sections of small Hankel operators on the two-parameter lattice.

mod bridge;
mod matrix;
mod symbol;

pub use bridge::{
    besov_lattice_norm, besov_lattice_norms, equivalence_ratio, equivalence_ratio_with,
    symbol_function,
};
pub use matrix::{
    anti_diagonal_weight, frobenius_identity, hankel_matrix, operator_apply, operator_apply_fft,
    schatten_norm, HankelMatrix,
};
pub use symbol::AnalyticSymbol;
