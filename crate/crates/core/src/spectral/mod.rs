//! Littlewood–Paley analysis on the periodic window.

mod blocks;
mod bump;
mod decay;
mod grid;
mod separable;

pub use blocks::{
    analytic_project, besov_norm, besov_norms, block_project, block_project_with, check_analytic,
    field_norm, involution, reproduce, square_function, Axis, BlockAnalysis, BlockIndex,
};
pub use bump::{build_bumps, exp_profile, BumpVariant, SpectralBump};
pub use decay::{a_u, annular_decay_check, decay_profile, DecayProbe};
pub(crate) use grid::{fft2, Transform};
pub use grid::{GridFunction, GridSpec, Spectrum};
pub use separable::{CellPiece, SeparableProbe};
