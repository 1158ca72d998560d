//! Atoms adapted to an open set and their pairing with analytic functions.

mod atom;
mod pairing;
mod piece;

pub use atom::{
    assemble_atom, validate_atom, Atom, AtomReport, BoundMargin, BOUND_TOLERANCE, DELTA_SWEEP,
};
pub use pairing::{
    atom_bound_check, pair, pair_spectral, piece_bound_check, piece_bound_check_with, BoundCheck,
    SquareFunctionField,
};
pub use piece::{
    check_piece_values, haar_values, make_piece, piece_check, random_values, AtomPiece, PieceCheck,
    PiecePattern, CANCELLATION_TOLERANCE,
};
