//! Numerical laboratory for small Hankel operators on the product Hardy space.
//!
//! The crate is organised around four pieces of machinery:
//!
//! * [`geometry`]: exact product-dyadic geometry of finite-resolution open
//!   sets (maximal rectangles, the strong-maximal enlargement, embeddedness
//!   constants, packing and counting sums, dyadic annuli).
//! * [`spectral`]: Littlewood–Paley analysis on a periodic grid (smooth
//!   bumps, block projectors, square functions, Besov norms, annular decay).
//! * [`atoms`]: synthesis and validation of `L^q`-normalized atoms and the
//!   pairing bounds against Besov functions.
//! * [`hankel`]: finite sections of small Hankel operators, Schatten norms and
//!   the Besov bridge.
//!
//! Everything here is a pure function of its inputs. File formats, corpora and
//! the experiment runner live in the companion `lab` crate.

pub mod atoms;
pub mod error;
pub mod geometry;
pub mod hankel;
pub mod spectral;

pub use error::{LabError, Result};
pub use num_complex::Complex64;
