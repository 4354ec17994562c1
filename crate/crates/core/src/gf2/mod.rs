//! GF(2) vectors and matrices.
//!
//! Everything here is a pure function of its inputs plus an explicit
//! [`RngState`]; there is no hidden global randomness.

mod basis;
mod bitvec;
mod matrix;
mod rng;

pub use basis::EchelonBasis;
pub use bitvec::BitVec;
pub use matrix::{in_span, BitMatrix};
pub use rng::{random_bitvec, random_matrix, RngState};
