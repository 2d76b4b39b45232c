//! Exact computations with quadratic modules over commutative rings in which
//! 2 is invertible: elementary orthogonal generators, excision-ring lifts,
//! spinor norms, and enumeration of small orthogonal groups.

pub mod classical;
pub mod cli;
pub mod dser;
pub mod error;
pub mod grouplab;
pub mod mat;
pub mod quadmod;
pub mod ring;
pub mod spinor;

pub use error::{Error, Result};
