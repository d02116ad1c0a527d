//! Density-matrix engine for witnessing non-objectivity of a quantum system
//! relative to preferred objective subspaces of its environments.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, configuration and
//! the command-line front end live in the `qdwitness` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channels;
pub mod error;
pub mod hilbert;
pub mod info;
pub mod objectivity;
pub mod protocol;
pub mod random;
pub mod tolerance;

pub use error::{Error, Result};
pub use hilbert::{CMatrix, CVector, DensityOperator, PureState, TensorLayout};
pub use tolerance::Tolerances;
