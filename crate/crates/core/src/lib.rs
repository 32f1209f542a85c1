//! Multiconfigurational time-dependent Hartree solver for indistinguishable
//! bosons and fermions in one dimension.

pub mod analysis;
mod etd;
pub mod error;
pub mod fock;
pub mod grid;
pub mod mctdh;
pub mod model;
pub mod oracle;
pub mod solver;

pub use error::{Error, Result};
