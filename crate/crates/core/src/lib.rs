//! Discrete spectrum of two-boson fiber Hamiltonians on the square lattice
//! with on-site, nearest- and next-nearest-neighbour interactions.

pub mod determinants;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod regions;
pub mod torus;
pub mod verify;

pub use error::{Error, Result};
