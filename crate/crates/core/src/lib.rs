//! Harmonic generalized barycentric coordinates on polygons.

pub mod builtin;
pub mod error;
pub mod fem;
pub mod gbc;
pub mod geometry;
pub mod locality;
pub mod mesh;
pub mod poisson;
pub mod sampling;

pub use error::{Error, Result};
