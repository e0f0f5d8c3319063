//! Pseudo-spectral convex-integration laboratory for the hypodissipative
//! Navier-Stokes equations on the periodic 3-torus.

pub mod blocks;
pub mod error;
pub mod galerkin;
pub mod harness;
pub mod iteration;
pub mod quad;
pub mod spectral;

pub use error::{Error, Result};
