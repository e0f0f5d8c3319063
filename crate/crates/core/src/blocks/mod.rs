//! Stationary building blocks: Beltrami waves, the geometric decomposition and the inverse divergence.

pub mod beltrami;
pub mod geometric;
pub mod inverse_div;

pub use beltrami::{make_beltrami_wave, BeltramiDirection};
pub use geometric::{build_families, BeltramiFamily, Parity};
pub use inverse_div::inverse_divergence;
