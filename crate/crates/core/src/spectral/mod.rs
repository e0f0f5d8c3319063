//! Fourier fields on the 3-torus and the operators acting on them.

pub mod fft;
pub mod field;
pub mod grid;
pub mod mollifier;
pub mod norms;
pub mod ops;
pub mod random;
pub mod sample;
pub mod snapshot;

pub use field::{Physical, SpectralField};
pub use grid::{fft_size, sym_index, FourierGrid, Rank, SYM_PAIRS, SYM_WEIGHTS};
