//! Seeded random fields for tests and initial data.

use num_complex::Complex64;
use rand::Rng;

use super::{FourierGrid, Rank, SpectralField};

/// Real field with independent Gaussian-like coefficients of size (1 + |k|^2)^{-decay/2}
/// in the box of the given half-widths.
pub fn random_field(grid: FourierGrid, rank: Rank, half: [usize; 3], decay: f64, rng: &mut impl Rng) -> SpectralField {
    let mut f = SpectralField::zeros(grid, rank, half);
    f.map_modes(|k, c| {
        let q = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        let s = (1.0 + q).powf(-0.5 * decay);
        for z in c.iter_mut() {
            *z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * s;
        }
    });
    f.enforce_reality();
    f
}
