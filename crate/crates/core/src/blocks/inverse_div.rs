use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Rank, SpectralField, SYM_PAIRS};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Symmetric trace-free tensor whose divergence is v minus its mean.
pub fn inverse_divergence(v: &SpectralField) -> Result<SpectralField> {
    if v.rank() != Rank::Vector {
        return Err(Error::Rank {
            expected: Rank::Vector.name().into(),
            got: v.rank().name().into(),
        });
    }
    let out = v.map_to(Rank::SymTensor, |k, a, b| {
        let q = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        if q == 0.0 {
            return;
        }
        let kf = [k[0] as f64, k[1] as f64, k[2] as f64];
        // u solves Laplacian u = v
        let u = [0, 1, 2].map(|i| -a[i] / q);
        let ku = u[0] * kf[0] + u[1] * kf[1] + u[2] * kf[2];
        let p = [0, 1, 2].map(|i| u[i] - kf[i] * ku / q);
        for (c, &(i, j)) in SYM_PAIRS.iter().enumerate() {
            let mut r = I * 0.25 * (kf[j] * p[i] + kf[i] * p[j]) + I * 0.75 * (kf[j] * u[i] + kf[i] * u[j]);
            if i == j {
                r -= I * 0.5 * ku;
            }
            b[c] = r;
        }
    });
    Ok(out.with_traceless(true))
}
