//! Evaluation of fields at arbitrary points.

use num_complex::Complex64;
use rayon::prelude::*;

use super::field::{Physical, SpectralField};
use crate::error::{Error, Result};

/// How off-grid values are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleMode {
    /// Direct evaluation of the truncated Fourier sum.
    ExactSum,
    /// Local Lagrange interpolation on a zero-padded grid.
    Interp { pad: usize },
}

impl SampleMode {
    /// Exact sums up to 64^3 retained modes, padded tricubic interpolation beyond.
    pub fn default_for(f: &SpectralField) -> SampleMode {
        if f.box_len() <= 64 * 64 * 64 {
            SampleMode::ExactSum
        } else {
            SampleMode::Interp { pad: 2 }
        }
    }

    /// Formal order of accuracy (None for exact evaluation).
    pub fn order(&self) -> Option<usize> {
        match self {
            SampleMode::ExactSum => None,
            SampleMode::Interp { .. } => Some(INTERP_POINTS),
        }
    }
}

const INTERP_POINTS: usize = 4;
const MAX_PADDED_POINTS: usize = 1 << 27;

/// Values at `points`; one Vec of components per point.
pub fn sample_offgrid(f: &SpectralField, points: &[[f64; 3]], mode: SampleMode) -> Result<Vec<Vec<f64>>> {
    if points.is_empty() {
        return Ok(Vec::new());
    }
    match mode {
        SampleMode::ExactSum => Ok(exact_sum(f, points)),
        SampleMode::Interp { pad } => {
            let it = Interpolant::new(f, pad)?;
            Ok(points.par_iter().map(|p| it.eval(*p)).collect())
        }
    }
}

fn axis_exponentials(h: usize, x: f64) -> Vec<Complex64> {
    let base = Complex64::from_polar(1.0, x);
    let mut e = vec![Complex64::default(); 2 * h + 1];
    e[h] = Complex64::new(1.0, 0.0);
    for k in 1..=h {
        e[h + k] = e[h + k - 1] * base;
        e[h - k] = e[h + k].conj();
    }
    e
}

/// Direct sum over the coefficient box, factored axis by axis.
pub fn exact_sum(f: &SpectralField, points: &[[f64; 3]]) -> Vec<Vec<f64>> {
    let h = f.half();
    let d = f.dims();
    let nc = f.rank().ncomp();
    points
        .par_iter()
        .map(|x| {
            let e1 = axis_exponentials(h[0], x[0]);
            let e2 = axis_exponentials(h[1], x[1]);
            let e3 = axis_exponentials(h[2], x[2]);
            let mut out = vec![0.0; nc];
            for (c, o) in out.iter_mut().enumerate() {
                let coeffs = f.comp(c);
                let mut acc = Complex64::default();
                for i1 in 0..d[0] {
                    let mut s2 = Complex64::default();
                    for i2 in 0..d[1] {
                        let row = &coeffs[(i1 * d[1] + i2) * d[2]..(i1 * d[1] + i2 + 1) * d[2]];
                        let s3: Complex64 = row.iter().zip(&e3).map(|(a, b)| a * b).sum();
                        s2 += s3 * e2[i2];
                    }
                    acc += s2 * e1[i1];
                }
                *o = acc.re;
            }
            out
        })
        .collect()
}

/// Four-point Lagrange interpolation (per varying axis) on a padded grid.
pub struct Interpolant {
    phys: Physical,
}

impl Interpolant {
    pub fn new(f: &SpectralField, pad: usize) -> Result<Self> {
        let n = f.grid().n();
        let sizes = f.half().map(|h| if h == 0 { 1 } else { pad.max(1) * n });
        let total: usize = sizes.iter().product::<usize>() * f.rank().ncomp();
        if total > MAX_PADDED_POINTS {
            return Err(Error::Resolution(format!(
                "padded interpolation grid {sizes:?} exceeds the memory guard"
            )));
        }
        Ok(Self { phys: f.to_physical(sizes) })
    }

    pub fn order(&self) -> usize {
        INTERP_POINTS
    }

    pub fn eval(&self, x: [f64; 3]) -> Vec<f64> {
        let s = self.phys.sizes;
        let tp = 2.0 * std::f64::consts::PI;
        let mut idx = [[0usize; INTERP_POINTS]; 3];
        let mut wts = [[0.0f64; INTERP_POINTS]; 3];
        let mut npt = [1usize; 3];
        for a in 0..3 {
            if s[a] == 1 {
                wts[a][0] = 1.0;
                continue;
            }
            npt[a] = INTERP_POINTS;
            let u = (x[a] / tp).rem_euclid(1.0) * s[a] as f64;
            let i0 = u.floor() as i64;
            let t = u - i0 as f64;
            // nodes at offsets -1, 0, 1, 2
            let nodes = [-1.0, 0.0, 1.0, 2.0];
            for j in 0..INTERP_POINTS {
                let mut w = 1.0;
                for m in 0..INTERP_POINTS {
                    if m != j {
                        w *= (t - nodes[m]) / (nodes[j] - nodes[m]);
                    }
                }
                wts[a][j] = w;
                idx[a][j] = (i0 - 1 + j as i64).rem_euclid(s[a] as i64) as usize;
            }
        }
        let mut out = vec![0.0; self.phys.data.len()];
        for j1 in 0..npt[0] {
            for j2 in 0..npt[1] {
                let w12 = wts[0][j1] * wts[1][j2];
                let base = (idx[0][j1] * s[1] + idx[1][j2]) * s[2];
                for j3 in 0..npt[2] {
                    let w = w12 * wts[2][j3];
                    let p = base + idx[2][j3];
                    for (c, o) in out.iter_mut().enumerate() {
                        *o += w * self.phys.data[c][p];
                    }
                }
            }
        }
        out
    }
}
