use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{FourierGrid, Rank, SpectralField};

/// Polarization data of one wave vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeltramiDirection {
    pub k: [i32; 3],
    pub a: [f64; 3],
    pub b: [Complex64; 3],
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// Representative of {k, -k} whose first nonzero entry is positive.
fn canonical(k: [i32; 3]) -> [i32; 3] {
    let first = k.iter().find(|&&x| x != 0).copied().unwrap_or(0);
    if first < 0 {
        [-k[0], -k[1], -k[2]]
    } else {
        k
    }
}

impl BeltramiDirection {
    pub fn new(k: [i32; 3]) -> Result<Self> {
        if k == [0, 0, 0] {
            return Err(Error::ParameterDomain("Beltrami direction needs k != 0".into()));
        }
        let c = canonical(k).map(|x| x as f64);
        let mut n = cross(c, [0.0, 0.0, 1.0]);
        if norm(n) < 1e-8 * norm(c) {
            n = cross(c, [1.0, 0.0, 0.0]);
        }
        let s = 1.0 / (norm(n) * std::f64::consts::SQRT_2);
        let a = n.map(|x| x * s);
        let kf = k.map(|x| x as f64);
        let kn = norm(kf);
        let khat = kf.map(|x| x / kn);
        let ka = cross(khat, a);
        let b = [0, 1, 2].map(|i| Complex64::new(a[i], ka[i]));
        Ok(Self { k, a, b })
    }

    pub fn khat(&self) -> [f64; 3] {
        let kf = self.k.map(|x| x as f64);
        let n = norm(kf);
        kf.map(|x| x / n)
    }

    pub fn modulus(&self) -> f64 {
        norm(self.k.map(|x| x as f64))
    }

    /// Id - khat (x) khat.
    pub fn projector(&self) -> [[f64; 3]; 3] {
        let h = self.khat();
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = if i == j { 1.0 } else { 0.0 } - h[i] * h[j];
            }
        }
        m
    }
}

/// W = sum a_k B_k e^{i lam k.x}; amplitudes must come in conjugate pairs.
pub fn make_beltrami_wave(grid: FourierGrid, amplitudes: &[([i32; 3], Complex64)], lam: usize) -> Result<SpectralField> {
    if lam == 0 {
        return Err(Error::ParameterDomain("frequency multiplier must be >= 1".into()));
    }
    let scale = amplitudes.iter().map(|(_, a)| a.norm()).fold(0.0, f64::max).max(1e-300);
    for (k, a) in amplitudes {
        let m = [-k[0], -k[1], -k[2]];
        let partner = amplitudes.iter().find(|(kk, _)| *kk == m);
        match partner {
            Some((_, b)) if (b - a.conj()).norm() <= 1e-14 * scale => {}
            Some(_) => return Err(Error::Symmetry(format!("amplitude at {m:?} is not the conjugate of the one at {k:?}"))),
            None if a.norm() == 0.0 => {}
            None => return Err(Error::Symmetry(format!("amplitude at {k:?} has no partner at {m:?}"))),
        }
    }
    let l = grid.retained_limit() as i64;
    let mut half = [0usize; 3];
    for (k, _) in amplitudes {
        for i in 0..3 {
            let v = (lam as i64 * k[i] as i64).abs();
            if v > l {
                return Err(Error::Resolution(format!(
                    "mode {lam}*{k:?} exceeds the retained limit {l}"
                )));
            }
            half[i] = half[i].max(v as usize);
        }
    }
    let mut w = SpectralField::zeros(grid, Rank::Vector, half);
    for (k, a) in amplitudes {
        let d = BeltramiDirection::new(*k)?;
        let kk = k.map(|x| lam as i64 * x as i64);
        let idx = w.index(kk).expect("inside box");
        for c in 0..3 {
            w.comp_mut(c)[idx] += a * d.b[c];
        }
    }
    Ok(w)
}
