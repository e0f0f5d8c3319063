//! Sup norms, derivative norms, Holder seminorm estimates and Plancherel integrals.

use num_complex::Complex64;
use rayon::prelude::*;

use super::fft::fft3;
use super::field::SpectralField;
use super::grid::FourierGrid;
use super::ops::partial;

/// Norms of one field.
#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    pub c0: f64,
    /// (order, estimated seminorm) in the order requested.
    pub seminorms: Vec<(f64, f64)>,
    pub plancherel_l2: f64,
    pub plancherel_dissipation: f64,
}

impl NormReport {
    pub fn seminorm(&self, order: f64) -> Option<f64> {
        self.seminorms
            .iter()
            .find(|(o, _)| (o - order).abs() < 1e-12)
            .map(|(_, v)| *v)
    }
}

pub fn norms(f: &SpectralField, alpha: f64, orders: &[f64]) -> NormReport {
    NormReport {
        c0: sup_norm(f),
        seminorms: orders.iter().map(|&o| (o, holder_seminorm(f, o))).collect(),
        plancherel_l2: plancherel_l2(f),
        plancherel_dissipation: dissipation(f, alpha),
    }
}

/// (2pi)^3 sum |f_k|^2, with Frobenius weights for tensors.
pub fn plancherel_l2(f: &SpectralField) -> f64 {
    let mut s = 0.0;
    for (c, comp) in f.comps().iter().enumerate() {
        let w = f.rank().weight(c);
        s += w * comp.iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    FourierGrid::volume() * s
}

/// (2pi)^3 sum |k|^{2 alpha} |f_k|^2.
pub fn dissipation(f: &SpectralField, alpha: f64) -> f64 {
    let mut s = 0.0;
    f.for_each_mode(|k, idx| {
        let q = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        if q == 0.0 {
            return;
        }
        let m = q.powf(alpha);
        for (c, comp) in f.comps().iter().enumerate() {
            s += m * f.rank().weight(c) * comp[idx].norm_sqr();
        }
    });
    FourierGrid::volume() * s
}

/// Rigorous bound sup|f| <= sum_k |f_k| (Euclidean or Frobenius per mode).
pub fn wiener_bound(f: &SpectralField) -> f64 {
    let mut s = 0.0;
    f.for_each_mode(|_, idx| {
        let mut m = 0.0;
        for (c, comp) in f.comps().iter().enumerate() {
            m += f.rank().weight(c) * comp[idx].norm_sqr();
        }
        s += m.sqrt();
    });
    s
}

/// Largest pointwise magnitude on the collocation grid, evaluated one x1-slab at a time.
pub fn sup_norm(f: &SpectralField) -> f64 {
    sup_on_grid(f, f.collocation_sizes())
}

pub fn sup_on_grid(f: &SpectralField, sizes: [usize; 3]) -> f64 {
    let h = f.half();
    let d = f.dims();
    let nc = f.rank().ncomp();
    let weights: Vec<f64> = (0..nc).map(|c| f.rank().weight(c)).collect();
    let m = sizes[1] * sizes[2];
    let tp = 2.0 * std::f64::consts::PI;
    (0..sizes[0])
        .into_par_iter()
        .map(|i1| {
            let x1 = tp * i1 as f64 / sizes[0] as f64;
            let e1: Vec<Complex64> = (0..d[0])
                .map(|a| Complex64::from_polar(1.0, (a as f64 - h[0] as f64) * x1))
                .collect();
            let mut vals = vec![vec![0.0; m]; nc];
            let mut buf = vec![Complex64::default(); m];
            let mut c = 0;
            while c < nc {
                let pair = c + 1 < nc;
                buf.iter_mut().for_each(|z| *z = Complex64::default());
                for i2 in 0..d[1] {
                    let j2 = (i2 as i64 - h[1] as i64).rem_euclid(sizes[1] as i64) as usize;
                    for i3 in 0..d[2] {
                        let j3 = (i3 as i64 - h[2] as i64).rem_euclid(sizes[2] as i64) as usize;
                        let mut z = Complex64::default();
                        for (a, e) in e1.iter().enumerate() {
                            let idx = (a * d[1] + i2) * d[2] + i3;
                            let mut v = f.comp(c)[idx];
                            if pair {
                                v += Complex64::new(0.0, 1.0) * f.comp(c + 1)[idx];
                            }
                            z += v * e;
                        }
                        buf[j2 * sizes[2] + j3] += z;
                    }
                }
                fft3(&mut buf, [1, sizes[1], sizes[2]], true);
                for j in 0..m {
                    vals[c][j] = buf[j].re;
                    if pair {
                        vals[c + 1][j] = buf[j].im;
                    }
                }
                c += if pair { 2 } else { 1 };
            }
            (0..m)
                .map(|j| (0..nc).map(|c| weights[c] * vals[c][j] * vals[c][j]).sum::<f64>().sqrt())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// All multi-indices of total order j, as axis lists.
pub fn multi_indices(j: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..j {
        let mut next = Vec::new();
        for m in &out {
            let start = m.last().copied().unwrap_or(0);
            for a in start..3 {
                let mut n = m.clone();
                n.push(a);
                next.push(n);
            }
        }
        out = next;
    }
    out
}

pub fn derivative(f: &SpectralField, axes: &[usize]) -> SpectralField {
    axes.iter().fold(f.clone(), |g, &a| partial(&g, a))
}

/// max over |beta| = j of sup |D^beta f|.
pub fn derivative_sup(f: &SpectralField, j: usize) -> f64 {
    multi_indices(j)
        .iter()
        .map(|b| sup_norm(&derivative(f, b)))
        .fold(0.0, f64::max)
}

/// ||f||_m = sum_{j <= m} [f]_j.
pub fn c_norm(f: &SpectralField, m: usize) -> f64 {
    (0..=m).map(|j| derivative_sup(f, j)).sum()
}

/// Directions used by the difference-quotient estimator.
pub const DIRECTIONS: [[i64; 3]; 13] = [
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 1, 0],
    [1, -1, 0],
    [1, 0, 1],
    [1, 0, -1],
    [0, 1, 1],
    [0, 1, -1],
    [1, 1, 1],
    [1, 1, -1],
    [1, -1, 1],
    [1, -1, -1],
];

/// Dyadic separations 2pi 2^{-j}, as grid shifts on an n-point axis.
pub fn dyadic_shifts(n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut s = n / 2;
    let mut p = 2;
    while n % p == 0 && s >= 2 {
        out.push(s);
        s /= 2;
        p *= 2;
    }
    out
}

/// Estimate [f]_order. Order 0 is the sup norm; integer m >= 1 is the Lipschitz quotient of
/// D^{m-1} f; m + a with 0 < a < 1 is the a-Holder quotient of D^m f.
pub fn holder_seminorm(f: &SpectralField, order: f64) -> f64 {
    if order <= 0.0 {
        return sup_norm(f);
    }
    let m = order.floor();
    let frac = order - m;
    let (deriv, expo) = if frac < 1e-12 {
        (m as usize - 1, 1.0)
    } else {
        (m as usize, frac)
    };
    let sizes = f.collocation_sizes();
    let n = f.grid().n();
    let shifts = dyadic_shifts(n);
    let spacing = 2.0 * std::f64::consts::PI / n as f64;
    let mut best = 0.0f64;
    for b in multi_indices(deriv) {
        let g = derivative(f, &b);
        let phys = g.to_physical(sizes);
        let nc = phys.data.len();
        let weights: Vec<f64> = (0..nc).map(|c| phys.rank.weight(c)).collect();
        for dir in DIRECTIONS {
            let len = ((dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]) as f64).sqrt();
            for &s in &shifts {
                let dist = len * s as f64 * spacing;
                let off = [0, 1, 2].map(|a| (dir[a] * s as i64).rem_euclid(sizes[a] as i64) as usize);
                let q = (0..sizes[0])
                    .into_par_iter()
                    .map(|i1| {
                        let mut worst = 0.0f64;
                        let j1 = (i1 + off[0]) % sizes[0];
                        for i2 in 0..sizes[1] {
                            let j2 = (i2 + off[1]) % sizes[1];
                            for i3 in 0..sizes[2] {
                                let j3 = (i3 + off[2]) % sizes[2];
                                let p = (i1 * sizes[1] + i2) * sizes[2] + i3;
                                let r = (j1 * sizes[1] + j2) * sizes[2] + j3;
                                let mut d2 = 0.0;
                                for c in 0..nc {
                                    let diff = phys.data[c][r] - phys.data[c][p];
                                    d2 += weights[c] * diff * diff;
                                }
                                worst = worst.max(d2);
                            }
                        }
                        worst.sqrt()
                    })
                    .reduce(|| 0.0, f64::max);
                best = best.max(q / dist.powf(expo));
            }
        }
    }
    best
}
