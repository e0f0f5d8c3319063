//! Radial C-infinity bump of support radius 1 and unit mass, with its Fourier transform.

use std::sync::OnceLock;

use crate::quad::composite;

const STEP: f64 = 1.0 / 16.0;
const SMAX: f64 = 512.0;
const STENCIL: usize = 8;

struct Kernel {
    norm: f64,
    nodes: Vec<(f64, f64)>,
    table: Vec<f64>,
}

fn profile(r: f64) -> f64 {
    if r >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - r * r)).exp()
    }
}

fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        1.0 - u * u / 6.0 + u.powi(4) / 120.0
    } else {
        u.sin() / u
    }
}

impl Kernel {
    fn build() -> Kernel {
        let nodes: Vec<(f64, f64)> = composite(0.0, 1.0, 64, 16)
            .into_iter()
            .map(|(r, w)| (r, 4.0 * std::f64::consts::PI * w * profile(r) * r * r))
            .collect();
        let mass: f64 = nodes.iter().map(|(_, w)| w).sum();
        let norm = 1.0 / mass;
        let nodes: Vec<(f64, f64)> = nodes.into_iter().map(|(r, w)| (r, w * norm)).collect();
        let count = (SMAX / STEP) as usize + STENCIL;
        let mut k = Kernel { norm, nodes, table: Vec::new() };
        k.table = (0..=count).map(|i| k.direct(i as f64 * STEP)).collect();
        k.table[0] = 1.0;
        k
    }

    fn direct(&self, s: f64) -> f64 {
        self.nodes.iter().map(|&(r, w)| w * sinc(s * r)).sum()
    }
}

fn kernel() -> &'static Kernel {
    static K: OnceLock<Kernel> = OnceLock::new();
    K.get_or_init(Kernel::build)
}

/// Kernel value psi(r) (unit mass over R^3).
pub fn psi(r: f64) -> f64 {
    kernel().norm * profile(r.abs())
}

/// Fourier transform psi_hat(s) = int psi(x) e^{-i s.x} dx for |s| = s.
pub fn psi_hat(s: f64) -> f64 {
    let s = s.abs();
    if s == 0.0 {
        return 1.0;
    }
    let k = kernel();
    if s >= SMAX {
        return k.direct(s);
    }
    // 8-point Lagrange on the table; the transform is entire of exponential type 1
    let pos = s / STEP;
    let base = (pos.floor() as isize - (STENCIL as isize / 2 - 1)).max(0) as usize;
    let mut acc = 0.0;
    for i in 0..STENCIL {
        let xi = (base + i) as f64;
        let mut li = 1.0;
        for j in 0..STENCIL {
            if j != i {
                let xj = (base + j) as f64;
                li *= (pos - xj) / (xi - xj);
            }
        }
        acc += li * k.table[base + i];
    }
    acc
}

/// Reference value by direct quadrature, bypassing the table.
pub fn psi_hat_direct(s: f64) -> f64 {
    if s == 0.0 {
        return 1.0;
    }
    kernel().direct(s.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::gauss_legendre;

    #[test]
    fn table_matches_direct() {
        for i in 0..2000 {
            let s = 0.013 + i as f64 * 0.2571;
            assert!((psi_hat(s) - psi_hat_direct(s)).abs() < 1e-12, "s = {s}");
        }
    }

    #[test]
    fn transform_against_cartesian_quadrature() {
        // independent check: integrate psi(|x|) cos(s x_3) on a 3-d product rule over the unit ball
        let (x, w) = gauss_legendre(48);
        let s = 2.7;
        let mut acc = 0.0;
        for (a, wa) in x.iter().zip(&w) {
            for (b, wb) in x.iter().zip(&w) {
                for (c, wc) in x.iter().zip(&w) {
                    let r = (a * a + b * b + c * c).sqrt();
                    acc += wa * wb * wc * psi(r) * (s * c).cos();
                }
            }
        }
        assert!((acc - psi_hat(s)).abs() < 1e-5, "{acc} vs {}", psi_hat(s));
    }

    #[test]
    fn bounded_by_mass() {
        for i in 0..500 {
            assert!(psi_hat(i as f64 * 0.7).abs() <= 1.0 + 1e-15);
        }
    }
}
