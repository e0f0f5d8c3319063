//! Unnormalized 3-D complex transforms on arbitrary per-axis sizes.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|p| {
        let mut p = p.borrow_mut();
        if let Some(f) = p.1.get(&(n, inverse)) {
            return f.clone();
        }
        let f = if inverse {
            p.0.plan_fft_inverse(n)
        } else {
            p.0.plan_fft_forward(n)
        };
        p.1.insert((n, inverse), f.clone());
        f
    })
}

/// Transform along all three axes in place. Layout is x1-major: index (i1*n2 + i2)*n3 + i3.
/// `inverse = true` computes sum_k c_k e^{+2 pi i jk/N} (no scaling).
pub fn fft3(data: &mut [Complex64], sizes: [usize; 3], inverse: bool) {
    let [n1, n2, n3] = sizes;
    debug_assert_eq!(data.len(), n1 * n2 * n3);
    if n3 > 1 {
        plan(n3, inverse).process(data);
    }
    if n2 > 1 {
        let f = plan(n2, inverse);
        let mut t = vec![Complex64::default(); n2 * n3];
        for block in data.chunks_mut(n2 * n3) {
            transpose(block, &mut t, n2, n3);
            f.process(&mut t);
            transpose(&t, block, n3, n2);
        }
    }
    if n1 > 1 {
        let f = plan(n1, inverse);
        let m = n2 * n3;
        let mut t = vec![Complex64::default(); n1 * m];
        transpose(data, &mut t, n1, m);
        f.process(&mut t);
        transpose(&t, data, m, n1);
    }
}

/// One-dimensional transform of a contiguous buffer (length a multiple of n).
pub fn fft1(data: &mut [Complex64], n: usize, inverse: bool) {
    if n > 1 {
        plan(n, inverse).process(data);
    }
}

/// Out-of-place transpose of a rows x cols matrix.
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const B: usize = 32;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_mixed_sizes() {
        let sizes = [6, 1, 10];
        let n: usize = sizes.iter().product();
        let orig: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let mut d = orig.clone();
        fft3(&mut d, sizes, false);
        fft3(&mut d, sizes, true);
        for (a, b) in d.iter().zip(&orig) {
            assert!((a / n as f64 - b).norm() < 1e-13);
        }
    }

    #[test]
    fn single_mode_lands_in_place() {
        let sizes = [4, 6, 8];
        let n: usize = sizes.iter().product();
        let mut d = vec![Complex64::default(); n];
        // mode k = (1, -2, 3)
        let idx = (1 * 6 + (6 - 2)) * 8 + 3;
        d[idx] = Complex64::new(1.0, 0.0);
        fft3(&mut d, sizes, true);
        let x = [2.0 * std::f64::consts::PI / 4.0, 2.0 * std::f64::consts::PI / 6.0, 2.0 * std::f64::consts::PI / 8.0];
        for i1 in 0..4 {
            for i2 in 0..6 {
                for i3 in 0..8 {
                    let ph = 1.0 * i1 as f64 * x[0] - 2.0 * i2 as f64 * x[1] + 3.0 * i3 as f64 * x[2];
                    let v = d[(i1 * 6 + i2) * 8 + i3];
                    assert!((v - Complex64::from_polar(1.0, ph)).norm() < 1e-13);
                }
            }
        }
    }
}
