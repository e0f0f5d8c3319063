//! Fourier multipliers, derivatives and dealiased pointwise products.

use num_complex::Complex64;
use rayon::prelude::*;

use super::field::{Physical, SpectralField};
use super::grid::{fft_size, sym_index, Rank};
use super::mollifier::psi_hat;
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn kf(k: [i64; 3]) -> [f64; 3] {
    [k[0] as f64, k[1] as f64, k[2] as f64]
}

fn k2(k: [i64; 3]) -> f64 {
    (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64
}

fn expect_rank(f: &SpectralField, rank: Rank) -> Result<()> {
    if f.rank() != rank {
        return Err(Error::Rank {
            expected: rank.name().into(),
            got: f.rank().name().into(),
        });
    }
    Ok(())
}

/// Multiply every coefficient by a real radial-or-not symbol m(k).
pub fn apply_multiplier(f: &SpectralField, m: impl Fn([i64; 3]) -> f64) -> SpectralField {
    let mut out = f.clone();
    out.map_modes(|k, v| {
        let s = m(k);
        v.iter_mut().for_each(|z| *z *= s);
    });
    out
}

/// (-Laplacian)^s for any s >= 0, with the k = 0 mode sent to 0 when s > 0.
pub fn laplacian_power(f: &SpectralField, s: f64) -> SpectralField {
    apply_multiplier(f, |k| {
        let q = k2(k);
        if q == 0.0 {
            if s == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            q.powf(s)
        }
    })
}

/// Symbol |k|^{2 alpha} for alpha in (0, 1).
pub fn fractional_laplacian(f: &SpectralField, alpha: f64) -> Result<SpectralField> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::ParameterDomain(format!("alpha must lie in (0,1), got {alpha}")));
    }
    Ok(laplacian_power(f, alpha))
}

/// Projection onto mean-free divergence-free vector fields.
pub fn leray_project(v: &SpectralField) -> Result<SpectralField> {
    expect_rank(v, Rank::Vector)?;
    let mut out = v.clone();
    out.map_modes(|k, c| {
        let q = k2(k);
        if q == 0.0 {
            c.iter_mut().for_each(|z| *z = Complex64::default());
            return;
        }
        let kk = kf(k);
        let dot = (c[0] * kk[0] + c[1] * kk[1] + c[2] * kk[2]) / q;
        for i in 0..3 {
            c[i] -= dot * kk[i];
        }
    });
    Ok(out)
}

/// Zero all modes with |k| > radius and shrink the box accordingly.
pub fn truncate_modes(f: &SpectralField, radius: usize) -> SpectralField {
    let half = f.half().map(|h| h.min(radius));
    let mut out = f.resized(half);
    let r2 = (radius * radius) as f64;
    out.map_modes(|k, c| {
        if k2(k) > r2 {
            c.iter_mut().for_each(|z| *z = Complex64::default());
        }
    });
    out
}

/// Convolution with the bump kernel rescaled to radius `ell`.
pub fn mollify(f: &SpectralField, ell: f64) -> Result<SpectralField> {
    if !(ell > 0.0 && ell <= 1.0) {
        return Err(Error::ParameterDomain(format!("mollification scale must lie in (0,1], got {ell}")));
    }
    let mut cache = std::collections::HashMap::new();
    let mut out = f.clone();
    out.map_modes(|k, c| {
        let q = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let s = *cache.entry(q).or_insert_with(|| psi_hat(ell * (q as f64).sqrt()));
        c.iter_mut().for_each(|z| *z *= s);
    });
    Ok(out)
}

/// Spectral derivative kinds that return a field of a fixed rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiffKind {
    Grad,
    Div,
    Curl,
}

/// d/dx_axis of every component.
pub fn partial(f: &SpectralField, axis: usize) -> SpectralField {
    let mut out = f.clone();
    out.map_modes(|k, c| {
        let m = I * k[axis] as f64;
        c.iter_mut().for_each(|z| *z *= m);
    });
    out
}

pub fn differentiate(f: &SpectralField, kind: DiffKind) -> Result<SpectralField> {
    match (kind, f.rank()) {
        (DiffKind::Grad, Rank::Scalar) => Ok(f.map_to(Rank::Vector, |k, a, b| {
            for i in 0..3 {
                b[i] = I * k[i] as f64 * a[0];
            }
        })),
        (DiffKind::Div, Rank::Vector) => Ok(f.map_to(Rank::Scalar, |k, a, b| {
            b[0] = I * (a[0] * k[0] as f64 + a[1] * k[1] as f64 + a[2] * k[2] as f64);
        })),
        (DiffKind::Div, Rank::SymTensor) => Ok(f.map_to(Rank::Vector, |k, a, b| {
            for i in 0..3 {
                let mut s = Complex64::default();
                for j in 0..3 {
                    s += a[sym_index(i, j)] * k[j] as f64;
                }
                b[i] = I * s;
            }
        })),
        (DiffKind::Curl, Rank::Vector) => Ok(f.map_to(Rank::Vector, |k, a, b| {
            let kk = kf(k);
            b[0] = I * (a[2] * kk[1] - a[1] * kk[2]);
            b[1] = I * (a[0] * kk[2] - a[2] * kk[0]);
            b[2] = I * (a[1] * kk[0] - a[0] * kk[1]);
        })),
        (kind, rank) => Err(Error::Rank {
            expected: match kind {
                DiffKind::Grad => "scalar",
                DiffKind::Div => "vector3 or symtensor3",
                DiffKind::Curl => "vector3",
            }
            .into(),
            got: rank.name().into(),
        }),
    }
}

/// Columns d v / d x_j for j = 0, 1, 2 of a vector field.
pub fn full_jacobian(v: &SpectralField) -> Result<[SpectralField; 3]> {
    expect_rank(v, Rank::Vector)?;
    Ok([partial(v, 0), partial(v, 1), partial(v, 2)])
}

/// Smallest half-width that holds a product of boxes, capped at the retained limit.
pub fn product_half(a: [usize; 3], b: [usize; 3], limit: usize) -> [usize; 3] {
    [0, 1, 2].map(|i| (a[i] + b[i]).min(limit))
}

/// Grid sizes on which a polynomial product of the given boxes is alias-free for `out`.
pub fn product_sizes(halves: &[[usize; 3]], out: [usize; 3]) -> [usize; 3] {
    [0, 1, 2].map(|i| {
        let s: usize = halves.iter().map(|h| h[i]).sum::<usize>() + out[i];
        if s == 0 {
            1
        } else {
            fft_size(s + 1)
        }
    })
}

/// Evaluate `f` pointwise on a grid and transform back onto the box `out_half`.
/// `f` receives all input components concatenated in order.
pub fn pointwise<F>(inputs: &[&SpectralField], out_rank: Rank, out_half: [usize; 3], sizes: [usize; 3], f: F) -> Result<SpectralField>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let grid = inputs
        .first()
        .map(|x| x.grid())
        .ok_or_else(|| Error::ParameterDomain("pointwise needs at least one input".into()))?;
    let phys: Vec<Physical> = inputs.iter().map(|x| x.to_physical(sizes)).collect();
    let nin: usize = inputs.iter().map(|x| x.rank().ncomp()).sum();
    let nout = out_rank.ncomp();
    let npts: usize = sizes.iter().product();
    let mut out = Physical::zeros(sizes, out_rank);
    let chunk = 4096;
    let results: Vec<Vec<f64>> = (0..npts.div_ceil(chunk))
        .into_par_iter()
        .map(|ci| {
            let lo = ci * chunk;
            let hi = (lo + chunk).min(npts);
            let mut vals = vec![0.0; nin];
            let mut res = vec![0.0; nout];
            let mut buf = Vec::with_capacity((hi - lo) * nout);
            for j in lo..hi {
                let mut o = 0;
                for p in &phys {
                    for d in &p.data {
                        vals[o] = d[j];
                        o += 1;
                    }
                }
                res.iter_mut().for_each(|x| *x = 0.0);
                f(&vals, &mut res);
                buf.extend_from_slice(&res);
            }
            buf
        })
        .collect();
    for (ci, buf) in results.into_iter().enumerate() {
        let lo = ci * chunk;
        for (t, vals) in buf.chunks(nout).enumerate() {
            for c in 0..nout {
                out.data[c][lo + t] = vals[c];
            }
        }
    }
    SpectralField::from_physical(grid, &out, Some(out_half))
}

/// Dealiased product of two fields through `f`, truncated to the retained cube.
pub fn product<F>(a: &SpectralField, b: &SpectralField, out_rank: Rank, f: F) -> Result<SpectralField>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let out_half = product_half(a.half(), b.half(), a.grid().retained_limit());
    let sizes = product_sizes(&[a.half(), b.half()], out_half);
    pointwise(&[a, b], out_rank, out_half, sizes, f)
}

/// u (x) v as a symmetric tensor (symmetrized when u != v).
pub fn outer(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    expect_rank(u, Rank::Vector)?;
    expect_rank(v, Rank::Vector)?;
    product(u, v, Rank::SymTensor, |x, o| {
        for (c, &(i, j)) in super::grid::SYM_PAIRS.iter().enumerate() {
            o[c] = 0.5 * (x[i] * x[3 + j] + x[j] * x[3 + i]);
        }
    })
}

pub fn dot(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    expect_rank(u, Rank::Vector)?;
    expect_rank(v, Rank::Vector)?;
    product(u, v, Rank::Scalar, |x, o| o[0] = x[0] * x[3] + x[1] * x[4] + x[2] * x[5])
}

/// Scalar times a field of any rank.
pub fn scale_by(s: &SpectralField, f: &SpectralField) -> Result<SpectralField> {
    expect_rank(s, Rank::Scalar)?;
    let n = f.rank().ncomp();
    product(s, f, f.rank(), move |x, o| {
        for c in 0..n {
            o[c] = x[0] * x[1 + c];
        }
    })
}

/// (u . grad) v componentwise, for v of any rank; dealiased.
pub fn advect(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    expect_rank(u, Rank::Vector)?;
    let d = [partial(v, 0), partial(v, 1), partial(v, 2)];
    let nc = v.rank().ncomp();
    let out_half = product_half(u.half(), v.half(), u.grid().retained_limit());
    let sizes = product_sizes(&[u.half(), v.half()], out_half);
    let out = pointwise(&[u, &d[0], &d[1], &d[2]], v.rank(), out_half, sizes, |x, o| {
        for i in 0..nc {
            o[i] = x[0] * x[3 + i] + x[1] * x[3 + nc + i] + x[2] * x[3 + 2 * nc + i];
        }
    })?;
    Ok(out.with_traceless(v.is_traceless()))
}

/// Remove the trace of a symmetric tensor.
pub fn traceless_part(r: &SpectralField) -> Result<SpectralField> {
    expect_rank(r, Rank::SymTensor)?;
    let mut out = r.clone();
    out.map_modes(|_, c| {
        let t = (c[0] + c[3] + c[5]) / 3.0;
        c[0] -= t;
        c[3] -= t;
        c[5] -= t;
    });
    Ok(out.with_traceless(true))
}

/// s * Id as a symmetric tensor.
pub fn times_identity(s: &SpectralField) -> Result<SpectralField> {
    expect_rank(s, Rank::Scalar)?;
    Ok(s.map_to(Rank::SymTensor, |_, a, b| {
        b[0] = a[0];
        b[3] = a[0];
        b[5] = a[0];
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::FourierGrid;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn g() -> FourierGrid {
        FourierGrid::new(16).unwrap()
    }

    #[test]
    fn fractional_symbol() {
        let f = SpectralField::from_modes(g(), Rank::Scalar, &[([0, 0, 2], vec![c(0.5, 0.0)]), ([0, 0, 0], vec![c(3.0, 0.0)])]).unwrap();
        let h = fractional_laplacian(&f, 0.5).unwrap();
        assert!((h.coeff([0, 0, 2], 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(h.coeff([0, 0, 0], 0), c(0.0, 0.0));
        assert!(fractional_laplacian(&f, 1.0).is_err());
        assert!(fractional_laplacian(&f, 0.0).is_err());
    }

    #[test]
    fn leray_removes_gradient() {
        // (sin x2, 0, 0) + grad sin(x3)
        let modes = vec![
            ([0, 1, 0], vec![c(0.0, -0.5), c(0.0, 0.0), c(0.0, 0.0)]),
            ([0, 0, 1], vec![c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]),
        ];
        let v = SpectralField::from_modes(g(), Rank::Vector, &modes).unwrap();
        let p = leray_project(&v).unwrap();
        assert!((p.coeff([0, 1, 0], 0) - c(0.0, -0.5)).norm() < 1e-15);
        assert!(p.coeff([0, 0, 1], 2).norm() < 1e-15);
    }

    #[test]
    fn truncation_shells() {
        let f = SpectralField::from_modes(g(), Rank::Scalar, &[([1, 0, 0], vec![c(1.0, 0.0)]), ([0, 3, 0], vec![c(1.0, 0.0)])]).unwrap();
        let t = truncate_modes(&f, 2);
        assert_eq!(t.coeff([1, 0, 0], 0), c(1.0, 0.0));
        assert_eq!(t.coeff([0, 3, 0], 0), c(0.0, 0.0));
        assert_eq!(truncate_modes(&f, 100), f);
    }

    #[test]
    fn dealiased_square_matches_convolution() {
        let f = SpectralField::from_modes(
            g(),
            Rank::Scalar,
            &[([1, 2, 0], vec![c(0.3, 0.1)]), ([0, 1, -3], vec![c(-0.2, 0.4)]), ([2, 0, 1], vec![c(0.1, 0.0)])],
        )
        .unwrap();
        let sq = product(&f, &f, Rank::Scalar, |x, o| o[0] = x[0] * x[1]).unwrap();
        let l = g().retained_limit() as i64;
        // direct convolution oracle
        let mut modes = Vec::new();
        f.for_each_mode(|k, i| modes.push((k, f.comp(0)[i])));
        for k1 in -l..=l {
            for k2 in -l..=l {
                for k3 in -l..=l {
                    let mut s = c(0.0, 0.0);
                    for &(ka, a) in &modes {
                        let kb = [k1 - ka[0], k2 - ka[1], k3 - ka[2]];
                        s += a * f.coeff(kb, 0);
                    }
                    assert!((sq.coeff([k1, k2, k3], 0) - s).norm() < 1e-14);
                }
            }
        }
    }
}
