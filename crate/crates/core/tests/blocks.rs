mod common;

use common::*;
use num_complex::Complex64;
use rand::Rng;

use cilab::blocks::beltrami::BeltramiDirection;
use cilab::blocks::geometric::{coords_to_matrix, frobenius_dist_to_identity};
use cilab::blocks::{build_families, inverse_divergence, make_beltrami_wave, Parity};
use cilab::spectral::norms::sup_norm;
use cilab::spectral::ops::{differentiate, fractional_laplacian, outer, DiffKind};
use cilab::spectral::random::random_field;
use cilab::spectral::{Rank, SpectralField};
use cilab::Error;

const ID: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// Random symmetric matrix with unit Frobenius norm, as coordinates (11, 22, 33, 12, 13, 23).
fn unit_direction(r: &mut impl Rng) -> [f64; 6] {
    let mut e = [0.0; 6].map(|_: f64| r.random_range(-1.0..1.0));
    let n = frobenius_dist_to_identity(&[1.0 + e[0], 1.0 + e[1], 1.0 + e[2], e[3], e[4], e[5]]);
    e.iter_mut().for_each(|x| *x /= n);
    e
}

fn shifted(e: &[f64; 6], s: f64) -> [[f64; 3]; 3] {
    coords_to_matrix(&[1.0 + s * e[0], 1.0 + s * e[1], 1.0 + s * e[2], s * e[3], s * e[4], s * e[5]])
}

fn max_entry_diff(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> f64 {
    (0..9).map(|i| (a[i / 3][i % 3] - b[i / 3][i % 3]).abs()).fold(0.0, f64::max)
}

#[test]
fn fixture_matches_construction() {
    let text = include_str!("../fixtures/families.toml");
    assert!(build_families().matches_fixture(text).unwrap());
}

#[test]
fn direction_algebra() {
    for k in build_families().vectors(Parity::Even).into_iter().chain(build_families().vectors(Parity::Odd)) {
        let d = BeltramiDirection::new(k).unwrap();
        let kf = k.map(|x| x as f64);
        let dot = |a: [f64; 3]| a.iter().zip(&kf).map(|(x, y)| x * y).sum::<f64>();
        assert!(dot(d.a).abs() < 1e-15);
        assert!((d.a.iter().map(|x| x * x).sum::<f64>() - 0.5).abs() < 1e-15);
        let bb: f64 = d.b.iter().map(|z| z.norm_sqr()).sum();
        assert!((bb - 1.0).abs() < 1e-15);
        let bk: Complex64 = d.b.iter().zip(&kf).map(|(z, y)| z * y).sum();
        assert!(bk.norm() < 1e-15);
        let m = BeltramiDirection::new([-k[0], -k[1], -k[2]]).unwrap();
        assert_eq!(m.a, d.a);
    }
}

#[test]
fn identity_gives_base_coefficients() {
    let f = build_families();
    for par in [Parity::Even, Parity::Odd] {
        let g = f.geometric_decompose(&ID, par).unwrap();
        let base = f.set(par).base;
        for (p, (_, gamma)) in g.iter().take(6).enumerate() {
            assert!((gamma * gamma - base[p]).abs() < 1e-14);
        }
        assert!(max_entry_diff(&f.recompose(&g), &ID) < 1e-12);
    }
}

#[test]
fn reconstruction_in_half_ball() {
    let f = build_families();
    let mut r = rng(21);
    for i in 0..200 {
        let par = Parity::of(i);
        let m = shifted(&unit_direction(&mut r), 0.5 * f.r0);
        let g = f.geometric_decompose(&m, par).unwrap();
        assert!(g.iter().all(|(_, x)| *x > 0.0));
        for (k, x) in &g {
            let partner = g.iter().find(|(kk, _)| *kk == [-k[0], -k[1], -k[2]]).unwrap();
            assert_eq!(partner.1, *x);
        }
        assert!(max_entry_diff(&f.recompose(&g), &m) < 1e-10);
    }
}

#[test]
fn positivity_radius() {
    let f = build_families();
    let mut r = rng(22);
    for par in [Parity::Even, Parity::Odd] {
        // the 1/2 safety factor in r0 keeps coefficients positive well past r0
        for radius in [0.99 * f.r0, 1.5 * f.r0] {
            for _ in 0..1000 {
                let e = unit_direction(&mut r);
                let c = f.set(par).pair_coefficients(&{
                    let m = shifted(&e, radius);
                    [m[0][0], m[1][1], m[2][2], m[0][1], m[0][2], m[1][2]]
                });
                assert!(c.iter().all(|x| *x > 0.0));
            }
        }
        // the adversarial direction loses positivity just past the exact radius
        let set = f.set(par);
        let worst = (0..6)
            .map(|p| {
                let e = set.adversarial_direction(p);
                let m = shifted(&e, 1.001 * f.exact_radius);
                set.pair_coefficients(&[m[0][0], m[1][1], m[2][2], m[0][1], m[0][2], m[1][2]])[p]
            })
            .fold(f64::INFINITY, f64::min);
        assert!(worst < 0.0);
    }
}

#[test]
fn outside_ball_is_rejected() {
    let f = build_families();
    let set = f.set(Parity::Even);
    for p in 0..6 {
        let m = shifted(&set.adversarial_direction(p), 2.0 * f.r0);
        assert!(matches!(f.geometric_decompose(&m, Parity::Even), Err(Error::OutOfRange(_))));
    }
    let mut asym = ID;
    asym[0][1] = 0.01;
    assert!(matches!(f.geometric_decompose(&asym, Parity::Odd), Err(Error::Symmetry(_))));
}

#[test]
fn coefficients_are_smooth() {
    let f = build_families();
    let mut r = rng(23);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let e = unit_direction(&mut r);
        let d = unit_direction(&mut r);
        let base = shifted(&e, 0.5 * f.r0);
        let mut step = base;
        let dm = coords_to_matrix(&d);
        for i in 0..3 {
            for j in 0..3 {
                step[i][j] += h * dm[i][j];
            }
        }
        let g0 = f.geometric_decompose(&base, Parity::Odd).unwrap();
        let g1 = f.geometric_decompose(&step, Parity::Odd).unwrap();
        for (a, b) in g0.iter().zip(&g1) {
            worst = worst.max((b.1 - a.1).abs() / h);
        }
    }
    assert!(worst.is_finite() && worst < 10.0, "{worst}");
}

#[test]
fn single_pair_average() {
    let g = grid(16);
    let f = build_families();
    for k in f.vectors(Parity::Odd).into_iter().take(6) {
        let a = c(0.6, 0.8);
        let w = make_beltrami_wave(g, &[(k, a), ([-k[0], -k[1], -k[2]], a.conj())], 1).unwrap();
        let mean = outer(&w, &w).unwrap().mean();
        let khat = BeltramiDirection::new(k).unwrap().khat();
        for (c, &(i, j)) in cilab::spectral::SYM_PAIRS.iter().enumerate() {
            let expect = ID[i][j] - khat[i] * khat[j];
            assert!((mean[c] - expect).abs() < 1e-12);
        }
    }
}

#[test]
fn wave_edge_cases() {
    let g = grid(16);
    let zero = make_beltrami_wave(g, &[([1, 2, 0], c(0.0, 0.0)), ([-1, -2, 0], c(0.0, 0.0))], 2).unwrap();
    assert_eq!(zero.max_abs(), 0.0);
    let bad = make_beltrami_wave(g, &[([1, 2, 0], c(0.1, 0.2)), ([-1, -2, 0], c(0.1, 0.2))], 1);
    assert!(matches!(bad, Err(Error::Symmetry(_))));
    let lonely = make_beltrami_wave(g, &[([1, 2, 0], c(0.1, 0.2))], 1);
    assert!(matches!(lonely, Err(Error::Symmetry(_))));
    let w = make_beltrami_wave(g, &[([0, 1, 2], c(0.1, 0.2)), ([0, -1, -2], c(0.1, -0.2))], 2).unwrap();
    assert!(differentiate(&w, DiffKind::Div).unwrap().max_abs() < 1e-15);
}

#[test]
fn inverse_divergence_examples() {
    let g = grid(16);
    let k = vector(g, &[([0, 0, 0], [c(1.0, 0.0), c(-2.0, 0.0), c(0.5, 0.0)])]);
    assert_eq!(inverse_divergence(&k).unwrap().max_abs(), 0.0);

    // (2 cos x3, 0, 0)
    let v = vector(g, &[([0, 0, 1], [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])]);
    let r = inverse_divergence(&v).unwrap();
    assert!(max_diff(&differentiate(&r, DiffKind::Div).unwrap(), &v) < 1e-12);

    let f = random_field(g, Rank::Vector, [5; 3], 1.0, &mut rng(24));
    for alpha in [0.15, 0.4] {
        let a = inverse_divergence(&fractional_laplacian(&f, alpha).unwrap()).unwrap();
        let b = fractional_laplacian(&inverse_divergence(&f).unwrap(), alpha).unwrap();
        assert!(max_diff(&a, &b) <= 1e-12 * a.max_abs());
    }
    let r = inverse_divergence(&f).unwrap();
    assert!(r.mean().iter().all(|m| *m == 0.0));
    assert!(r.is_traceless());
    assert!(sup_norm(&r.trace().unwrap()) <= 1e-12 * sup_norm(&r));
    let s = SpectralField::zeros(g, Rank::Scalar, [1; 3]);
    assert!(matches!(inverse_divergence(&s), Err(Error::Rank { .. })));
}
