mod common;

use proptest::prelude::*;

use cilab::blocks::geometric::{coords_to_matrix, frobenius_dist_to_identity, sym_coords};
use cilab::blocks::inverse_div::inverse_divergence;
use cilab::blocks::{build_families, Parity};
use cilab::iteration::profile_family;
use cilab::iteration::slices::partition_defect;
use cilab::spectral::mollifier::{psi, psi_hat};
use cilab::spectral::norms::plancherel_l2;
use cilab::spectral::ops::{differentiate, fractional_laplacian, leray_project, mollify, DiffKind};
use cilab::spectral::random::random_field;
use cilab::spectral::{Rank, SpectralField};

use common::*;

fn rank_of(i: u8) -> Rank {
    match i % 3 {
        0 => Rank::Scalar,
        1 => Rank::Vector,
        _ => Rank::SymTensor,
    }
}

fn field(seed: u64, rank: Rank, h: usize) -> SpectralField {
    random_field(grid(16), rank, [h; 3], 1.0, &mut rng(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transform_round_trip(seed in any::<u64>(), r in 0u8..3, h in 1usize..6) {
        let f = field(seed, rank_of(r), h);
        let back = SpectralField::from_physical(grid(16), &f.to_physical([16; 3]), Some(f.half())).unwrap();
        prop_assert!(max_diff(&f, &back) <= 1e-14 * f.max_abs().max(1e-300));
    }

    #[test]
    fn coefficients_are_hermitian(seed in any::<u64>(), r in 0u8..3, h in 1usize..6) {
        let f = field(seed, rank_of(r), h);
        let mut worst = 0.0f64;
        f.for_each_mode(|k, idx| {
            for c in 0..f.rank().ncomp() {
                worst = worst.max((f.comp(c)[idx] - f.coeff([-k[0], -k[1], -k[2]], c).conj()).norm());
            }
        });
        prop_assert_eq!(worst, 0.0);
    }

    #[test]
    fn leray_projection_is_idempotent(seed in any::<u64>(), h in 1usize..6) {
        let v = field(seed, Rank::Vector, h);
        let p = leray_project(&v).unwrap();
        prop_assert!(max_diff(&leray_project(&p).unwrap(), &p) <= 1e-15 * p.max_abs().max(1e-300));
        prop_assert!(differentiate(&p, DiffKind::Div).unwrap().max_abs() <= 1e-13 * v.max_abs());
        let phi = field(seed ^ 1, Rank::Scalar, h);
        let grad = differentiate(&phi, DiffKind::Grad).unwrap();
        prop_assert!(leray_project(&grad).unwrap().max_abs() <= 1e-14 * grad.max_abs());
        prop_assert!(plancherel_l2(&p) <= plancherel_l2(&v) * (1.0 + 1e-14));
    }

    #[test]
    fn inverse_divergence_inverts(seed in any::<u64>(), h in 1usize..6) {
        let v = field(seed, Rank::Vector, h);
        let r = inverse_divergence(&v).unwrap();
        let mut centred = v.clone();
        centred.remove_mean();
        let d = differentiate(&r, DiffKind::Div).unwrap();
        prop_assert!(max_diff(&d, &centred) <= 1e-13 * v.max_abs());
        prop_assert!(r.trace().unwrap().max_abs() <= 1e-14 * r.max_abs().max(1e-300));
    }

    #[test]
    fn fractional_powers_compose(seed in any::<u64>(), a in 0.05f64..0.45, b in 0.05f64..0.45) {
        let f = field(seed, Rank::Scalar, 4);
        let ab = fractional_laplacian(&fractional_laplacian(&f, a).unwrap(), b).unwrap();
        let direct = fractional_laplacian(&f, a + b).unwrap();
        prop_assert!(max_diff(&ab, &direct) <= 1e-13 * direct.max_abs().max(1e-300));
    }

    #[test]
    fn mollification_contracts(seed in any::<u64>(), ell in 0.01f64..1.0) {
        let f = field(seed, Rank::Scalar, 3);
        let m = mollify(&f, ell).unwrap();
        prop_assert!(plancherel_l2(&m) <= plancherel_l2(&f));
        prop_assert_eq!(m.mean(), f.mean());
        // psi >= 0 with unit mass, so the sup cannot grow; the fine grid resolves the degree-3 data.
        let sup = |g: &SpectralField| g.to_physical([48; 3]).data[0].iter().fold(0.0f64, |a, x| a.max(x.abs()));
        prop_assert!(sup(&m) <= sup(&f) * 1.01);
    }

    #[test]
    fn kernel_bounds(r in 0.0f64..1.5, s in 0.0f64..200.0) {
        prop_assert!(psi(r) >= 0.0);
        prop_assert!(psi_hat(s).abs() <= 1.0 + 1e-14);
    }

    #[test]
    fn cutoffs_partition_unity(mu in 1usize..200, t in 0.0f64..=1.0) {
        prop_assert!(partition_defect(mu, t) < 1e-12);
    }

    #[test]
    fn family_profiles_stay_in_range(k in 2.0f64..20.0, count in 2usize..5, seed in any::<u64>()) {
        for p in profile_family(k, count, seed).unwrap() {
            prop_assert_eq!(p.initial_jet(), (1.0, -2.0 * k));
            for i in 0..=400 {
                let e = p.value(i as f64 / 400.0);
                prop_assert!((0.5..=1.0).contains(&e));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn geometric_decomposition_round_trip(dir in prop::array::uniform6(-1.0f64..1.0), u in 0.0f64..1.0, odd in any::<bool>()) {
        let fam = build_families();
        let id = [1.0, 1.0, 1.0, 0.0, 0.0, 0.0];
        let norm = frobenius_dist_to_identity(&std::array::from_fn(|j| id[j] + dir[j]));
        prop_assume!(norm > 1e-6);
        let x: [f64; 6] = std::array::from_fn(|j| id[j] + u * fam.r0 * dir[j] / norm);
        let r = coords_to_matrix(&x);
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let gammas = fam.geometric_decompose(&r, parity).unwrap();
        prop_assert!(gammas.iter().all(|(_, g)| *g > 0.0));
        let back = sym_coords(&fam.recompose(&gammas));
        let target = sym_coords(&r);
        for j in 0..6 {
            prop_assert!((back[j] - target[j]).abs() <= 1e-12);
        }
    }
}
