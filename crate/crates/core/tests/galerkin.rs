mod common;

use cilab::blocks::make_beltrami_wave;
use cilab::error::Error;
use cilab::galerkin::{galerkin_rhs, integrate, prolong, GalerkinState, PROJECTION_LOSS_WARNING};
use cilab::spectral::norms::{dissipation, plancherel_l2};
use cilab::spectral::ops::leray_project;
use cilab::spectral::random::random_field;
use cilab::spectral::{Rank, SpectralField};

use common::*;

fn inner(a: &SpectralField, b: &SpectralField) -> f64 {
    0.25 * (plancherel_l2(&a.add(b).unwrap()) - plancherel_l2(&a.sub(b).unwrap()))
}

fn random_data(n: usize, radius: usize, seed: u64) -> SpectralField {
    let v = random_field(grid(n), Rank::Vector, [radius / 2; 3], 2.0, &mut rng(seed));
    leray_project(&v).unwrap()
}

#[test]
fn beltrami_superposition_decays_at_its_exact_rate() {
    let g = grid(32);
    // Three directions with |k|^2 = 5 share one curl eigenvalue.
    let amps = [
        ([1, 2, 0], c(0.3, 0.1)),
        ([-1, -2, 0], c(0.3, -0.1)),
        ([0, 1, 2], c(-0.2, 0.25)),
        ([0, -1, -2], c(-0.2, -0.25)),
        ([2, 0, 1], c(0.1, 0.0)),
        ([-2, 0, -1], c(0.1, 0.0)),
    ];
    let w = make_beltrami_wave(g, &amps, 1).unwrap();
    let alpha = 0.15;
    let s = GalerkinState::project(&w, 6, alpha, 0.0).unwrap();
    let rate = 5f64.powf(alpha);
    assert!(galerkin_rhs(&s).unwrap().axpy(rate, &s.w).unwrap().max_abs() < 1e-14);
    let tr = integrate(&s, 1.0, 1e-11).unwrap();
    for st in &tr.states {
        let exact = s.w.scaled((-rate * st.t).exp());
        assert!(st.w.sub(&exact).unwrap().max_abs() <= 1e-8 * s.w.max_abs(), "t = {}", st.t);
    }
    assert_eq!(tr.last().t, 1.0);
}

#[test]
fn nonlinearity_conserves_energy() {
    for seed in 0..4 {
        let s = GalerkinState::project(&random_data(32, 8, seed), 8, 0.15, 0.0).unwrap();
        let rhs = galerkin_rhs(&s).unwrap();
        let d = dissipation(&s.w, 0.15);
        assert!((inner(&s.w, &rhs) + d).abs() <= 1e-12 * d, "{} vs {d}", inner(&s.w, &rhs));
    }
}

#[test]
fn random_data_energy_balance() {
    let s = GalerkinState::project(&random_data(32, 8, 21), 8, 0.15, 0.0).unwrap();
    assert!(s.divergence_defect() < 1e-14);
    let tr = integrate(&s, 1.0, 1e-9).unwrap();
    assert!(tr.balance_defect() <= 1e-8, "{}", tr.balance_defect());
    assert!(tr.energy_increase() <= 0.0);
    assert!(tr.rows.windows(2).all(|p| p[1].dissipated >= p[0].dissipated));
    assert!(tr.last().divergence_defect() < 1e-12);
}

#[test]
fn prolongation_of_resolved_data_is_plain_integration() {
    let v = random_data(32, 8, 4);
    let p = prolong(&v, 0.25, 0.5, 8, 0.3, 1e-9).unwrap();
    assert!(p.projection_loss.abs() < 1e-13);
    assert!(p.warning.is_none());
    let direct = integrate(&GalerkinState::project(&v, 8, 0.3, 0.25).unwrap(), 0.5, 1e-9).unwrap();
    assert_eq!(p.trajectory.last().t, 0.75);
    assert_eq!(p.trajectory.last().w.sub(&direct.last().w).unwrap().max_abs(), 0.0);

    let state = p.trajectory.state_at(0.5, 1e-9).unwrap();
    assert_eq!(state.t, 0.5);
    assert!(matches!(p.trajectory.state_at(0.1, 1e-9), Err(Error::ParameterDomain(_))));
}

#[test]
fn prolongation_warns_when_the_ball_drops_energy() {
    let g = grid(32);
    let w = make_beltrami_wave(g, &[([1, 2, 0], c(0.3, 0.0)), ([-1, -2, 0], c(0.3, 0.0))], 4).unwrap();
    let p = prolong(&w, 0.0, 0.1, 4, 0.15, 1e-8).unwrap();
    assert!(p.projection_loss > PROJECTION_LOSS_WARNING);
    assert!(p.warning.is_some());
    assert_eq!(p.trajectory.last().w.max_abs(), 0.0);
}

#[test]
fn distinct_data_stay_distinct() {
    let (a, b) = (random_data(32, 8, 1), random_data(32, 8, 2));
    let ta = integrate(&GalerkinState::project(&a, 8, 0.15, 0.0).unwrap(), 1.0, 1e-9).unwrap();
    let tb = integrate(&GalerkinState::project(&b, 8, 0.15, 0.0).unwrap(), 1.0, 1e-9).unwrap();
    let sep = plancherel_l2(&ta.last().w.sub(&tb.last().w).unwrap());
    assert!(sep > 1e-6 * plancherel_l2(&ta.last().w));
}

#[test]
fn truncation_refinement_is_cauchy() {
    let v = random_data(32, 4, 9);
    let at = |k: usize| {
        let s = GalerkinState::project(&v, k, 0.15, 0.0).unwrap();
        integrate(&s, 0.5, 1e-10).unwrap().last().w.resized([10; 3])
    };
    let (w4, w7, w10) = (at(4), at(7), at(10));
    let d1 = plancherel_l2(&w7.sub(&w4).unwrap());
    let d2 = plancherel_l2(&w10.sub(&w7).unwrap());
    assert!(d1 > 0.0 && d2 < d1, "{d1:e} {d2:e}");
}

#[test]
fn invalid_inputs() {
    let v = random_data(16, 4, 0);
    assert!(matches!(GalerkinState::project(&v, 0, 0.15, 0.0), Err(Error::ParameterDomain(_))));
    assert!(matches!(GalerkinState::project(&v, 99, 0.15, 0.0), Err(Error::ParameterDomain(_))));
    assert!(matches!(GalerkinState::project(&v, 4, 1.0, 0.0), Err(Error::ParameterDomain(_))));
    let s = GalerkinState::project(&v, 4, 0.15, 0.0).unwrap();
    assert!(matches!(integrate(&s, 0.0, 1e-9), Err(Error::ParameterDomain(_))));
    assert!(matches!(integrate(&s, 1.0, 0.0), Err(Error::ParameterDomain(_))));
    let scalar_field = scalar(grid(16), &[([1, 0, 0], c(1.0, 0.0))]);
    assert!(matches!(prolong(&scalar_field, 0.0, 1.0, 4, 0.15, 1e-9), Err(Error::Rank { .. })));
}
