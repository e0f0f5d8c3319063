mod common;

use std::f64::consts::PI;

use rand::Rng;

use cilab::blocks::build_families;
use cilab::error::Error;
use cilab::iteration::energy::energy_report;
use cilab::iteration::flow::solve_flow;
use cilab::iteration::ledger::{inductive_ledger, ENTRY_NAMES};
use cilab::iteration::residual::residual;
use cilab::iteration::schedule::{rho_ratio_bound, Relation};
use cilab::iteration::slices::{active_slices, energy_share, partition_defect, slice_weight, time_slices};
use cilab::iteration::*;
use cilab::spectral::norms::{plancherel_l2, sup_norm};
use cilab::spectral::ops::{differentiate, DiffKind};
use cilab::spectral::{FourierGrid, SpectralField};

use common::*;

#[test]
fn desk_schedule_matches_closed_forms() {
    let fam = build_families();
    let s = desk_schedule(&desk_profile(), &fam);
    let (a, b, c): (f64, f64, f64) = (2.0, 1.1, 2.6);
    assert_eq!(s.delta(0), 0.5);
    assert!((s.delta(1) - 2f64.powf(-1.1)).abs() < 1e-15);
    assert_eq!(s.lambda(0), 8.0);
    for q in 0..4 {
        let d = a.powf(-b.powi(q as i32));
        let l = a.powf(c * b.powi(q as i32 + 1));
        assert!((s.delta(q) - d).abs() <= 1e-15 * d);
        assert!(s.lambda(q) >= l && s.lambda(q) < l + 1.0 && s.lambda(q) <= 2.0 * l);
    }
    for q in 0..3 {
        let (dq, dq1, lq, lq1) = (s.delta(q), s.delta(q + 1), s.lambda(q), s.lambda(q + 1));
        let mu = (dq1 * dq).powf(0.25) * (lq * lq1).sqrt();
        assert_eq!(s.mu(q), mu.ceil());
        let ell = (dq / dq1).powf(0.125) / (lq.powf(0.25) * lq1.powf(0.75));
        assert!((s.ell(q) - ell).abs() < 1e-15 * ell);
    }
    assert!((s.beta - 0.1 / 10.5).abs() < 1e-16);
    assert!(!s.failures().is_empty());
    let bounds = ProfileBounds { c1: desk_profile().c1_norm(), c2: desk_profile().c2_norm(), family: false };
    match ParameterSchedule::build(desk_params(), 3, bounds, true, &fam) {
        Err(Error::ScheduleInfeasible(labels)) => assert!(!labels.is_empty()),
        other => panic!("strict desk schedule accepted: {other:?}"),
    }
}

#[test]
fn huge_base_schedule_is_feasible_in_strict_mode() {
    let fam = build_families();
    let p = ScheduleParams { a: 1e6, ..desk_params() };
    let s = ParameterSchedule::build(p, 1, ProfileBounds { c1: 3.0, c2: 30.0, family: false }, true, &fam).unwrap();
    assert!(s.asserted_failures().is_empty());
    assert!(s.conditions.iter().any(|c| c.group == "frequency_ratios"));
    assert!(s.conditions.iter().any(|c| c.group == "parameter_ranges"));
    for c in &s.conditions {
        let slack = 1e-12 * c.lhs.abs().max(c.rhs.abs());
        let holds = match c.relation {
            Relation::Le => c.lhs <= c.rhs + slack,
            Relation::Ge => c.lhs + slack >= c.rhs,
            Relation::Gt => c.lhs > c.rhs,
        };
        assert_eq!(holds, c.pass, "{}", c.label());
    }
}

#[test]
fn family_start_frequency_is_monotone_and_shared() {
    let fam = build_families();
    let s = desk_schedule(&desk_profile(), &fam);
    let x = family_mode_lambda_bar(10.0, 100.0, &s);
    assert_eq!(x, family_mode_lambda_bar(10.0, 100.0, &s));
    let mut last = 0.0;
    for e2 in [1.0, 1e2, 1e4, 1e6, 1e8] {
        let v = family_mode_lambda_bar(1.0, e2, &s);
        assert!(v >= last);
        last = v;
    }
    // Large C1 puts the a^b C1 branch on top.
    let e1 = 1e6;
    let v = family_mode_lambda_bar(e1, e1, &s);
    assert_eq!(v, (s.c0 * 2f64.powf(1.1) * e1).ceil());
}

#[test]
fn start_triple_energy_and_residual() {
    let g = grid(32);
    let prof = desk_profile();
    let d1 = 2f64.powf(-1.1);
    let st = StartTriple::new(g, prof.clone(), 5, d1, 0.15).unwrap();
    for i in 0..20 {
        let t = i as f64 / 19.0;
        let e = plancherel_l2(&st.velocity(t));
        assert!((e - prof.value(t) * (1.0 - d1)).abs() < 1e-12);
        assert!(differentiate(&st.velocity(t), DiffKind::Div).unwrap().max_abs() < 1e-14);
        assert!(st.stress(t).trace().unwrap().max_abs() < 1e-15 * st.stress(t).max_abs());
    }
    let state = IterationState::start(st);
    for t in [0.0, 0.25, 0.6, 1.0] {
        let r = residual(&state, t).unwrap();
        let v = sup_norm(&state.velocity(t).unwrap());
        assert!(r.sup <= 1e-8 * v, "t = {t}: {} vs {v}", r.sup);
    }
}

#[test]
fn constant_profile_has_no_transport_stress() {
    let st = StartTriple::new(grid(16), EnergyProfile::constant(1.0).unwrap(), 3, 0.4, 0.15).unwrap();
    for t in [0.0, 0.3, 1.0] {
        assert_eq!(st.stress_transport(t).max_abs(), 0.0);
        assert!(st.stress_dissipative(t).max_abs() > 0.0);
    }
    assert!(matches!(StartTriple::new(grid(16), EnergyProfile::constant(1.0).unwrap(), 0, 0.4, 0.15), Err(Error::ParameterDomain(_))));
    assert!(matches!(StartTriple::new(grid(16), EnergyProfile::constant(1.0).unwrap(), 3, 1.0, 0.15), Err(Error::ParameterDomain(_))));
}

#[test]
fn slice_partition_and_energy_shares() {
    let mut r = rng(11);
    for mu in [1usize, 6, 7, 40] {
        for _ in 0..1000 {
            let t: f64 = r.random();
            assert!(partition_defect(mu, t) < 1e-12);
            for l in 0..=mu {
                if !active_slices(mu, t).contains(&l) {
                    assert_eq!(slice_weight(mu, l, t), 0.0);
                }
            }
        }
    }

    let fam = build_families();
    let prof = desk_profile();
    let (d1, d2) = (2f64.powf(-1.1), 2f64.powf(-1.21));
    let st = StartTriple::new(grid(32), prof.clone(), 5, d1, 0.15).unwrap();
    let state = IterationState::start(st);
    let anchors = time_slices(&state, 6, 0.05, d2, &fam, false).unwrap();
    assert_eq!(anchors.len(), 7);
    for a in &anchors {
        let e = prof.value(a.time);
        let rho = e * (d1 - d2) / (3.0 * (2.0 * PI).powi(3));
        assert!((a.rho - rho).abs() <= 1e-13 * rho);
        assert!((energy_share(e, d2, e * (1.0 - d1)) - rho).abs() <= 1e-13 * rho);
        assert!(a.share > 0.0 && a.share <= 1.0);
        assert!(a.stress.trace().unwrap().max_abs() <= 1e-14 * a.stress.max_abs());
    }
    // With delta_{q+2} <= delta_{q+1}/2 and e >= 1/2 the share never drops below the bracket.
    let (lo, _) = prof.range();
    for a in time_slices(&state, 6, 0.05, 0.5 * d1, &fam, false).unwrap() {
        assert!(d1 * lo / a.rho <= rho_ratio_bound());
    }
    match time_slices(&state, 6, 0.05, 0.9, &fam, false) {
        Err(Error::EnergyWindow { rho, .. }) => assert!(rho < 0.0),
        other => panic!("expected an energy window error, got {other:?}"),
    }
}

/// 0.8 (1 + s) (sin x2, sin x3, sin x1).
fn abc(x: [f64; 3], s: f64) -> [f64; 3] {
    let a = 0.8 * (1.0 + s);
    [a * x[1].sin(), a * x[2].sin(), a * x[0].sin()]
}

fn abc_field(g: FourierGrid, s: f64) -> SpectralField {
    let a = 0.8 * (1.0 + s);
    let z = c(0.0, 0.0);
    let m = c(0.0, -0.5 * a);
    vector(g, &[([0, 1, 0], [m, z, z]), ([0, 0, 1], [z, m, z]), ([1, 0, 0], [z, z, m])])
}

fn reference_flow(x: [f64; 3], t: f64, anchor: f64, steps: usize) -> [f64; 3] {
    let h = (anchor - t) / steps as f64;
    let add = |x: [f64; 3], d: [f64; 3], f: f64| [x[0] + f * d[0], x[1] + f * d[1], x[2] + f * d[2]];
    let mut y = x;
    for n in 0..steps {
        let s = t + n as f64 * h;
        let k1 = abc(y, s);
        let k2 = abc(add(y, k1, 0.5 * h), s + 0.5 * h);
        let k3 = abc(add(y, k2, 0.5 * h), s + 0.5 * h);
        let k4 = abc(add(y, k3, h), s + h);
        for i in 0..3 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    y
}

#[test]
fn characteristics_converge_at_fourth_order() {
    let g = grid(16);
    let vel = move |s: f64| Ok(abc_field(g, s));
    let pts = [[0.3, 1.1, 2.0], [4.0, 0.2, 5.5], [1.0, 3.0, 0.7]];
    let (t, anchor) = (0.7, 0.1);
    let exact: Vec<[f64; 3]> = pts.iter().map(|&p| reference_flow(p, t, anchor, 20_000)).collect();

    let mut errs = Vec::new();
    for steps in [2usize, 4, 8, 16] {
        let fm = solve_flow(&vel, &pts, t, anchor, steps).unwrap();
        assert_eq!(fm.steps, steps);
        let e = fm
            .phi
            .iter()
            .zip(&exact)
            .flat_map(|(a, b)| (0..3).map(move |i| (a[i] - b[i]).abs()))
            .fold(0.0, f64::max);
        errs.push(e);
    }
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order > 3.7, "{errs:?}");
    }

    // Jacobian against central differences of the reference map; the field is divergence-free.
    let fm = solve_flow(&vel, &pts, t, anchor, 64).unwrap();
    let h = 1e-5;
    for (p, jac) in pts.iter().zip(&fm.jac) {
        for b in 0..3 {
            let (mut up, mut dn) = (*p, *p);
            up[b] += h;
            dn[b] -= h;
            let (fu, fd) = (reference_flow(up, t, anchor, 2000), reference_flow(dn, t, anchor, 2000));
            for a in 0..3 {
                assert!((jac[a][b] - (fu[a] - fd[a]) / (2.0 * h)).abs() < 1e-6);
            }
        }
        let det = jac[0][0] * (jac[1][1] * jac[2][2] - jac[1][2] * jac[2][1])
            - jac[0][1] * (jac[1][0] * jac[2][2] - jac[1][2] * jac[2][0])
            + jac[0][2] * (jac[1][0] * jac[2][1] - jac[1][1] * jac[2][0]);
        assert!((det - 1.0).abs() < 1e-6);
    }
}

#[test]
fn characteristics_edge_cases() {
    let g = grid(8);
    let zero = move |_s: f64| Ok(SpectralField::zeros(g, cilab::spectral::Rank::Vector, [1, 1, 1]));
    let pts = [[1.0, 2.0, 3.0]];
    let fm = solve_flow(&zero, &pts, 0.5, 0.0, 3).unwrap();
    assert_eq!(fm.phi[0], pts[0]);
    assert_eq!(fm.jac[0], [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    let u = [0.3, -0.2, 0.5];
    let constant = move |_s: f64| Ok(vector(g, &[([0, 0, 0], [c(u[0], 0.0), c(u[1], 0.0), c(u[2], 0.0)])]));
    let fm = solve_flow(&constant, &pts, 0.5, 0.1, 2).unwrap();
    for i in 0..3 {
        assert!((fm.phi[0][i] - (pts[0][i] - 0.4 * u[i])).abs() < 1e-14);
    }
    let fm = solve_flow(&constant, &pts, 0.25, 0.25, 5).unwrap();
    assert_eq!(fm.phi[0], pts[0]);
    assert!(matches!(solve_flow(&constant, &pts, 0.5, 0.0, 0), Err(Error::TransportStiffness(_))));
}

#[test]
fn profile_family_members() {
    let k = 4.0;
    let fam = profile_family(k, 3, 5).unwrap();
    let (e1, e2) = family_bounds(&fam);
    assert!(e1 <= 2.0 * k + 2.0 && e2 >= e1);
    for p in &fam {
        assert!((p.value(0.0) - fam[0].value(0.0)).abs() < 1e-14);
        assert!((p.d1(0.0) - fam[0].d1(0.0)).abs() < 1e-14);
        for i in 0..=10_000 {
            let t = i as f64 / 10_000.0;
            let e = p.value(t);
            assert!((0.5..=1.0).contains(&e), "{t} {e}");
        }
        for i in 0..=200 {
            assert!(p.d1(i as f64 / 200.0 / (4.0 * k)) <= -2.0 * k + 2.0 + 1e-12);
        }
    }
    let t = 1.0 / (8.0 * k);
    for i in 0..fam.len() {
        for j in i + 1..fam.len() {
            assert!((fam[i].value(t) - fam[j].value(t)).abs() > 1e-5);
        }
    }
    assert!(matches!(profile_family(4.0, 1, 0), Err(Error::ParameterDomain(_))));
}

#[test]
fn desk_stage_adds_the_perturbation() {
    let fam = families();
    let prof = desk_profile();
    let sch = desk_schedule(&prof, &fam);
    let st = StartTriple::new(grid(128), prof, sch.lambda_bar_int().unwrap(), sch.delta(1), 0.15).unwrap();
    let s0 = IterationState::start(st);
    for r in energy_report(&s0, &[0.0, 0.4, 1.0]).unwrap() {
        assert!(r.gap.abs() < 1e-12);
    }
    let s1 = iterate_once(&s0, &sch, fam, StageOptions::default()).unwrap();
    assert_eq!(s1.q(), 1);
    let t = 0.3;
    let (pert, asm) = s1.assemble_at(t, false).unwrap();
    let v1 = s1.velocity(t).unwrap();
    let v0 = s0.velocity(t).unwrap();
    assert!(v1.sub(&v0).unwrap().sub(&pert.w).unwrap().max_abs() <= 1e-15 * v1.max_abs());
    assert!(differentiate(&v1, DiffKind::Div).unwrap().max_abs() <= 1e-8 * v1.max_abs());
    assert!(asm.stress.trace().unwrap().max_abs() <= 1e-8 * asm.stress.max_abs());

    for (state, q) in [(&s0, 0), (&s1, 1)] {
        let ledger = inductive_ledger(state, &sch, &[0.5], false).unwrap();
        let names: Vec<_> = ledger.iter().map(|e| e.name).collect();
        assert_eq!(names, ENTRY_NAMES);
        assert!(ledger.iter().all(|e| e.q == q && !e.asserted && e.bound > 0.0 && e.measured.is_finite()));
    }
}

#[test]
fn energy_gap_shrinks_with_frequency() {
    let fam = families();
    let prof = desk_profile();
    let sch = desk_schedule(&prof, &fam);
    let st = StartTriple::new(grid(128), prof, sch.lambda_bar_int().unwrap(), sch.delta(1), 0.15).unwrap();
    let s0 = IterationState::start(st);
    let times: Vec<f64> = (0..=6).map(|l| l as f64 / 6.0).collect();
    let worst = |f: usize| {
        let s1 = iterate_once(&s0, &sch, fam.clone(), StageOptions { frequency: Some(f), ..Default::default() }).unwrap();
        let rows = energy_report(&s1, &times).unwrap();
        assert!(rows.iter().all(|r| r.within_window()));
        rows.iter().map(|r| r.gap.abs()).fold(0.0, f64::max)
    };
    let (coarse, fine) = (worst(6), worst(12));
    assert!(fine < coarse / 3.0, "{coarse:e} -> {fine:e}");
}
