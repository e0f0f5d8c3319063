//! Measured-versus-bound ledger of the inductive estimates at one stage.

use super::schedule::ParameterSchedule;
use super::state::{central_difference, IterationState};
use crate::error::Result;
use crate::spectral::norms::{c_norm, sup_norm};
use crate::spectral::ops::advect;

#[derive(Clone, Debug, PartialEq)]
pub struct LedgerEntry {
    pub q: usize,
    pub name: &'static str,
    pub measured: f64,
    pub bound: f64,
    pub asserted: bool,
}

impl LedgerEntry {
    pub fn ratio(&self) -> f64 {
        self.measured / self.bound
    }

    pub fn pass(&self) -> bool {
        self.measured <= self.bound
    }
}

pub const ENTRY_NAMES: [&str; 10] = [
    "perturbation_c0",
    "perturbation_c1",
    "pressure_increment_c0",
    "pressure_increment_c1",
    "stress_c0",
    "stress_c1",
    "stress_transport",
    "perturbation_dt",
    "pressure_increment_dt",
    "energy_window",
];

/// Max over `times` of every estimate for the state at stage q. Entries are asserted only in
/// strict mode. The time-derivative constants are taken equal to M.
pub fn inductive_ledger(state: &IterationState, schedule: &ParameterSchedule, times: &[f64], strict: bool) -> Result<Vec<LedgerEntry>> {
    let q = state.q();
    let (dq, dq1, lq) = (schedule.delta(q), schedule.delta(q + 1), schedule.lambda(q));
    let m = schedule.m_const;
    let eta = schedule.eta;
    let mut meas = [0.0f64; 10];
    for &t in times {
        let f = state.fields(t)?;
        let w = match state.previous() {
            Some(p) => f.v.sub(&p.velocity(t)?)?,
            None => f.v.clone(),
        };
        let dp = match state.previous() {
            Some(p) => f.p.sub(&p.fields(t)?.p)?,
            None => f.p.clone(),
        };
        let dp_dt = match state.previous() {
            Some(p) => central_difference(t, |s| state.fields(s)?.p.sub(&p.fields(s)?.p))?,
            None => f.p.scaled(0.0),
        };
        let r_dt = central_difference(t, |s| Ok(state.fields(s)?.stress.clone()))?;
        let transport = r_dt.add(&advect(&f.v, &f.stress)?)?;
        let e = state.profile().value(t);
        let d = state.delta_next();
        let gap = (e * (1.0 - d) - crate::spectral::norms::plancherel_l2(&f.v)).abs();
        let vals = [
            sup_norm(&w) / (m * dq.sqrt()),
            c_norm(&w, 1) / (m * dq.sqrt() * lq),
            sup_norm(&dp) / (m * m * dq),
            c_norm(&dp, 1) / (m * m * dq * lq),
            sup_norm(&f.stress) / (eta * dq1),
            c_norm(&f.stress, 1) / (m * dq1 * lq),
            sup_norm(&transport) / (m * dq1 * dq.sqrt() * lq),
            sup_norm(&state.perturbation_dt(t)?) / (m * dq.sqrt() * lq),
            sup_norm(&dp_dt) / (m * dq * lq),
            gap / (0.25 * d * e),
        ];
        for (a, b) in meas.iter_mut().zip(vals) {
            *a = a.max(b);
        }
    }
    Ok(ENTRY_NAMES
        .iter()
        .zip(meas)
        .map(|(&name, r)| LedgerEntry { q, name, measured: r, bound: 1.0, asserted: strict })
        .collect())
}
