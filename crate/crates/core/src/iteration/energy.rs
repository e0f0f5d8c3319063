//! Energy bookkeeping of a state against its profile.

use super::state::IterationState;
use crate::error::Result;
use crate::spectral::norms::{dissipation, plancherel_l2};

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyRow {
    pub t: f64,
    pub e: f64,
    /// e(t) (1 - delta_{q+1}).
    pub target: f64,
    pub energy: f64,
    pub gap: f64,
    /// delta_{q+1} e(t) / 4.
    pub window: f64,
    pub dissipation: f64,
}

impl EnergyRow {
    pub fn within_window(&self) -> bool {
        self.gap.abs() <= self.window
    }
}

pub fn energy_report(state: &IterationState, times: &[f64]) -> Result<Vec<EnergyRow>> {
    let d = state.delta_next();
    times
        .iter()
        .map(|&t| {
            let v = state.velocity(t)?;
            let e = state.profile().value(t);
            let energy = plancherel_l2(&v);
            Ok(EnergyRow {
                t,
                e,
                target: e * (1.0 - d),
                energy,
                gap: e * (1.0 - d) - energy,
                window: 0.25 * d * e,
                dissipation: dissipation(&v, state.alpha()),
            })
        })
        .collect()
}

/// Largest violation of E(t) + int_s^t D <= E(s), E = |v|^2/2, over sampled s < t.
/// The integral uses the trapezoid rule on the sampled times, which must be increasing.
pub fn energy_inequality_margin(rows: &[EnergyRow]) -> f64 {
    let mut cum = vec![0.0; rows.len()];
    for i in 1..rows.len() {
        cum[i] = cum[i - 1] + 0.5 * (rows[i].t - rows[i - 1].t) * (rows[i].dissipation + rows[i - 1].dissipation);
    }
    let mut worst = f64::NEG_INFINITY;
    for s in 0..rows.len() {
        for t in s + 1..rows.len() {
            worst = worst.max(0.5 * rows[t].energy + (cum[t] - cum[s]) - 0.5 * rows[s].energy);
        }
    }
    worst
}
