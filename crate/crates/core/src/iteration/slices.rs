//! Time slices: cutoffs, energy shares and the stress anchored at each slice time.

use rayon::prelude::*;

use super::smooth::{cutoff, cutoff_d1, CUTOFF_SUPPORT};
use super::state::IterationState;
use crate::blocks::BeltramiFamily;
use crate::error::{Error, Result};
use crate::spectral::norms::{plancherel_l2, sup_norm, wiener_bound};
use crate::spectral::ops::{mollify, partial};
use crate::spectral::{FourierGrid, SpectralField};

pub fn slice_weight(mu: usize, l: usize, t: f64) -> f64 {
    cutoff(mu as f64 * t - l as f64)
}

pub fn slice_weight_dt(mu: usize, l: usize, t: f64) -> f64 {
    mu as f64 * cutoff_d1(mu as f64 * t - l as f64)
}

/// Slices l in 0..=mu whose cutoff is nonzero at t.
pub fn active_slices(mu: usize, t: f64) -> Vec<usize> {
    let s = mu as f64 * t;
    let lo = (s - CUTOFF_SUPPORT).ceil().max(0.0) as usize;
    let hi = ((s + CUTOFF_SUPPORT).floor().max(0.0) as usize).min(mu);
    (lo..=hi).filter(|&l| slice_weight(mu, l, t) != 0.0).collect()
}

/// |sum_l cutoff_l(t)^2 - 1|.
pub fn partition_defect(mu: usize, t: f64) -> f64 {
    let s: f64 = (0..=mu).map(|l| slice_weight(mu, l, t).powi(2)).sum();
    (s - 1.0).abs()
}

/// (e(t)(1 - delta_{q+2}) - int |v_q|^2) / (3 (2pi)^3).
pub fn energy_share(e: f64, delta_q2: f64, energy: f64) -> f64 {
    (e * (1.0 - delta_q2) - energy) / (3.0 * FourierGrid::volume())
}

/// Everything about slice l that does not depend on t.
#[derive(Clone, Debug)]
pub struct SliceAnchor {
    pub l: usize,
    pub time: f64,
    pub rho: f64,
    /// Fraction of the mollified stress cancelled by this slice (1 unless the desk cap applies).
    pub share: f64,
    /// share times the mollified stress at the slice time, and its partial derivatives.
    pub stress: SpectralField,
    pub grad: [SpectralField; 3],
    /// Grid sup of the anchored stress and a bound on what the grid can miss.
    pub stress_sup: f64,
    pub sup_tolerance: f64,
    /// Wiener bound of the anchored stress.
    pub stress_bound: f64,
}

/// sup|f| <= grid max + 3 h^2 / 8 sum |k|^2 |f_k|.
fn grid_sup_tolerance(f: &SpectralField) -> f64 {
    let h = 2.0 * std::f64::consts::PI / f.grid().n() as f64;
    let mut w2 = 0.0;
    f.for_each_mode(|k, idx| {
        let q = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        let m: f64 = f.comps().iter().enumerate().map(|(c, x)| f.rank().weight(c) * x[idx].norm_sqr()).sum();
        w2 += q * m.sqrt();
    });
    3.0 * h * h / 8.0 * w2
}

/// Anchors for l = 0..=mu. Errors when the energy share is not positive.
pub fn time_slices(
    state: &IterationState,
    mu: usize,
    ell: f64,
    delta_q2: f64,
    families: &BeltramiFamily,
    strict: bool,
) -> Result<Vec<SliceAnchor>> {
    (0..=mu)
        .into_par_iter()
        .map(|l| {
            let time = l as f64 / mu as f64;
            let f = state.fields(time)?;
            let rho = energy_share(state.profile().value(time), delta_q2, plancherel_l2(&f.v));
            if !(rho > 0.0) {
                return Err(Error::EnergyWindow { l, rho });
            }
            let full = mollify(&f.stress, ell)?.with_traceless(true);
            let cap = 0.5 * families.r0 * rho / wiener_bound(&full);
            let share = if strict { 1.0 } else { cap.min(1.0) };
            let stress = if share < 1.0 { full.scaled(share) } else { full };
            let bound = wiener_bound(&stress);
            let grad = [partial(&stress, 0), partial(&stress, 1), partial(&stress, 2)];
            Ok(SliceAnchor {
                l,
                time,
                rho,
                share,
                stress_sup: sup_norm(&stress),
                sup_tolerance: grid_sup_tolerance(&stress),
                stress_bound: bound,
                stress,
                grad,
            })
        })
        .collect()
}
