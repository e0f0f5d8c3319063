//! Galerkin truncation of the hypodissipative Navier-Stokes equations to the ball |k| <= K,
//! integrated with an integrating-factor RK4 scheme.

use crate::error::{Error, Result};
use crate::spectral::norms::{dissipation, plancherel_l2};
use crate::spectral::ops::{differentiate, leray_project, outer, truncate_modes, DiffKind};
use crate::spectral::{Rank, SpectralField};

/// Energy fraction a projection may lose before prolongation warns.
pub const PROJECTION_LOSS_WARNING: f64 = 0.1;

/// Divergence-free coefficients on |k| <= radius at time t.
#[derive(Clone, Debug)]
pub struct GalerkinState {
    pub radius: usize,
    pub alpha: f64,
    pub t: f64,
    pub w: SpectralField,
}

impl GalerkinState {
    /// Leray projection and truncation of arbitrary vector data.
    pub fn project(data: &SpectralField, radius: usize, alpha: f64, t: f64) -> Result<GalerkinState> {
        if radius == 0 || radius > data.grid().retained_limit() {
            return Err(Error::ParameterDomain(format!(
                "truncation radius {radius} must lie in 1..={}",
                data.grid().retained_limit()
            )));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::ParameterDomain(format!("alpha must lie in (0,1), got {alpha}")));
        }
        let w = truncate_modes(&leray_project(data)?, radius).resized([radius; 3]);
        Ok(GalerkinState { radius, alpha, t, w })
    }

    /// |v|^2 / 2 integrated over the torus.
    pub fn energy(&self) -> f64 {
        0.5 * plancherel_l2(&self.w)
    }

    pub fn dissipation(&self) -> f64 {
        dissipation(&self.w, self.alpha)
    }

    /// Largest |k . w_k| relative to the largest coefficient.
    pub fn divergence_defect(&self) -> f64 {
        let m = self.w.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        self.w.for_each_mode(|k, idx| {
            let d: num_complex::Complex64 = (0..3).map(|i| self.w.comp(i)[idx] * k[i] as f64).sum();
            worst = worst.max(d.norm());
        });
        worst / m
    }
}

/// -P_K Leray div(w (x) w).
fn nonlinear(w: &SpectralField, radius: usize) -> Result<SpectralField> {
    let flux = differentiate(&outer(w, w)?, DiffKind::Div)?;
    Ok(truncate_modes(&leray_project(&flux)?.scaled(-1.0), radius).resized([radius; 3]))
}

fn linear_rate(k: [i64; 3], alpha: f64) -> f64 {
    let q = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
    if q == 0.0 {
        0.0
    } else {
        q.powf(alpha)
    }
}

/// Multiply mode k by exp(-|k|^{2 alpha} h).
fn decay(w: &SpectralField, alpha: f64, h: f64) -> SpectralField {
    let mut out = w.clone();
    out.map_modes(|k, c| {
        let f = (-linear_rate(k, alpha) * h).exp();
        c.iter_mut().for_each(|z| *z *= f);
    });
    out
}

/// Time derivative of the truncated system.
pub fn galerkin_rhs(state: &GalerkinState) -> Result<SpectralField> {
    let mut lin = state.w.clone();
    lin.map_modes(|k, c| {
        let r = -linear_rate(k, state.alpha);
        c.iter_mut().for_each(|z| *z *= r);
    });
    nonlinear(&state.w, state.radius)?.add(&lin)
}

/// One Lawson RK4 step of size h.
fn lawson_step(w: &SpectralField, radius: usize, alpha: f64, h: f64) -> Result<SpectralField> {
    let half = |f: &SpectralField| decay(f, alpha, 0.5 * h);
    let full = |f: &SpectralField| decay(f, alpha, h);
    let k1 = nonlinear(w, radius)?;
    let wh = half(w);
    let k2 = nonlinear(&wh.axpy(0.5 * h, &half(&k1))?, radius)?;
    let k3 = nonlinear(&wh.axpy(0.5 * h, &k2)?, radius)?;
    let k4 = nonlinear(&full(w).axpy(h, &half(&k3))?, radius)?;
    full(w)
        .axpy(h / 6.0, &full(&k1))?
        .axpy(h / 3.0, &half(&k2.add(&k3)?))?
        .axpy(h / 6.0, &k4)
}

/// One accepted step in the energy ledger.
#[derive(Clone, Debug, PartialEq)]
pub struct LedgerRow {
    pub t: f64,
    pub energy: f64,
    /// int_0^t |(-Laplacian)^{alpha/2} w|^2, by Simpson's rule per step.
    pub dissipated: f64,
    /// energy + dissipated - initial energy.
    pub balance: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub rows: Vec<LedgerRow>,
    pub states: Vec<GalerkinState>,
    pub rejected: usize,
}

impl Trajectory {
    pub fn last(&self) -> &GalerkinState {
        self.states.last().expect("trajectory holds its initial state")
    }

    /// Largest |balance| relative to the initial energy.
    pub fn balance_defect(&self) -> f64 {
        let e0 = self.rows[0].energy;
        let m = self.rows.iter().map(|r| r.balance.abs()).fold(0.0, f64::max);
        if e0 > 0.0 {
            m / e0
        } else {
            m
        }
    }

    /// Largest energy increase between consecutive rows (<= 0 when monotone).
    pub fn energy_increase(&self) -> f64 {
        self.rows.windows(2).map(|p| p[1].energy - p[0].energy).fold(f64::NEG_INFINITY, f64::max)
    }

    /// State at exactly time t, integrating from the nearest stored state before it.
    pub fn state_at(&self, t: f64, tol: f64) -> Result<GalerkinState> {
        let s = self
            .states
            .iter()
            .rev()
            .find(|s| s.t <= t)
            .ok_or_else(|| Error::ParameterDomain(format!("time {t} precedes the trajectory")))?;
        if s.t == t {
            return Ok(s.clone());
        }
        Ok(integrate(s, t - s.t, tol)?.last().clone())
    }
}

/// Adaptive integration on [t0, t0 + horizon]. The local error is estimated by step doubling
/// and kept below tol times the largest coefficient.
pub fn integrate(start: &GalerkinState, horizon: f64, tol: f64) -> Result<Trajectory> {
    if !(horizon > 0.0) || !(tol > 0.0) {
        return Err(Error::ParameterDomain("horizon and tolerance must be positive".into()));
    }
    let (radius, alpha) = (start.radius, start.alpha);
    let end = start.t + horizon;
    let e0 = start.energy();
    let mut rows = vec![LedgerRow { t: start.t, energy: e0, dissipated: 0.0, balance: 0.0 }];
    let mut states = vec![start.clone()];
    let mut w = start.w.clone();
    let mut t = start.t;
    let mut h = horizon.min(0.05);
    let mut dissipated = 0.0;
    let mut rejected = 0;
    while t < end {
        let last = end - t <= h * (1.0 + 1e-12);
        let step = if last { end - t } else { h };
        if step < horizon * 1e-12 {
            return Err(Error::Stiffness(format!("step size {step:e} underflowed at t = {t}")));
        }
        let coarse = lawson_step(&w, radius, alpha, step)?;
        let mid = lawson_step(&w, radius, alpha, 0.5 * step)?;
        let fine = lawson_step(&mid, radius, alpha, 0.5 * step)?;
        let scale = w.max_abs().max(f64::MIN_POSITIVE);
        let err = fine.sub(&coarse)?.max_abs() / 15.0 / scale;
        if err > tol && !(w.max_abs() == 0.0) {
            rejected += 1;
            h = step * (0.9 * (tol / err).powf(0.2)).max(0.2);
            continue;
        }
        // Richardson extrapolation of the two estimates
        let next = fine.axpy(1.0 / 15.0, &fine.sub(&coarse)?)?;
        let d0 = dissipation(&w, alpha);
        let dm = dissipation(&mid, alpha);
        let d1 = dissipation(&next, alpha);
        dissipated += step / 6.0 * (d0 + 4.0 * dm + d1);
        t = if last { end } else { t + step };
        w = next;
        let energy = 0.5 * plancherel_l2(&w);
        rows.push(LedgerRow { t, energy, dissipated, balance: energy + dissipated - e0 });
        states.push(GalerkinState { radius, alpha, t, w: w.clone() });
        let grow = if err > 0.0 { (0.9 * (tol / err).powf(0.2)).min(4.0) } else { 4.0 };
        h = step * grow;
    }
    Ok(Trajectory { rows, states, rejected })
}

/// Result of continuing a field past the end of its interval.
#[derive(Clone, Debug)]
pub struct Prolongation {
    pub trajectory: Trajectory,
    /// Fraction of the energy removed by the projection onto the Galerkin ball.
    pub projection_loss: f64,
    pub warning: Option<String>,
}

/// Project v onto |k| <= radius and integrate over [t0, t0 + horizon].
pub fn prolong(v: &SpectralField, t0: f64, horizon: f64, radius: usize, alpha: f64, tol: f64) -> Result<Prolongation> {
    if v.rank() != Rank::Vector {
        return Err(Error::Rank { expected: Rank::Vector.name().into(), got: v.rank().name().into() });
    }
    let start = GalerkinState::project(v, radius, alpha, t0)?;
    let before = plancherel_l2(v);
    let loss = if before > 0.0 { 1.0 - 2.0 * start.energy() / before } else { 0.0 };
    let warning = (loss > PROJECTION_LOSS_WARNING)
        .then(|| format!("projection onto |k| <= {radius} removes {:.1}% of the energy", 100.0 * loss));
    Ok(Prolongation { trajectory: integrate(&start, horizon, tol)?, projection_loss: loss, warning })
}
