//! Iteration states. Stage 0 is explicit; later stages are evaluated on demand at any time
//! from the previous stage, the slice anchors and the characteristic flow.

use std::sync::{Arc, Mutex};

use super::flow::{base_steps, VelocityFn};
use super::perturbation::{slow_layout, Perturbation, PerturbationOptions, PerturbationSetup};
use super::profile::EnergyProfile;
use super::reynolds::{assemble, Assembled, PreviousFields};
use super::schedule::ParameterSchedule;
use super::slices::{time_slices, SliceAnchor};
use super::smooth::CUTOFF_SUPPORT;
use super::start::StartTriple;
use crate::blocks::BeltramiFamily;
use crate::error::{Error, Result};
use crate::spectral::norms::wiener_bound;
use crate::spectral::ops::{full_jacobian, mollify};
use crate::spectral::{FourierGrid, SpectralField};

/// Entries kept in each per-time cache.
const CACHE_LEN: usize = 12;

/// Step for the eighth-order central difference in time.
pub const TIME_STEP: f64 = 2e-4;
pub const CENTRAL8: [f64; 9] = [
    1.0 / 280.0,
    -4.0 / 105.0,
    1.0 / 5.0,
    -4.0 / 5.0,
    0.0,
    4.0 / 5.0,
    -1.0 / 5.0,
    4.0 / 105.0,
    -1.0 / 280.0,
];

/// Eighth-order central difference of a field-valued function of time.
pub fn central_difference(t: f64, f: impl Fn(f64) -> Result<SpectralField>) -> Result<SpectralField> {
    let mut acc: Option<SpectralField> = None;
    for (j, c) in CENTRAL8.iter().enumerate() {
        if *c == 0.0 {
            continue;
        }
        let g = f(t + (j as f64 - 4.0) * TIME_STEP)?;
        acc = Some(match acc {
            None => g.scaled(c / TIME_STEP),
            Some(a) => a.axpy(c / TIME_STEP, &g)?,
        });
    }
    Ok(acc.expect("nonzero stencil"))
}

/// Velocity, pressure and stress at one time.
#[derive(Clone, Debug)]
pub struct StateFields {
    pub t: f64,
    pub v: SpectralField,
    pub p: SpectralField,
    pub stress: SpectralField,
}

/// Everything fixed once a stage has been constructed.
pub struct Stage {
    pub prev: IterationState,
    pub q: usize,
    pub lam: usize,
    pub mu: usize,
    pub ell: f64,
    pub delta_next: f64,
    pub families: Arc<BeltramiFamily>,
    pub anchors: Vec<SliceAnchor>,
    pub slow_sizes: [usize; 3],
    pub slow_half: [usize; 3],
    pub flow_steps: usize,
    pub strict: bool,
}

enum Kind {
    Start(StartTriple),
    Step(Stage),
}

struct Cache<T> {
    entries: Mutex<Vec<(u64, Arc<T>)>>,
}

impl<T> Cache<T> {
    fn new() -> Self {
        Cache { entries: Mutex::new(Vec::new()) }
    }

    fn get_or(&self, t: f64, f: impl FnOnce() -> Result<T>) -> Result<Arc<T>> {
        let key = t.to_bits();
        if let Some((_, v)) = self.entries.lock().expect("cache lock").iter().find(|(k, _)| *k == key) {
            return Ok(v.clone());
        }
        let v = Arc::new(f()?);
        let mut e = self.entries.lock().expect("cache lock");
        if e.len() >= CACHE_LEN {
            e.remove(0);
        }
        e.push((key, v.clone()));
        Ok(v)
    }
}

struct Inner {
    kind: Kind,
    fields: Cache<StateFields>,
    velocity: Cache<SpectralField>,
}

/// A (v_q, p_q, stress_q) triple as a function of time. Cheap to clone.
#[derive(Clone)]
pub struct IterationState(Arc<Inner>);

impl std::fmt::Debug for IterationState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "IterationState(q = {}, n = {})", self.q(), self.grid().n())
    }
}

impl IterationState {
    fn wrap(kind: Kind) -> Self {
        IterationState(Arc::new(Inner { kind, fields: Cache::new(), velocity: Cache::new() }))
    }

    pub fn start(triple: StartTriple) -> Self {
        Self::wrap(Kind::Start(triple))
    }

    pub fn start_triple(&self) -> &StartTriple {
        match &self.0.kind {
            Kind::Start(s) => s,
            Kind::Step(st) => st.prev.start_triple(),
        }
    }

    pub fn stage(&self) -> Option<&Stage> {
        match &self.0.kind {
            Kind::Start(_) => None,
            Kind::Step(st) => Some(st),
        }
    }

    pub fn q(&self) -> usize {
        match &self.0.kind {
            Kind::Start(_) => 0,
            Kind::Step(st) => st.q,
        }
    }

    pub fn grid(&self) -> FourierGrid {
        self.start_triple().grid
    }

    pub fn alpha(&self) -> f64 {
        self.start_triple().alpha
    }

    pub fn profile(&self) -> &EnergyProfile {
        &self.start_triple().profile
    }

    /// delta_{q+1}: the energy gap this state is built to leave.
    pub fn delta_next(&self) -> f64 {
        match &self.0.kind {
            Kind::Start(s) => s.delta1,
            Kind::Step(st) => st.delta_next,
        }
    }

    pub fn previous(&self) -> Option<&IterationState> {
        self.stage().map(|s| &s.prev)
    }

    /// Axes along which the state varies.
    pub fn dependence(&self) -> [bool; 3] {
        match &self.0.kind {
            Kind::Start(_) => [false, false, true],
            Kind::Step(_) => [true; 3],
        }
    }

    /// The previous stage's velocity mollified, as a function of time.
    fn mollified_velocity(&self, ell: f64) -> impl Fn(f64) -> Result<SpectralField> + Sync + '_ {
        move |s| mollify(&self.velocity(s)?, ell)
    }

    pub fn velocity(&self, t: f64) -> Result<SpectralField> {
        let v = self.0.velocity.get_or(t, || match &self.0.kind {
            Kind::Start(s) => Ok(s.velocity(t)),
            Kind::Step(st) => st.prev.velocity(t)?.add(&self.perturbation(t, PerturbationOptions::default())?.w),
        })?;
        Ok((*v).clone())
    }

    /// Time derivative of the velocity: analytic at stage 0, by central differences of the
    /// perturbation afterwards.
    pub fn velocity_dt(&self, t: f64) -> Result<SpectralField> {
        match &self.0.kind {
            Kind::Start(s) => Ok(s.velocity_dt(t)),
            Kind::Step(st) => st.prev.velocity_dt(t)?.add(&self.perturbation_dt(t)?),
        }
    }

    /// d/dt of this stage's perturbation (the velocity itself at stage 0).
    pub fn perturbation_dt(&self, t: f64) -> Result<SpectralField> {
        match &self.0.kind {
            Kind::Start(s) => Ok(s.velocity_dt(t)),
            Kind::Step(_) => central_difference(t, |s| Ok(self.perturbation(s, PerturbationOptions::default())?.w)),
        }
    }

    /// The perturbation added at this stage, at time t.
    pub fn perturbation(&self, t: f64, opts: PerturbationOptions) -> Result<Perturbation> {
        let st = self.stage().ok_or_else(|| Error::ParameterDomain("stage 0 has no perturbation".into()))?;
        let vel = st.prev.mollified_velocity(st.ell);
        let setup = PerturbationSetup {
            grid: self.grid(),
            lam: st.lam,
            mu: st.mu,
            anchors: &st.anchors,
            families: &st.families,
            slow_sizes: st.slow_sizes,
            slow_half: st.slow_half,
            flow_steps: st.flow_steps,
            velocity: &vel as &VelocityFn,
        };
        let v_ell = if opts.transport_derivative { Some(vel(t)?) } else { None };
        setup.build(t, v_ell.as_ref(), opts)
    }

    /// Full assembly at t, including the individual stress pieces.
    pub fn assemble_at(&self, t: f64, double_sum: bool) -> Result<(Perturbation, Assembled)> {
        let st = self.stage().ok_or_else(|| Error::ParameterDomain("stage 0 is not assembled".into()))?;
        let prev = st.prev.fields(t)?;
        let v_ell = mollify(&prev.v, st.ell)?;
        let opts = PerturbationOptions { transport_derivative: true, transported: true, double_sum };
        let pert = self.perturbation(t, opts)?;
        let asm = assemble(
            PreviousFields { v: &prev.v, p: &prev.p, stress: &prev.stress, v_ell: &v_ell },
            &pert,
            st.ell,
            self.alpha(),
        )?;
        Ok((pert, asm))
    }

    pub fn fields(&self, t: f64) -> Result<Arc<StateFields>> {
        self.0.fields.get_or(t, || match &self.0.kind {
            Kind::Start(s) => Ok(StateFields { t, v: s.velocity(t), p: s.pressure(), stress: s.stress(t) }),
            Kind::Step(_) => {
                let (pert, asm) = self.assemble_at(t, false)?;
                let v = self.stage().expect("step").prev.velocity(t)?.add(&pert.w)?;
                Ok(StateFields { t, v, p: asm.pressure, stress: asm.stress })
            }
        })
    }
}

/// Knobs of one stage construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StageOptions {
    /// Characteristic steps are doubled this many times.
    pub refine: u32,
    pub strict: bool,
    /// Replace the scheduled frequency lambda_{q+1}.
    pub frequency: Option<usize>,
}

/// Build stage q+1 from stage q.
pub fn iterate_once(
    state: &IterationState,
    schedule: &ParameterSchedule,
    families: Arc<BeltramiFamily>,
    opts: StageOptions,
) -> Result<IterationState> {
    let StageOptions { refine, strict, frequency } = opts;
    let q = state.q();
    if q + 1 > schedule.q_max + 1 {
        return Err(Error::ParameterDomain(format!("schedule covers stages up to {}", schedule.q_max + 1)));
    }
    let lam = match frequency {
        Some(f) if f > 0 => f,
        Some(_) => return Err(Error::ParameterDomain("frequency override must be positive".into())),
        None => schedule.lambda_int(q + 1)?,
    };
    let mu = schedule.mu_int(q)?;
    if mu == 0 {
        return Err(Error::ParameterDomain("slice count must be positive".into()));
    }
    let ell = schedule.ell(q);
    let (slow_sizes, slow_half) = slow_layout(state.grid(), lam, state.dependence())?;
    let anchors = time_slices(state, mu, ell, schedule.delta(q + 2), &families, strict)?;
    let lip = anchors
        .iter()
        .map(|a| -> Result<f64> {
            let v = mollify(&state.velocity(a.time)?, ell)?;
            Ok(full_jacobian(&v)?.iter().map(wiener_bound).sum())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let flow_steps = base_steps(lip, CUTOFF_SUPPORT / mu as f64)
        .checked_mul(1usize << refine.min(20))
        .ok_or_else(|| Error::TransportStiffness("characteristic step count overflows".into()))?;
    Ok(IterationState::wrap(Kind::Step(Stage {
        prev: state.clone(),
        q: q + 1,
        lam,
        mu,
        ell,
        delta_next: schedule.delta(q + 2),
        families,
        anchors,
        slow_sizes,
        slow_half,
        flow_steps,
        strict,
    })))
}
