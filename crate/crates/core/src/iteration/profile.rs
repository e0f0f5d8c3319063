//! Prescribed energy profiles e(t) on [0, 1].

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::smooth::{step, step_d1, step_d2, step_int1, step_int2};
use crate::error::{Error, Result};

/// Samples used for the cached C1 and C2 norms.
const NORM_SAMPLES: usize = 40_001;

/// Width of each smoothing ramp, as a fraction of its pulse.
const RAMP_FRACTION: f64 = 0.05;
/// e settles at 1/2 + FINAL_MARGIN before the member bump is subtracted.
const FINAL_MARGIN: f64 = 0.012;
/// Largest member bump.
const MAX_BUMP: f64 = 0.01;
/// Bump ramp length as a fraction of 1/(4K).
const BUMP_SPAN: f64 = 0.6;

/// Shared shape of a profile family: e'' is a smoothed two-pulse control.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyShape {
    pub k: f64,
    pub accel: f64,
    pub first_len: f64,
    pub second_start: f64,
    pub second_len: f64,
    pub bump_span: f64,
}

/// (a, b, ramp width) of one pulse.
type Pulse = (f64, f64, f64);

impl FamilyShape {
    fn pulses(&self) -> [Pulse; 2] {
        [
            (0.0, self.first_len, RAMP_FRACTION * self.first_len),
            (self.second_start, self.second_start + self.second_len, RAMP_FRACTION * self.second_len),
        ]
    }

    fn with_accel(k: f64, accel: f64) -> FamilyShape {
        let second_start = 1.0 / (4.0 * k);
        FamilyShape {
            k,
            accel,
            first_len: 2.0 / (accel * (1.0 - RAMP_FRACTION)),
            second_start,
            second_len: (2.0 * k - 2.0) / (accel * (1.0 - RAMP_FRACTION)),
            bump_span: BUMP_SPAN * second_start,
        }
    }

    fn base(&self, t: f64, order: usize) -> f64 {
        let mut acc = 0.0;
        for (a, b, w) in self.pulses() {
            let x0 = (t - a) / w;
            let x1 = (t - b + w) / w;
            acc += match order {
                0 => w * w * (step_int2(x0) - step_int2(x1)),
                1 => w * (step_int1(x0) - step_int1(x1)),
                _ => step(x0) - step(x1),
            };
        }
        let drift = match order {
            0 => 1.0 - 2.0 * self.k * t,
            1 => -2.0 * self.k,
            _ => 0.0,
        };
        drift + self.accel * acc
    }

    fn settled_value(&self) -> f64 {
        self.base(self.second_start + self.second_len, 0)
    }

    fn build(k: f64) -> Result<FamilyShape> {
        if !(k > 1.0) {
            return Err(Error::Construction(format!("family needs K > 1, got {k}")));
        }
        let target = 0.5 + FINAL_MARGIN;
        if FINAL_MARGIN >= 1.0 / (2.0 * k) {
            return Err(Error::Construction(format!(
                "K = {k} leaves no room above 1/2 for the settled value"
            )));
        }
        let mut lo = 2.0 * 4.0 * k / (1.0 - RAMP_FRACTION);
        let mut hi = 1e9;
        let f = |a: f64| FamilyShape::with_accel(k, a).settled_value() - target;
        if f(lo) > 0.0 || f(hi) < 0.0 {
            return Err(Error::Construction(format!("no control amplitude reaches e = {target} for K = {k}")));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let shape = FamilyShape::with_accel(k, hi);
        if shape.second_start + shape.second_len > 1.0 {
            return Err(Error::Construction("control does not settle inside [0, 1]".into()));
        }
        Ok(shape)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProfileKind {
    Constant { value: f64 },
    Cosine { mean: f64, amplitude: f64, frequency: f64 },
    Family { shape: Arc<FamilyShape>, member: usize, bump: f64 },
}

/// A smooth energy profile with cached C1 and C2 norms.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyProfile {
    kind: ProfileKind,
    c1: f64,
    c2: f64,
    range: (f64, f64),
}

impl EnergyProfile {
    pub fn new(kind: ProfileKind) -> Result<EnergyProfile> {
        match &kind {
            ProfileKind::Constant { value } if !(*value > 0.0) => {
                return Err(Error::ParameterDomain(format!("constant profile must be positive, got {value}")))
            }
            ProfileKind::Cosine { mean, amplitude, .. } if !(mean - amplitude.abs() > 0.0) => {
                return Err(Error::ParameterDomain("cosine profile must stay positive".into()))
            }
            _ => {}
        }
        let mut p = EnergyProfile { kind, c1: 0.0, c2: 0.0, range: (0.0, 0.0) };
        let (mut s0, mut s1, mut s2) = (0.0f64, 0.0f64, 0.0f64);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..NORM_SAMPLES {
            let t = i as f64 / (NORM_SAMPLES - 1) as f64;
            let e = p.value(t);
            lo = lo.min(e);
            hi = hi.max(e);
            s0 = s0.max(e.abs());
            s1 = s1.max(p.d1(t).abs());
            s2 = s2.max(p.d2(t).abs());
        }
        p.c1 = s0 + s1;
        p.c2 = s0 + s1 + s2;
        p.range = (lo, hi);
        Ok(p)
    }

    pub fn constant(value: f64) -> Result<EnergyProfile> {
        EnergyProfile::new(ProfileKind::Constant { value })
    }

    pub fn cosine(mean: f64, amplitude: f64, frequency: f64) -> Result<EnergyProfile> {
        EnergyProfile::new(ProfileKind::Cosine { mean, amplitude, frequency })
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn value(&self, t: f64) -> f64 {
        match &self.kind {
            ProfileKind::Constant { value } => *value,
            ProfileKind::Cosine { mean, amplitude, frequency } => {
                mean + amplitude * (std::f64::consts::TAU * frequency * t).cos()
            }
            ProfileKind::Family { shape, bump, .. } => shape.base(t, 0) - bump * step(t / shape.bump_span),
        }
    }

    pub fn d1(&self, t: f64) -> f64 {
        match &self.kind {
            ProfileKind::Constant { .. } => 0.0,
            ProfileKind::Cosine { amplitude, frequency, .. } => {
                let w = std::f64::consts::TAU * frequency;
                -amplitude * w * (w * t).sin()
            }
            ProfileKind::Family { shape, bump, .. } => {
                shape.base(t, 1) - bump * step_d1(t / shape.bump_span) / shape.bump_span
            }
        }
    }

    pub fn d2(&self, t: f64) -> f64 {
        match &self.kind {
            ProfileKind::Constant { .. } => 0.0,
            ProfileKind::Cosine { amplitude, frequency, .. } => {
                let w = std::f64::consts::TAU * frequency;
                -amplitude * w * w * (w * t).cos()
            }
            ProfileKind::Family { shape, bump, .. } => {
                shape.base(t, 2) - bump * step_d2(t / shape.bump_span) / (shape.bump_span * shape.bump_span)
            }
        }
    }

    /// sup|e| + sup|e'| on [0, 1].
    pub fn c1_norm(&self) -> f64 {
        self.c1
    }

    /// sup|e| + sup|e'| + sup|e''| on [0, 1].
    pub fn c2_norm(&self) -> f64 {
        self.c2
    }

    /// (min, max) of e over the norm samples.
    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    /// (e(0), e'(0)).
    pub fn initial_jet(&self) -> (f64, f64) {
        (self.value(0.0), self.d1(0.0))
    }

    pub fn id(&self) -> String {
        match &self.kind {
            ProfileKind::Constant { value } => format!("constant({value})"),
            ProfileKind::Cosine { mean, amplitude, frequency } => format!("cosine({mean},{amplitude},{frequency})"),
            ProfileKind::Family { shape, member, bump } => format!("family(K={},member={member},bump={bump:e})", shape.k),
        }
    }
}

/// `count` profiles sharing e(0) = 1 and e'(0) = -2K that differ for every t > 0.
/// Construction succeeds for K between 2 and about 41.
pub fn profile_family(k: f64, count: usize, seed: u64) -> Result<Vec<EnergyProfile>> {
    if count < 2 {
        return Err(Error::ParameterDomain(format!("a family needs at least 2 members, got {count}")));
    }
    let shape = Arc::new(FamilyShape::build(k)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|j| {
            let u: f64 = rng.random();
            let bump = MAX_BUMP * (j as f64 + 0.5 + 0.3 * (u - 0.5)) / count as f64;
            EnergyProfile::new(ProfileKind::Family { shape: shape.clone(), member: j, bump })
        })
        .collect()
}

/// Largest C1 and C2 norms over a family.
pub fn family_bounds(family: &[EnergyProfile]) -> (f64, f64) {
    family.iter().fold((0.0f64, 0.0f64), |(a, b), p| (a.max(p.c1_norm()), b.max(p.c2_norm())))
}
