//! Frequency and amplitude schedule with every feasibility inequality evaluated.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::blocks::BeltramiFamily;
use crate::error::{Error, Result};

/// The user-chosen exponents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub alpha: f64,
    pub epsilon: f64,
}

impl ScheduleParams {
    /// Lower limit on c for this alpha.
    pub fn c_floor(&self) -> f64 {
        if self.alpha < 0.2 {
            2.5
        } else {
            f64::max(2.5, (3.0 - 2.0 * self.alpha) / (2.0 * (1.0 - 2.0 * self.alpha)))
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::ParameterDomain(m));
        if !(self.a > 1.0) {
            return bad(format!("a must exceed 1, got {}", self.a));
        }
        if !(self.b > 1.0) {
            return bad(format!("b must exceed 1, got {}", self.b));
        }
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return bad(format!("alpha must lie in (0, 1/2), got {}", self.alpha));
        }
        if !(self.c > self.c_floor()) {
            return bad(format!("c must exceed {} for alpha = {}, got {}", self.c_floor(), self.alpha, self.c));
        }
        if !(self.epsilon > 0.0) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        Ok(())
    }

    pub fn delta(&self, q: usize) -> f64 {
        self.a.powf(-self.b.powi(q as i32))
    }

    /// Smallest integer in [a^{c b^{q+1}}, 2 a^{c b^{q+1}}].
    pub fn lambda(&self, q: usize) -> f64 {
        self.a.powf(self.c * self.b.powi(q as i32 + 1)).ceil()
    }

    pub fn beta(&self) -> f64 {
        (self.b - 1.0) / (5.0 * self.b + 5.0)
    }
}

/// C1 and C2 sizes entering the start-frequency formula.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileBounds {
    pub c1: f64,
    pub c2: f64,
    /// Bounds come from a whole family rather than one profile.
    pub family: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Ge,
    Gt,
}

/// One inequality lhs (relation) rhs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub group: String,
    pub name: String,
    pub q: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub pass: bool,
    /// Asserted in strict mode; otherwise only reported.
    pub asserted: bool,
}

const REL_TOL: f64 = 1e-12;

fn holds(lhs: f64, rel: Relation, rhs: f64) -> bool {
    let slack = REL_TOL * lhs.abs().max(rhs.abs());
    match rel {
        Relation::Le => lhs <= rhs + slack,
        Relation::Ge => lhs + slack >= rhs,
        Relation::Gt => lhs > rhs,
    }
}

impl Condition {
    fn new(group: &str, name: &str, q: Option<usize>, lhs: f64, relation: Relation, rhs: f64, asserted: bool) -> Condition {
        Condition {
            group: group.into(),
            name: name.into(),
            q,
            lhs,
            rhs,
            relation,
            pass: holds(lhs, relation, rhs),
            asserted,
        }
    }

    pub fn label(&self) -> String {
        match self.q {
            Some(q) => format!("{}/{}[q={q}]", self.group, self.name),
            None => format!("{}/{}", self.group, self.name),
        }
    }
}

/// sum_j delta_j^power over all j, truncated once terms underflow.
fn tail_sum(p: &ScheduleParams, power: f64) -> f64 {
    let mut s = 0.0;
    for j in 0..400 {
        let t = p.delta(j).powf(power);
        s += t;
        if t < 1e-300 || (j > 10 && t < 1e-17 * s) {
            break;
        }
    }
    s
}

/// Growth and summability conditions whose smallest admissible a defines a0.
fn base_conditions(p: &ScheduleParams, q_top: usize) -> Vec<Condition> {
    let mut out = Vec::new();
    for q in 0..=q_top {
        out.push(Condition::new(
            "energy_halving",
            "delta_{q+2} <= delta_{q+1}/2",
            Some(q),
            p.delta(q + 2),
            Relation::Le,
            0.5 * p.delta(q + 1),
            false,
        ));
        let (dq, dq1, lq, lq1) = (p.delta(q), p.delta(q + 1), p.lambda(q), p.lambda(q + 1));
        out.push(Condition::new(
            "growth",
            "delta_q^{1/2} lambda_q^{1/5} <= delta_{q+1}^{1/2} lambda_{q+1}^{1/5}",
            Some(q),
            dq.sqrt() * lq.powf(0.2),
            Relation::Le,
            dq1.sqrt() * lq1.powf(0.2),
            true,
        ));
        out.push(Condition::new("growth", "delta_{q+1} <= delta_q", Some(q), dq1, Relation::Le, dq, true));
        out.push(Condition::new(
            "growth",
            "lambda_q <= lambda_{q+1}^{2/(b+1)}",
            Some(q),
            lq,
            Relation::Le,
            lq1.powf(2.0 / (p.b + 1.0)),
            true,
        ));
        let s1: f64 = (0..=q).map(|j| p.delta(j) * p.lambda(j)).sum();
        out.push(Condition::new(
            "summability",
            "sum delta_j lambda_j <= 2 delta_q lambda_q",
            Some(q),
            s1,
            Relation::Le,
            2.0 * dq * lq,
            false,
        ));
        let s2: f64 = (0..=q).map(|j| p.delta(j).sqrt() * p.lambda(j)).sum();
        out.push(Condition::new("summability", "1 <= sum delta_j^{1/2} lambda_j", Some(q), s2, Relation::Ge, 1.0, false));
        out.push(Condition::new(
            "summability",
            "sum delta_j^{1/2} lambda_j <= 2 delta_q^{1/2} lambda_q",
            Some(q),
            s2,
            Relation::Le,
            2.0 * dq.sqrt() * lq,
            false,
        ));
    }
    let half = tail_sum(p, 0.5);
    out.push(Condition::new("summability", "sum delta_j <= sum delta_j^{1/2}", None, tail_sum(p, 1.0), Relation::Le, half, false));
    out.push(Condition::new("summability", "sum delta_j^{1/2} <= 2", None, half, Relation::Le, 2.0, false));
    out
}

/// Smallest a on a 2^{j/16} scan meeting the growth and summability conditions; infinite if none below 2^256.
pub fn smallest_base(b: f64, c: f64, alpha: f64, q_top: usize) -> f64 {
    for j in 1..=16 * 256 {
        let a = 2f64.powf(j as f64 / 16.0);
        let p = ScheduleParams { a, b, c, alpha, epsilon: 1.0 };
        if base_conditions(&p, q_top).iter().all(|c| c.pass) {
            return a;
        }
    }
    f64::INFINITY
}

/// max{a^{b/(1-2alpha)}, a^b C1, C2 a^{-(c-1)b+1/2}}.
fn start_frequency_core(p: &ScheduleParams, bounds: &ProfileBounds) -> f64 {
    let t1 = p.a.powf(p.b / (1.0 - 2.0 * p.alpha));
    let t2 = p.a.powf(p.b) * bounds.c1;
    let t3 = bounds.c2 * p.a.powf(-(p.c - 1.0) * p.b + 0.5);
    t1.max(t2).max(t3)
}

/// The lower-bound inequalities on the start frequency.
fn start_lower(p: &ScheduleParams, bounds: &ProfileBounds, lb: f64) -> Vec<Condition> {
    let (d0, d1, l0) = (p.delta(0), p.delta(1), p.lambda(0));
    let g = 1.0 - 2.0 * p.alpha;
    let base = d1 * d0.sqrt() * l0;
    vec![
        Condition::new("start_frequency", "lambda_bar >= |e|_C1 / delta_1", None, lb, Relation::Ge, bounds.c1 / d1, false),
        Condition::new("start_frequency", "lambda_bar >= delta_1^{-1/(1-2alpha)}", None, lb, Relation::Ge, d1.powf(-1.0 / g), false),
        Condition::new(
            "start_frequency",
            "lambda_bar >= |e|_C2 / (delta_1 delta_0^{1/2} lambda_0)",
            None,
            lb,
            Relation::Ge,
            bounds.c2 / base,
            false,
        ),
        Condition::new(
            "start_frequency",
            "lambda_bar >= (|e|_C1 / (delta_1 delta_0^{1/2} lambda_0))^{1/(1-2alpha)}",
            None,
            lb,
            Relation::Ge,
            (bounds.c1 / base).powf(1.0 / g),
            false,
        ),
    ]
}

/// Per-stage quantities and the verdict of every inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterSchedule {
    pub params: ScheduleParams,
    pub q_max: usize,
    pub strict: bool,
    pub bounds: ProfileBounds,
    pub beta: f64,
    pub eta: f64,
    pub m_const: f64,
    pub c0: f64,
    pub a0: f64,
    pub lambda_bar: f64,
    /// delta_q and lambda_q for q <= q_max + 2.
    pub deltas: Vec<f64>,
    pub lambdas: Vec<f64>,
    /// mu_q and ell_q for q <= q_max + 1.
    pub mus: Vec<f64>,
    pub ells: Vec<f64>,
    pub conditions: Vec<Condition>,
    pub hash: String,
}

/// 12 (2 pi)^3: worst ratio delta_{q+1} min(e) / rho_l when delta_{q+2} <= delta_{q+1} / 2 and e >= 1/2.
pub fn rho_ratio_bound() -> f64 {
    12.0 * (2.0 * std::f64::consts::PI).powi(3)
}

impl ParameterSchedule {
    pub fn build(params: ScheduleParams, q_max: usize, bounds: ProfileBounds, strict: bool, families: &BeltramiFamily) -> Result<ParameterSchedule> {
        params.validate()?;
        if !(bounds.c1 > 0.0 && bounds.c2 >= bounds.c1) {
            return Err(Error::ParameterDomain(format!("profile bounds must satisfy 0 < C1 <= C2, got {} and {}", bounds.c1, bounds.c2)));
        }
        let p = &params;
        let deltas: Vec<f64> = (0..=q_max + 2).map(|q| p.delta(q)).collect();
        let lambdas: Vec<f64> = (0..=q_max + 2).map(|q| p.lambda(q)).collect();
        let mut mus = Vec::new();
        let mut ells = Vec::new();
        for q in 0..=q_max + 1 {
            let (dq, dq1, lq, lq1) = (deltas[q], deltas[q + 1], lambdas[q], lambdas[q + 1]);
            mus.push((dq1.powf(0.25) * dq.powf(0.25) * lq.sqrt() * lq1.sqrt()).ceil().max(1.0));
            ells.push(dq1.powf(-0.125) * dq.powf(0.125) * lq.powf(-0.25) * lq1.powf(-0.75));
        }
        let beta = p.beta();
        let eta = families.r0 / (8.0 * rho_ratio_bound());
        let m_const = 4.0 * families.c_tilde * families.total_vectors() as f64;

        let core = start_frequency_core(p, &bounds);
        let mut c0 = 1.0;
        let lambda_bar = loop {
            let lb = (c0 * core).ceil();
            if start_lower(p, &bounds, lb).iter().all(|c| c.pass) || c0 > 2f64.powi(60) {
                break lb;
            }
            c0 *= 2.0;
        };
        let a0 = smallest_base(p.b, p.c, p.alpha, q_max + 1);

        let mut conditions = Vec::new();
        let e1 = p.a.powf((p.c - 1.0) * p.b - 0.5);
        let e2 = p.a.powf((2.0 * p.c - 1.0) * p.b - 1.0);
        let ranges = "parameter_ranges";
        conditions.push(Condition::new(ranges, "b > 1", None, p.b, Relation::Gt, 1.0, true));
        conditions.push(Condition::new(ranges, "c > c_floor(alpha)", None, p.c, Relation::Gt, p.c_floor(), true));
        conditions.push(Condition::new(ranges, "a^{(c-1)b-1/2} >= C0 |e|_C1", None, e1, Relation::Ge, c0 * bounds.c1, true));
        conditions.push(Condition::new(ranges, "a^{(2c-1)b-1} >= C0 |e|_C2", None, e2, Relation::Ge, c0 * bounds.c2, true));
        let size = "base_size";
        let pw = 1.0 / ((2.0 * p.c - 1.0) * p.b - 1.0);
        conditions.push(Condition::new(size, "a >= a0(b, c)", None, p.a, Relation::Ge, a0, true));
        conditions.push(Condition::new(size, "a >= C0 |e|_C1", None, p.a, Relation::Ge, c0 * bounds.c1, true));
        conditions.push(Condition::new(size, "a >= C0 |e|_C2^{1/((2c-1)b-1)}", None, p.a, Relation::Ge, c0 * bounds.c2.powf(pw), true));

        let fr = "frequency_ratios";
        for q in 0..=q_max {
            let (dq, dq1, lq, lq1, mu, ell) = (deltas[q], deltas[q + 1], lambdas[q], lambdas[q + 1], mus[q], ells[q]);
            conditions.push(Condition::new(
                fr,
                "delta_q^{1/2} lambda_q ell / delta_{q+1}^{1/2} <= 1",
                Some(q),
                dq.sqrt() * lq * ell / dq1.sqrt(),
                Relation::Le,
                1.0,
                true,
            ));
            conditions.push(Condition::new(
                fr,
                "delta_q^{1/2} lambda_q / mu + 1/(ell lambda_{q+1}) <= lambda_{q+1}^{-beta}",
                Some(q),
                dq.sqrt() * lq / mu + 1.0 / (ell * lq1),
                Relation::Le,
                lq1.powf(-beta),
                true,
            ));
            conditions.push(Condition::new(
                fr,
                "1/lambda_{q+1} <= delta_{q+1}^{1/2} / mu",
                Some(q),
                1.0 / lq1,
                Relation::Le,
                dq1.sqrt() / mu,
                true,
            ));
        }
        conditions.extend(base_conditions(p, q_max + 1));

        conditions.extend(start_lower(p, &bounds, lambda_bar));
        let (d0, d1, l0) = (deltas[0], deltas[1], lambdas[0]);
        let sf = "start_frequency";
        conditions.push(Condition::new(sf, "delta_1 lambda_0 >= C0 |e|_C1", None, d1 * l0, Relation::Ge, c0 * bounds.c1, false));
        conditions.push(Condition::new(
            sf,
            "delta_1 lambda_0 >= C0 lambda_bar^{2alpha}",
            None,
            d1 * l0,
            Relation::Ge,
            c0 * lambda_bar.powf(2.0 * p.alpha),
            false,
        ));
        conditions.push(Condition::new(sf, "lambda_bar <= delta_0^{1/2} lambda_0", None, lambda_bar, Relation::Le, d0.sqrt() * l0, false));
        let upper = [
            p.a.powf(p.b / (1.0 - 2.0 * p.alpha)),
            p.a.powf(p.b) * bounds.c1,
            bounds.c2.powf((p.c * p.b - 0.5) * pw),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        conditions.push(Condition::new(
            sf,
            "lambda_bar <= C0 max{a^{b/(1-2alpha)}, a^b |e|_C1, |e|_C2^{(cb-1/2)/((2c-1)b-1)}}",
            None,
            lambda_bar,
            Relation::Le,
            (c0 * upper).ceil(),
            false,
        ));

        let mut s = ParameterSchedule {
            params,
            q_max,
            strict,
            bounds,
            beta,
            eta,
            m_const,
            c0,
            a0,
            lambda_bar,
            deltas,
            lambdas,
            mus,
            ells,
            conditions,
            hash: String::new(),
        };
        s.hash = s.compute_hash();
        if strict {
            let failed: Vec<String> = s.asserted_failures().iter().map(|c| c.label()).collect();
            if !failed.is_empty() {
                return Err(Error::ScheduleInfeasible(failed));
            }
        }
        Ok(s)
    }

    fn compute_hash(&self) -> String {
        let p = &self.params;
        let text = format!(
            "a={:?};b={:?};c={:?};alpha={:?};epsilon={:?};q_max={};strict={};c1={:?};c2={:?};family={};c0={:?};lambda_bar={:?}",
            p.a, p.b, p.c, p.alpha, p.epsilon, self.q_max, self.strict, self.bounds.c1, self.bounds.c2, self.bounds.family, self.c0, self.lambda_bar
        );
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn delta(&self, q: usize) -> f64 {
        self.deltas[q]
    }

    pub fn lambda(&self, q: usize) -> f64 {
        self.lambdas[q]
    }

    pub fn mu(&self, q: usize) -> f64 {
        self.mus[q]
    }

    pub fn ell(&self, q: usize) -> f64 {
        self.ells[q]
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    /// Start frequency as an integer, if it fits.
    pub fn lambda_bar_int(&self) -> Result<usize> {
        to_int(self.lambda_bar, "start frequency")
    }

    /// lambda_q as an integer, if it fits.
    pub fn lambda_int(&self, q: usize) -> Result<usize> {
        to_int(self.lambdas[q], "frequency")
    }

    pub fn mu_int(&self, q: usize) -> Result<usize> {
        to_int(self.mus[q], "slice count")
    }

    pub fn asserted_failures(&self) -> Vec<&Condition> {
        self.conditions.iter().filter(|c| c.asserted && !c.pass).collect()
    }

    pub fn failures(&self) -> Vec<&Condition> {
        self.conditions.iter().filter(|c| !c.pass).collect()
    }

    /// The base a required by a family of profiles with the given bounds.
    pub fn family_base(&self, e1: f64, e2: f64) -> f64 {
        let p = &self.params;
        let pw = 1.0 / ((2.0 * p.c - 1.0) * p.b - 1.0);
        self.a0.max(self.c0 * e1).max(self.c0 * e2.powf(pw))
    }
}

fn to_int(x: f64, what: &str) -> Result<usize> {
    if x.is_finite() && x >= 0.0 && x < 2f64.powi(40) {
        Ok(x as usize)
    } else {
        Err(Error::Resolution(format!("{what} {x:e} is not representable on any grid")))
    }
}

/// Start frequency shared by every member of a family with sup norms (E1, E2).
pub fn family_mode_lambda_bar(e1: f64, e2: f64, schedule: &ParameterSchedule) -> f64 {
    let bounds = ProfileBounds { c1: e1, c2: e2, family: true };
    (schedule.c0 * start_frequency_core(&schedule.params, &bounds)).ceil()
}
