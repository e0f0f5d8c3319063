//! The C-infinity step S (0 below 0, 1 above 1), its integrals, and the time cutoff built from it.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use crate::quad::composite;

fn logistic(g: f64) -> f64 {
    1.0 / (1.0 + (-g).exp())
}

/// S(x) = f(x) / (f(x) + f(1-x)) with f(u) = exp(-1/u).
pub fn step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        logistic(1.0 / (1.0 - x) - 1.0 / x)
    }
}

pub fn step_d1(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let s = logistic(1.0 / (1.0 - x) - 1.0 / x);
    let g1 = 1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x));
    s * (1.0 - s) * g1
}

pub fn step_d2(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let s = logistic(1.0 / (1.0 - x) - 1.0 / x);
    let y = 1.0 - x;
    let g1 = 1.0 / (x * x) + 1.0 / (y * y);
    let g2 = -2.0 / (x * x * x) + 2.0 / (y * y * y);
    s * (1.0 - s) * ((1.0 - 2.0 * s) * g1 * g1 + g2)
}

fn rule() -> &'static Vec<(f64, f64)> {
    static R: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    R.get_or_init(|| composite(0.0, 1.0, 16, 16))
}

/// int_0^1 u S(u) du.
fn first_moment() -> f64 {
    static M: OnceLock<f64> = OnceLock::new();
    *M.get_or_init(|| rule().iter().map(|&(u, w)| w * u * step(u)).sum())
}

/// I1(x) = int_0^x S.
pub fn step_int1(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        0.5 + (x - 1.0)
    } else {
        rule().iter().map(|&(u, w)| w * x * step(u * x)).sum()
    }
}

/// I2(x) = int_0^x (x - u) S(u) du.
pub fn step_int2(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        0.5 * x - first_moment() + 0.5 * (x - 1.0) * (x - 1.0)
    } else {
        rule().iter().map(|&(u, w)| w * x * (x - u * x) * step(u * x)).sum()
    }
}

/// Half-width of the transition zones of the cutoff.
pub const CUTOFF_RAMP: f64 = 0.2;

fn angle(u: f64) -> (f64, f64) {
    let tau = CUTOFF_RAMP;
    let z = (u + tau) / (2.0 * tau);
    (FRAC_PI_2 * step(z), FRAC_PI_2 * step_d1(z) / (2.0 * tau))
}

/// Cutoff with sum_l cutoff(s - l)^2 = 1, equal to 1 on |s| <= 0.3 and 0 for |s| >= 0.7.
pub fn cutoff(s: f64) -> f64 {
    if s.abs() >= CUTOFF_SUPPORT {
        0.0
    } else if s.abs() <= 0.5 - CUTOFF_RAMP {
        1.0
    } else if s < 0.0 {
        angle(s + 0.5).0.sin()
    } else {
        angle(s - 0.5).0.cos()
    }
}

pub fn cutoff_d1(s: f64) -> f64 {
    if s.abs() >= CUTOFF_SUPPORT || s.abs() <= 0.5 - CUTOFF_RAMP {
        0.0
    } else if s < 0.0 {
        let (t, dt) = angle(s + 0.5);
        t.cos() * dt
    } else {
        let (t, dt) = angle(s - 0.5);
        -t.sin() * dt
    }
}

/// Support radius of the cutoff.
pub const CUTOFF_SUPPORT: f64 = 0.5 + CUTOFF_RAMP;
