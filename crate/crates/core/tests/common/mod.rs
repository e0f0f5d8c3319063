#![allow(dead_code)]

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cilab::blocks::{build_families, BeltramiFamily};
use cilab::iteration::{EnergyProfile, ParameterSchedule, ProfileBounds, ScheduleParams};
use cilab::spectral::{FourierGrid, Rank, SpectralField};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn grid(n: usize) -> FourierGrid {
    FourierGrid::new(n).unwrap()
}

pub fn desk_params() -> ScheduleParams {
    ScheduleParams { a: 2.0, b: 1.1, c: 2.6, alpha: 0.15, epsilon: 0.01 }
}

pub fn desk_profile() -> EnergyProfile {
    EnergyProfile::cosine(0.75, 0.2, 1.0).unwrap()
}

pub fn families() -> Arc<BeltramiFamily> {
    Arc::new(build_families())
}

pub fn desk_schedule(profile: &EnergyProfile, fam: &BeltramiFamily) -> ParameterSchedule {
    let bounds = ProfileBounds { c1: profile.c1_norm(), c2: profile.c2_norm(), family: false };
    ParameterSchedule::build(desk_params(), 3, bounds, false, fam).unwrap()
}

/// Scalar field from (k, coefficient) pairs; conjugates are filled in.
pub fn scalar(g: FourierGrid, modes: &[([i64; 3], Complex64)]) -> SpectralField {
    let m: Vec<_> = modes.iter().map(|(k, a)| (*k, vec![*a])).collect();
    SpectralField::from_modes(g, Rank::Scalar, &m).unwrap()
}

pub fn vector(g: FourierGrid, modes: &[([i64; 3], [Complex64; 3])]) -> SpectralField {
    let m: Vec<_> = modes.iter().map(|(k, a)| (*k, a.to_vec())).collect();
    SpectralField::from_modes(g, Rank::Vector, &m).unwrap()
}

/// Largest coefficient difference of two fields.
pub fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.sub(b).unwrap().max_abs()
}
