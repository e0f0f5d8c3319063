//! Browser bindings for three cheap operations of the laboratory.

use num_complex::Complex64;
use wasm_bindgen::prelude::*;

use cilab::blocks::{build_families, make_beltrami_wave, Parity};
use cilab::iteration::profile_family;
use cilab::spectral::FourierGrid;
use cilab::{Error, Result};

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Speed |W| of the Beltrami wave a B_k e^{i lam k.x} + c.c. on the plane x3 = 0,
/// as an n*n row-major array (x1 slowest).
pub fn slice(k: [i32; 3], lam: usize, a: Complex64, n: usize) -> Result<Vec<f64>> {
    let grid = FourierGrid::new(n)?;
    let w = make_beltrami_wave(grid, &[(k, a), ([-k[0], -k[1], -k[2]], a.conj())], lam)?;
    let p = w.to_physical([n, n, 1]);
    Ok((0..p.len()).map(|i| p.magnitude(i)).collect())
}

/// Samples of `count` profiles of the family on [0, 1]: row i holds t_i then one value per member.
pub fn curves(k: f64, count: usize, seed: u64, samples: usize) -> Result<Vec<f64>> {
    let fam = profile_family(k, count, seed)?;
    let m = samples.max(2);
    let mut out = Vec::with_capacity(m * (count + 1));
    for i in 0..m {
        let t = i as f64 / (m - 1) as f64;
        out.push(t);
        out.extend(fam.iter().map(|e| e.value(t)));
    }
    Ok(out)
}

/// Amplitudes gamma_k of a symmetric R = [r11, r22, r33, r12, r13, r23] on one family
/// (parity 0 or 1): twelve rows k1, k2, k3, gamma.
pub fn coefficients(r: &[f64], parity: u32) -> Result<Vec<f64>> {
    if r.len() != 6 {
        return Err(Error::ParameterDomain("expected six entries r11, r22, r33, r12, r13, r23".into()));
    }
    let m = [[r[0], r[3], r[4]], [r[3], r[1], r[5]], [r[4], r[5], r[2]]];
    let g = build_families().geometric_decompose(&m, Parity::of(parity as usize))?;
    Ok(g.iter().flat_map(|(k, c)| [k[0] as f64, k[1] as f64, k[2] as f64, *c]).collect())
}

#[wasm_bindgen]
pub fn beltrami_slice(k1: i32, k2: i32, k3: i32, lam: usize, re: f64, im: f64, n: usize) -> std::result::Result<Vec<f64>, JsError> {
    slice([k1, k2, k3], lam, Complex64::new(re, im), n).map_err(js)
}

#[wasm_bindgen]
pub fn profile_curves(k: f64, count: usize, seed: u64, samples: usize) -> std::result::Result<Vec<f64>, JsError> {
    curves(k, count, seed, samples).map_err(js)
}

#[wasm_bindgen]
pub fn geometric_coefficients(r: &[f64], parity: u32) -> std::result::Result<Vec<f64>, JsError> {
    coefficients(r, parity).map_err(js)
}

/// Radius of the ball around Id on which the decomposition is valid.
#[wasm_bindgen]
pub fn admissible_radius() -> f64 {
    build_families().r0
}
