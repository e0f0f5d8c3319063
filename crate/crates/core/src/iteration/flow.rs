//! Backward characteristics of a time-dependent periodic velocity, with their Jacobian.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::ops::full_jacobian;
use crate::spectral::sample::{sample_offgrid, SampleMode};
use crate::spectral::SpectralField;

/// Largest number of RK4 steps accepted for one characteristic solve.
pub const MAX_FLOW_STEPS: usize = 1 << 20;

/// Velocity of the flow at a given time.
pub type VelocityFn<'a> = dyn Fn(f64) -> Result<SpectralField> + Sync + 'a;

/// Phi(x, t) and D Phi(x, t) at a set of points.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowMap {
    pub phi: Vec<[f64; 3]>,
    pub jac: Vec<[[f64; 3]; 3]>,
    pub steps: usize,
}

/// Steps for a solve over `span` of a field with Lipschitz bound `lip`, before refinement.
pub fn base_steps(lip: f64, span: f64) -> usize {
    ((lip * span / 0.5).ceil() as usize).max(1)
}

struct Stage {
    v: Vec<Vec<f64>>,
    dv: [Vec<Vec<f64>>; 3],
}

fn evaluate(vel: &VelocityFn, s: f64) -> Result<(SpectralField, [SpectralField; 3])> {
    let v = vel(s)?;
    let jac = full_jacobian(&v)?;
    Ok((v, jac))
}

fn sample_stage(fields: &(SpectralField, [SpectralField; 3]), pts: &[[f64; 3]]) -> Result<Stage> {
    let mode = SampleMode::default_for(&fields.0);
    Ok(Stage {
        v: sample_offgrid(&fields.0, pts, mode)?,
        dv: [
            sample_offgrid(&fields.1[0], pts, mode)?,
            sample_offgrid(&fields.1[1], pts, mode)?,
            sample_offgrid(&fields.1[2], pts, mode)?,
        ],
    })
}

type Deriv = ([f64; 3], [[f64; 3]; 3]);

fn rhs(st: &Stage, i: usize, j: &[[f64; 3]; 3]) -> Deriv {
    let v = [st.v[i][0], st.v[i][1], st.v[i][2]];
    // Dv[a][b] = d_b v_a
    let mut dj = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            let mut s = 0.0;
            for m in 0..3 {
                s += st.dv[m][i][a] * j[m][b];
            }
            dj[a][b] = s;
        }
    }
    (v, dj)
}

fn shifted(x: &[[f64; 3]], j: &[[[f64; 3]; 3]], d: &[Deriv], h: f64) -> (Vec<[f64; 3]>, Vec<[[f64; 3]; 3]>) {
    x.par_iter()
        .zip(j.par_iter())
        .zip(d.par_iter())
        .map(|((x, j), (dx, dj))| {
            let mut nj = *j;
            for a in 0..3 {
                for b in 0..3 {
                    nj[a][b] += h * dj[a][b];
                }
            }
            ([x[0] + h * dx[0], x[1] + h * dx[1], x[2] + h * dx[2]], nj)
        })
        .unzip()
}

/// Integrate dX/ds = v(X, s), X(t) = x back to s = anchor with `steps` RK4 steps;
/// Phi(x, t) = X(anchor) and D Phi solves the variational equation alongside.
pub fn solve_flow(vel: &VelocityFn, points: &[[f64; 3]], t: f64, anchor: f64, steps: usize) -> Result<FlowMap> {
    if steps == 0 || steps > MAX_FLOW_STEPS {
        return Err(Error::TransportStiffness(format!(
            "{steps} characteristic steps requested (limit {MAX_FLOW_STEPS})"
        )));
    }
    let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut x = points.to_vec();
    let mut j = vec![id; points.len()];
    if t == anchor {
        return Ok(FlowMap { phi: x, jac: j, steps });
    }
    let h = (anchor - t) / steps as f64;
    let mut start = evaluate(vel, t)?;
    for n in 0..steps {
        let s0 = t + n as f64 * h;
        let mid = evaluate(vel, s0 + 0.5 * h)?;
        let end = evaluate(vel, if n + 1 == steps { anchor } else { s0 + h })?;
        let st = sample_stage(&start, &x)?;
        let k1: Vec<Deriv> = (0..x.len()).into_par_iter().map(|i| rhs(&st, i, &j[i])).collect();
        let (x2, j2) = shifted(&x, &j, &k1, 0.5 * h);
        let st = sample_stage(&mid, &x2)?;
        let k2: Vec<Deriv> = (0..x.len()).into_par_iter().map(|i| rhs(&st, i, &j2[i])).collect();
        let (x3, j3) = shifted(&x, &j, &k2, 0.5 * h);
        let st = sample_stage(&mid, &x3)?;
        let k3: Vec<Deriv> = (0..x.len()).into_par_iter().map(|i| rhs(&st, i, &j3[i])).collect();
        let (x4, j4) = shifted(&x, &j, &k3, h);
        let st = sample_stage(&end, &x4)?;
        let k4: Vec<Deriv> = (0..x.len()).into_par_iter().map(|i| rhs(&st, i, &j4[i])).collect();
        x.par_iter_mut().zip(j.par_iter_mut()).enumerate().for_each(|(i, (xi, ji))| {
            for a in 0..3 {
                xi[a] += h / 6.0 * (k1[i].0[a] + 2.0 * k2[i].0[a] + 2.0 * k3[i].0[a] + k4[i].0[a]);
                for b in 0..3 {
                    ji[a][b] += h / 6.0 * (k1[i].1[a][b] + 2.0 * k2[i].1[a][b] + 2.0 * k3[i].1[a][b] + k4[i].1[a][b]);
                }
            }
        });
        start = end;
    }
    Ok(FlowMap { phi: x, jac: j, steps })
}
