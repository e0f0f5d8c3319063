//! The oscillatory perturbation w = w_o + w_c at one time.
//!
//! Each wave is a slowly varying complex amplitude times exp(i lam k.x). The amplitudes are
//! sampled on a coarse "slow" grid, transformed, and shifted by lam k in Fourier space. w is
//! the spectral curl of the shifted potential, so it is divergence free to round-off.

use num_complex::Complex64;
use rayon::prelude::*;

use super::flow::{solve_flow, VelocityFn};
use super::slices::{active_slices, slice_weight, slice_weight_dt, SliceAnchor};
use crate::blocks::beltrami::BeltramiDirection;
use crate::blocks::geometric::{coords_from_storage, frobenius_dist_to_identity, Parity};
use crate::blocks::BeltramiFamily;
use crate::error::{Error, Result};
use crate::spectral::field::{complex_spectrum, point_of, Physical};
use crate::spectral::ops::{differentiate, full_jacobian, DiffKind};
use crate::spectral::sample::{sample_offgrid, SampleMode};
use crate::spectral::{FourierGrid, Rank, SpectralField};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
type CVec = [Complex64; 3];

/// Coefficients below this fraction of the largest are dropped from w.
pub const TRIM: f64 = 1e-16;

/// Largest |k_i| over both families.
pub const MAX_COMPONENT: usize = 2;

/// Slow-grid points allowed per slice evaluation.
pub const MAX_SLOW_POINTS: usize = 1 << 21;

/// Fixed data for building perturbations of one stage.
pub struct PerturbationSetup<'a> {
    pub grid: FourierGrid,
    pub lam: usize,
    pub mu: usize,
    pub anchors: &'a [SliceAnchor],
    pub families: &'a BeltramiFamily,
    pub slow_sizes: [usize; 3],
    pub slow_half: [usize; 3],
    pub flow_steps: usize,
    /// Mollified velocity of the previous stage at any time.
    pub velocity: &'a VelocityFn<'a>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PerturbationOptions {
    /// Also build D_t w from the transport identities.
    pub transport_derivative: bool,
    /// Also return the transported stresses.
    pub transported: bool,
    /// Check the double-sum identity pointwise.
    pub double_sum: bool,
}

/// The stress transported along slice l, at the evaluation time.
#[derive(Clone, Debug)]
pub struct TransportedSlice {
    pub l: usize,
    pub weight: f64,
    pub rho: f64,
    pub stress: SpectralField,
    /// Largest sampled Frobenius magnitude, and the allowance from the anchor.
    pub sample_max: f64,
    pub allowed_max: f64,
    pub max_distance: f64,
}

#[derive(Clone, Debug)]
pub struct Perturbation {
    pub t: f64,
    pub w: SpectralField,
    pub w_o: SpectralField,
    pub w_c: SpectralField,
    pub transport_derivative: Option<SpectralField>,
    pub slices: Vec<TransportedSlice>,
    /// Sup of the double-sum identity defect, absolute and relative to sup |w_o|^2.
    pub double_sum: Option<(f64, f64)>,
}

/// Slow grid: n points on axes the inputs depend on, 1 elsewhere; box leaves room for the shift.
pub fn slow_layout(grid: FourierGrid, lam: usize, depends: [bool; 3]) -> Result<([usize; 3], [usize; 3])> {
    let l = grid.retained_limit();
    let shift = lam * MAX_COMPONENT;
    if grid.n() < 4 * shift {
        return Err(Error::Resolution(format!(
            "n = {} cannot carry frequency {lam} waves: need n >= {}",
            grid.n(),
            4 * shift
        )));
    }
    let sizes = depends.map(|d| if d { grid.n() } else { 1 });
    if l <= shift {
        return Err(Error::Resolution(format!("retained limit {l} leaves no room for frequency {lam} waves")));
    }
    let half = depends.map(|d| if d { l - shift } else { 0 });
    let pts: usize = sizes.iter().product();
    if pts > MAX_SLOW_POINTS {
        return Err(Error::Resolution(format!(
            "slow grid {sizes:?} has {pts} points, above the budget of {MAX_SLOW_POINTS}"
        )));
    }
    Ok((sizes, half))
}

fn cross_c(a: &CVec, b: &CVec) -> CVec {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Everything one slow point contributes for one slice.
struct PointData {
    potential: [CVec; 6],
    principal: [CVec; 6],
    wave: [CVec; 6],
    wave_dt: [CVec; 6],
    stress: [f64; 6],
    amp: [f64; 6],
    phase: [Complex64; 6],
    dist: f64,
}

struct SliceData {
    anchor_l: usize,
    weight: f64,
    weight_dt: f64,
    points: Vec<PointData>,
    directions: [BeltramiDirection; 6],
}

impl<'a> PerturbationSetup<'a> {
    fn slow_points(&self) -> Vec<[f64; 3]> {
        let n: usize = self.slow_sizes.iter().product();
        (0..n).map(|i| point_of(self.slow_sizes, i)).collect()
    }

    fn slice(&self, anchor: &SliceAnchor, t: f64, dv: Option<&[Vec<Vec<f64>>; 3]>, opts: PerturbationOptions) -> Result<SliceData> {
        let pts = self.slow_points();
        let flow = solve_flow(self.velocity, &pts, t, anchor.time, self.flow_steps)?;
        let mode = SampleMode::default_for(&anchor.stress);
        let s = sample_offgrid(&anchor.stress, &flow.phi, mode)?;
        let g = [
            sample_offgrid(&anchor.grad[0], &flow.phi, mode)?,
            sample_offgrid(&anchor.grad[1], &flow.phi, mode)?,
            sample_offgrid(&anchor.grad[2], &flow.phi, mode)?,
        ];
        let parity = Parity::of(anchor.l);
        let set = self.families.set(parity);
        let rho = anchor.rho;
        let sr = rho.sqrt();
        let lam = self.lam as f64;
        let r0 = self.families.r0;
        let points: Result<Vec<PointData>> = (0..pts.len())
            .into_par_iter()
            .map(|i| {
                let x = pts[i];
                let phi = flow.phi[i];
                let jac = flow.jac[i];
                let st = &s[i];
                let rel = [1.0 - st[0] / rho, -st[1] / rho, -st[2] / rho, 1.0 - st[3] / rho, -st[4] / rho, 1.0 - st[5] / rho];
                let xc = coords_from_storage(&rel);
                let dist = frobenius_dist_to_identity(&xc);
                let c = set.pair_coefficients(&xc);
                let (worst, cmin) = c.iter().enumerate().fold((0, f64::INFINITY), |b, (p, &v)| if v < b.1 { (p, v) } else { b });
                if cmin <= 0.0 || dist > r0 {
                    return Err(Error::AmplitudeDomain { k: set.pairs[worst], l: anchor.l, x, dist });
                }
                // d/dx_m of the transported stress
                let mut grad_c = [[0.0; 6]; 3];
                for m in 0..3 {
                    let mut ds = [0.0; 6];
                    for (comp, d) in ds.iter_mut().enumerate() {
                        *d = -(0..3).map(|j| g[j][i][comp] * jac[j][m]).sum::<f64>() / rho;
                    }
                    grad_c[m] = set.pair_coefficients(&coords_from_storage(&ds));
                }
                let mut out = PointData {
                    potential: [[Complex64::default(); 3]; 6],
                    principal: [[Complex64::default(); 3]; 6],
                    wave: [[Complex64::default(); 3]; 6],
                    wave_dt: [[Complex64::default(); 3]; 6],
                    stress: [st[0], st[1], st[2], st[3], st[4], st[5]],
                    amp: [0.0; 6],
                    phase: [Complex64::default(); 6],
                    dist,
                };
                for p in 0..6 {
                    let d = &set.directions[p];
                    let k = d.k.map(|v| v as f64);
                    let kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                    let gamma = c[p].sqrt();
                    let a = sr * gamma;
                    let grad_a = [0, 1, 2].map(|m| sr * grad_c[m][p] / (2.0 * gamma));
                    let disp = [phi[0] - x[0], phi[1] - x[1], phi[2] - x[2]];
                    let ph = Complex64::from_polar(1.0, lam * (k[0] * disp[0] + k[1] * disp[1] + k[2] * disp[2]));
                    let kc = k.map(|v| Complex64::new(v, 0.0));
                    let kxb = cross_c(&kc, &d.b).map(|z| z / kk);
                    out.amp[p] = a;
                    out.phase[p] = ph;
                    out.potential[p] = kxb.map(|z| I * a * ph * z / lam);
                    out.principal[p] = d.b.map(|z| a * ph * z);
                    if opts.transport_derivative {
                        let jtk = [0, 1, 2].map(|m| (0..3).map(|j| jac[j][m] * k[j]).sum::<f64>());
                        let v: CVec = [0, 1, 2].map(|m| I * grad_a[m] / lam - a * (jtk[m] - k[m]));
                        let lw = cross_c(&v, &kxb);
                        let wave: CVec = [0, 1, 2].map(|m| (a * d.b[m] + lw[m]) * ph);
                        let dv = dv.expect("velocity gradient supplied");
                        // (Dv)^T y with dv[m][i][a] = d_m v_a
                        let dvt = |y: [f64; 3]| [0, 1, 2].map(|m| (0..3).map(|q| dv[m][i][q] * y[q]).sum::<f64>());
                        let ga = dvt(grad_a);
                        let gk = dvt(jtk);
                        let u: CVec = [0, 1, 2].map(|m| -I * ga[m] / lam + a * gk[m]);
                        let dl = cross_c(&u, &kxb);
                        out.wave[p] = wave;
                        out.wave_dt[p] = dl.map(|z| z * ph);
                    }
                }
                Ok(out)
            })
            .collect();
        Ok(SliceData {
            anchor_l: anchor.l,
            weight: slice_weight(self.mu, anchor.l, t),
            weight_dt: slice_weight_dt(self.mu, anchor.l, t),
            points: points?,
            directions: set.directions,
        })
    }

    /// Add weight * (U e^{i shift.x} + conj) into a vector field for every component.
    fn add_shifted(&self, target: &mut SpectralField, comps: &[Vec<Complex64>; 3], shift: [i64; 3], weight: f64) {
        let h = self.slow_half.map(|x| x as i64);
        for c in 0..3 {
            let mut idx = 0;
            for m1 in -h[0]..=h[0] {
                for m2 in -h[1]..=h[1] {
                    for m3 in -h[2]..=h[2] {
                        let val = comps[c][idx] * weight;
                        idx += 1;
                        let k = [m1 + shift[0], m2 + shift[1], m3 + shift[2]];
                        if let Some(j) = target.index(k) {
                            target.comp_mut(c)[j] += val;
                        }
                        if let Some(j) = target.index([-k[0], -k[1], -k[2]]) {
                            target.comp_mut(c)[j] += val.conj();
                        }
                    }
                }
            }
        }
    }

    fn spectra(&self, sd: &SliceData, pick: impl Fn(&PointData) -> &[CVec; 6]) -> Vec<[Vec<Complex64>; 3]> {
        (0..6)
            .map(|p| {
                [0, 1, 2].map(|c| {
                    let data: Vec<Complex64> = sd.points.iter().map(|pd| pick(pd)[p][c]).collect();
                    complex_spectrum(&data, self.slow_sizes, self.slow_half)
                })
            })
            .collect()
    }

    /// Build the perturbation at time t. `v_ell` is the mollified velocity at t
    /// (needed only for the transport derivative).
    pub fn build(&self, t: f64, v_ell: Option<&SpectralField>, opts: PerturbationOptions) -> Result<Perturbation> {
        let l_max = self.grid.retained_limit();
        let shift = self.lam * MAX_COMPONENT;
        let half = self.slow_half.map(|h| (h + shift).min(l_max));
        let dv = match (opts.transport_derivative, v_ell) {
            (true, Some(v)) => {
                let jac = full_jacobian(v)?;
                Some(jac.map(|f| {
                    let ph = f.to_physical(self.slow_sizes);
                    let n: usize = self.slow_sizes.iter().product();
                    (0..n).map(|i| vec![ph.data[0][i], ph.data[1][i], ph.data[2][i]]).collect::<Vec<Vec<f64>>>()
                }))
            }
            (true, None) => return Err(Error::ParameterDomain("transport derivative needs the mollified velocity".into())),
            _ => None,
        };
        let active = active_slices(self.mu, t);
        let data: Vec<SliceData> = active
            .iter()
            .map(|&l| self.slice(&self.anchors[l], t, dv.as_ref(), opts))
            .collect::<Result<_>>()?;
        for a in &data {
            for b in &data {
                if a.anchor_l != b.anchor_l && Parity::of(a.anchor_l) == Parity::of(b.anchor_l) {
                    return Err(Error::Assembly(format!("overlapping slices {} and {} share a family", a.anchor_l, b.anchor_l)));
                }
            }
        }

        let mut psi = SpectralField::zeros(self.grid, Rank::Vector, half);
        let mut w_o = SpectralField::zeros(self.grid, Rank::Vector, half);
        let mut dtw = SpectralField::zeros(self.grid, Rank::Vector, half);
        let mut slices = Vec::new();
        for sd in &data {
            let pot = self.spectra(sd, |p| &p.potential);
            let pri = self.spectra(sd, |p| &p.principal);
            for p in 0..6 {
                let s = sd.directions[p].k.map(|v| v as i64 * self.lam as i64);
                self.add_shifted(&mut psi, &pot[p], s, sd.weight);
                self.add_shifted(&mut w_o, &pri[p], s, sd.weight);
            }
            if opts.transport_derivative {
                let wave = self.spectra(sd, |p| &p.wave);
                let wave_dt = self.spectra(sd, |p| &p.wave_dt);
                for p in 0..6 {
                    let s = sd.directions[p].k.map(|v| v as i64 * self.lam as i64);
                    self.add_shifted(&mut dtw, &wave[p], s, sd.weight_dt);
                    self.add_shifted(&mut dtw, &wave_dt[p], s, sd.weight);
                }
            }
            if opts.transported {
                let anchor = &self.anchors[sd.anchor_l];
                let mut phys = Physical::zeros(self.slow_sizes, Rank::SymTensor);
                let mut smax = 0.0f64;
                let mut dmax = 0.0f64;
                for (i, pd) in sd.points.iter().enumerate() {
                    for c in 0..6 {
                        phys.data[c][i] = pd.stress[c];
                    }
                    let m: f64 = (0..6).map(|c| Rank::SymTensor.weight(c) * pd.stress[c] * pd.stress[c]).sum();
                    smax = smax.max(m.sqrt());
                    dmax = dmax.max(pd.dist);
                }
                let stress = SpectralField::from_physical(self.grid, &phys, Some(self.slow_half))?.with_traceless(true);
                slices.push(TransportedSlice {
                    l: sd.anchor_l,
                    weight: sd.weight,
                    rho: anchor.rho,
                    stress,
                    sample_max: smax,
                    allowed_max: anchor.stress_sup + anchor.sup_tolerance,
                    max_distance: dmax,
                });
            }
        }
        let w = differentiate(&psi, DiffKind::Curl)?.trimmed(TRIM);
        let w_o = w_o.trimmed(TRIM);
        let w_c = w.sub(&w_o)?;
        let double_sum = if opts.double_sum { Some(self.double_sum(&data)) } else { None };
        Ok(Perturbation {
            t,
            w,
            w_o,
            w_c,
            transport_derivative: if opts.transport_derivative { Some(dtw.trimmed(TRIM)) } else { None },
            slices,
            double_sum,
        })
    }

    /// sup_x |w_o (x) w_o - sum_l chi_l^2 R_l - sum_{k' != -k} chi chi' w_kl (x) w_k'l'|.
    fn double_sum(&self, data: &[SliceData]) -> (f64, f64) {
        let pts = self.slow_points();
        let lam = self.lam as f64;
        // collapsed axes get a fixed offset so the fast phases are not all at the origin
        let offset = self.slow_sizes.map(|s| if s == 1 { 0.731 } else { 0.0 });
        let rho: Vec<f64> = data.iter().map(|sd| self.anchors[sd.anchor_l].rho).collect();
        let (worst, wmax) = (0..pts.len())
            .into_par_iter()
            .map(|i| {
                let x = [pts[i][0] + offset[0], pts[i][1] + offset[1], pts[i][2] + offset[2]];
                let mut waves: Vec<(usize, f64, [i32; 3], CVec)> = Vec::with_capacity(12 * data.len());
                for (s, sd) in data.iter().enumerate() {
                    let pd = &sd.points[i];
                    for p in 0..6 {
                        let d = &sd.directions[p];
                        let fast = Complex64::from_polar(1.0, lam * (d.k[0] as f64 * x[0] + d.k[1] as f64 * x[1] + d.k[2] as f64 * x[2]));
                        let wv = d.b.map(|b| pd.amp[p] * b * pd.phase[p] * fast);
                        waves.push((s, sd.weight, d.k, wv));
                        waves.push((s, sd.weight, [-d.k[0], -d.k[1], -d.k[2]], wv.map(|z| z.conj())));
                    }
                }
                let mut wo = [0.0; 3];
                for (_, chi, _, wv) in &waves {
                    for a in 0..3 {
                        wo[a] += chi * wv[a].re;
                    }
                }
                let mut t = [[0.0; 3]; 3];
                for a in 0..3 {
                    for b in 0..3 {
                        t[a][b] = wo[a] * wo[b];
                    }
                }
                for (s, sd) in data.iter().enumerate() {
                    let st = &sd.points[i].stress;
                    let m = [[st[0], st[1], st[2]], [st[1], st[3], st[4]], [st[2], st[4], st[5]]];
                    let c2 = sd.weight * sd.weight;
                    for a in 0..3 {
                        for b in 0..3 {
                            let r = if a == b { rho[s] } else { 0.0 } - m[a][b];
                            t[a][b] -= c2 * r;
                        }
                    }
                }
                for (sa, ca, ka, wa) in &waves {
                    for (sb, cb, kb, wb) in &waves {
                        if sa == sb && *kb == [-ka[0], -ka[1], -ka[2]] {
                            continue;
                        }
                        for a in 0..3 {
                            for b in 0..3 {
                                t[a][b] -= ca * cb * (wa[a] * wb[b]).re;
                            }
                        }
                    }
                }
                let defect = t.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
                (defect, wo.iter().map(|v| v * v).sum::<f64>())
            })
            .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
        (worst, worst / wmax.max(f64::MIN_POSITIVE))
    }
}
