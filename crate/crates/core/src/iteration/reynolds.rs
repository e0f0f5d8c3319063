//! The new stress and pressure after adding a perturbation.

use super::perturbation::Perturbation;
use crate::blocks::inverse_divergence;
use crate::error::{Error, Result};
use crate::spectral::ops::{advect, differentiate, dot, fractional_laplacian, mollify, outer, times_identity, DiffKind};
use crate::spectral::SpectralField;

/// Relative trace allowed in the assembled stress.
pub const TRACE_TOL: f64 = 1e-8;

/// Fields of the previous stage at one time.
pub struct PreviousFields<'a> {
    pub v: &'a SpectralField,
    pub p: &'a SpectralField,
    pub stress: &'a SpectralField,
    pub v_ell: &'a SpectralField,
}

/// Stress pieces, in the order transport, oscillation, correction, flow, mollification,
/// slicing, dissipation.
#[derive(Clone, Debug)]
pub struct Assembled {
    pub stress: SpectralField,
    pub pressure: SpectralField,
    pub parts: [SpectralField; 7],
    pub trace_defect: f64,
}

pub const PART_NAMES: [&str; 7] = ["transport", "oscillation", "correction", "flow", "mollification", "slicing", "dissipation"];

pub fn assemble(prev: PreviousFields, pert: &Perturbation, ell: f64, alpha: f64) -> Result<Assembled> {
    let w = &pert.w;
    let wo = &pert.w_o;
    let wc = &pert.w_c;
    let dtw = pert
        .transport_derivative
        .as_ref()
        .ok_or_else(|| Error::Assembly("transport derivative was not built".into()))?;
    let stress_ell = mollify(prev.stress, ell)?;
    let dv = prev.v.sub(prev.v_ell)?;

    let transport = inverse_divergence(&dtw.add(&advect(w, prev.v_ell)?)?)?;

    let wo_sq = dot(wo, wo)?;
    let mut flux = outer(wo, wo)?.sub(&times_identity(&wo_sq)?.scaled(0.5))?;
    let mut slicing = SpectralField::zeros(w.grid(), stress_ell.rank(), stress_ell.half());
    for s in &pert.slices {
        let c2 = s.weight * s.weight;
        flux = flux.axpy(c2, &s.stress)?;
        slicing = slicing.add(&stress_ell.sub(&s.stress)?.scaled(c2))?;
    }
    let oscillation = inverse_divergence(&differentiate(&flux, DiffKind::Div)?)?;

    let oc = dot(wo, wc)?;
    let cc = dot(wc, wc)?;
    let correction = outer(wo, wc)?
        .scaled(2.0)
        .add(&outer(wc, wc)?)?
        .sub(&times_identity(&cc.axpy(2.0, &oc)?)?.scaled(1.0 / 3.0))?;

    let dw = dot(&dv, w)?;
    let flow = outer(w, &dv)?.scaled(2.0).sub(&times_identity(&dw)?.scaled(2.0 / 3.0))?;

    let mollification = prev.stress.sub(&stress_ell)?;
    let dissipation = inverse_divergence(&fractional_laplacian(w, alpha)?)?;

    let parts = [transport, oscillation, correction, flow, mollification, slicing, dissipation];
    let mut stress = parts[0].clone();
    for p in &parts[1..] {
        stress = stress.add(p)?;
    }
    let scale = stress.max_abs();
    let trace_defect = if scale > 0.0 { stress.trace()?.max_abs() / scale } else { 0.0 };
    if trace_defect > TRACE_TOL {
        return Err(Error::Assembly(format!("assembled stress has relative trace {trace_defect:e}")));
    }
    let stress = stress.with_traceless(true);

    let mut pressure = prev
        .p
        .sub(&wo_sq.scaled(0.5))?
        .sub(&cc.scaled(1.0 / 3.0))?
        .sub(&oc.scaled(2.0 / 3.0))?
        .sub(&dw.scaled(2.0 / 3.0))?;
    pressure.remove_mean();
    Ok(Assembled { stress, pressure, parts, trace_defect })
}
