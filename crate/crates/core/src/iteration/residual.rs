//! How far a state is from solving the relaxed equation with its own stress.

use super::state::IterationState;
use crate::error::Result;
use crate::spectral::norms::{sup_norm, wiener_bound};
use crate::spectral::ops::{differentiate, fractional_laplacian, outer, DiffKind};
use crate::spectral::SpectralField;

#[derive(Clone, Debug)]
pub struct Residual {
    pub t: f64,
    pub field: SpectralField,
    pub sup: f64,
    pub bound: f64,
    /// sup of the velocity time derivative, for scale.
    pub scale: f64,
}

/// dt v + div(v (x) v) + grad p + (-Laplacian)^alpha v - div stress.
pub fn residual(state: &IterationState, t: f64) -> Result<Residual> {
    let f = state.fields(t)?;
    let dt = state.velocity_dt(t)?;
    let conv = differentiate(&outer(&f.v, &f.v)?, DiffKind::Div)?;
    let grad_p = differentiate(&f.p, DiffKind::Grad)?;
    let diss = fractional_laplacian(&f.v, state.alpha())?;
    let div_r = differentiate(&f.stress, DiffKind::Div)?;
    let r = dt.add(&conv)?.add(&grad_p)?.add(&diss)?.sub(&div_r)?;
    Ok(Residual { t, sup: sup_norm(&r), bound: wiener_bound(&r), scale: sup_norm(&dt), field: r })
}
