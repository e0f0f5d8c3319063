//! The explicit shear-flow triple at stage 0.

use num_complex::Complex64;

use super::profile::EnergyProfile;
use crate::error::{Error, Result};
use crate::spectral::{FourierGrid, Rank, SpectralField};

/// (2 pi)^{-3/2}.
fn norm_factor() -> f64 {
    (2.0 * std::f64::consts::PI).powf(-1.5)
}

/// v0 = A(t) (cos(f x3), sin(f x3), 0) with A = (2pi)^{-3/2} (e(t)(1 - delta_1))^{1/2}, p0 = 0,
/// and a stress whose divergence balances the time derivative and the dissipation.
#[derive(Clone, Debug)]
pub struct StartTriple {
    pub grid: FourierGrid,
    pub profile: EnergyProfile,
    pub frequency: usize,
    pub delta1: f64,
    pub alpha: f64,
}

impl StartTriple {
    pub fn new(grid: FourierGrid, profile: EnergyProfile, frequency: usize, delta1: f64, alpha: f64) -> Result<StartTriple> {
        if frequency == 0 {
            return Err(Error::ParameterDomain("start frequency must be >= 1".into()));
        }
        if frequency > grid.retained_limit() {
            return Err(Error::Resolution(format!(
                "start frequency {frequency} exceeds the retained limit {} of n = {}",
                grid.retained_limit(),
                grid.n()
            )));
        }
        if !(delta1 > 0.0 && delta1 < 1.0) {
            return Err(Error::ParameterDomain(format!("delta_1 must lie in (0, 1), got {delta1}")));
        }
        Ok(StartTriple { grid, profile, frequency, delta1, alpha })
    }

    pub fn amplitude(&self, t: f64) -> f64 {
        norm_factor() * (self.profile.value(t) * (1.0 - self.delta1)).sqrt()
    }

    pub fn amplitude_dt(&self, t: f64) -> f64 {
        let s = 1.0 - self.delta1;
        norm_factor() * s * self.profile.d1(t) / (2.0 * (self.profile.value(t) * s).sqrt())
    }

    fn shear(&self, amp: f64) -> SpectralField {
        let f = self.frequency as i64;
        let z = Complex64::default();
        SpectralField::from_modes(
            self.grid,
            Rank::Vector,
            &[([0, 0, f], vec![Complex64::new(0.5 * amp, 0.0), Complex64::new(0.0, -0.5 * amp), z])],
        )
        .expect("frequency checked")
    }

    pub fn velocity(&self, t: f64) -> SpectralField {
        self.shear(self.amplitude(t))
    }

    pub fn velocity_dt(&self, t: f64) -> SpectralField {
        self.shear(self.amplitude_dt(t))
    }

    pub fn pressure(&self) -> SpectralField {
        SpectralField::zeros(self.grid, Rank::Scalar, [0, 0, 0])
    }

    /// Transport part of the stress (vanishes for constant profiles).
    pub fn stress_transport(&self, t: f64) -> SpectralField {
        self.matrix_field(self.amplitude_dt(t) / self.frequency as f64)
    }

    /// Dissipative part of the stress.
    pub fn stress_dissipative(&self, t: f64) -> SpectralField {
        let f = self.frequency as f64;
        self.matrix_field(f.powf(-1.0 + 2.0 * self.alpha) * self.amplitude(t))
    }

    pub fn stress(&self, t: f64) -> SpectralField {
        let f = self.frequency as f64;
        let s = self.amplitude_dt(t) / f + f.powf(-1.0 + 2.0 * self.alpha) * self.amplitude(t);
        self.matrix_field(s)
    }

    /// s * S with S13 = sin(f x3), S23 = -cos(f x3).
    fn matrix_field(&self, s: f64) -> SpectralField {
        let f = self.frequency as i64;
        let z = Complex64::default();
        let vals = vec![z, z, Complex64::new(0.0, -0.5 * s), z, Complex64::new(-0.5 * s, 0.0), z];
        SpectralField::from_modes(self.grid, Rank::SymTensor, &[([0, 0, f], vals)])
            .expect("frequency checked")
            .with_traceless(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::norms::plancherel_l2;
    use crate::spectral::ops::{differentiate, DiffKind};

    #[test]
    fn energy_and_balance() {
        let g = FourierGrid::new(32).unwrap();
        let p = EnergyProfile::cosine(0.75, 0.2, 1.0).unwrap();
        let st = StartTriple::new(g, p.clone(), 5, 0.4665, 0.15).unwrap();
        for i in 0..10 {
            let t = i as f64 / 9.0;
            let v = st.velocity(t);
            let target = p.value(t) * (1.0 - 0.4665);
            assert!((plancherel_l2(&v) - target).abs() < 1e-14);
            let div_r = differentiate(&st.stress(t), DiffKind::Div).unwrap();
            let lhs = st.velocity_dt(t).add(&v.scaled(5f64.powf(0.3))).unwrap();
            assert!(div_r.sub(&lhs).unwrap().max_abs() < 1e-15);
        }
        assert!(matches!(StartTriple::new(g, p, 11, 0.5, 0.15), Err(Error::Resolution(_))));
    }
}
