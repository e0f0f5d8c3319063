use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Collocation grid on the torus [0, 2pi)^3 with a rational dealiasing fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FourierGrid {
    n: usize,
    num: u32,
    den: u32,
}

impl FourierGrid {
    /// Grid with the default 2/3 retained fraction.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_fraction(n, 2, 3)
    }

    pub fn with_fraction(n: usize, num: u32, den: u32) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::ParameterDomain(format!(
                "n_per_axis must be even and >= 4, got {n}"
            )));
        }
        if den == 0 || num == 0 || num > den {
            return Err(Error::ParameterDomain(format!(
                "dealias fraction must lie in (0,1], got {num}/{den}"
            )));
        }
        Ok(Self { n, num, den })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fraction(&self) -> (u32, u32) {
        (self.num, self.den)
    }

    pub fn fraction_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Largest retained |k_i|.
    pub fn retained_limit(&self) -> usize {
        (self.num as usize * self.n) / (2 * self.den as usize)
    }

    /// Side length 2L+1 of the retained cube.
    pub fn retained_side(&self) -> usize {
        2 * self.retained_limit() + 1
    }

    pub fn spacing(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.n as f64
    }

    pub fn volume() -> f64 {
        (2.0 * std::f64::consts::PI).powi(3)
    }
}

/// Tensor rank of a field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rank {
    Scalar,
    Vector,
    SymTensor,
}

/// Storage order of symmetric-tensor components.
pub const SYM_PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// Multiplicity of each stored component in the Frobenius norm.
pub const SYM_WEIGHTS: [f64; 6] = [1.0, 2.0, 2.0, 1.0, 2.0, 1.0];

pub const fn sym_index(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    match (a, b) {
        (0, 0) => 0,
        (0, 1) => 1,
        (0, 2) => 2,
        (1, 1) => 3,
        (1, 2) => 4,
        _ => 5,
    }
}

impl Rank {
    pub fn ncomp(&self) -> usize {
        match self {
            Rank::Scalar => 1,
            Rank::Vector => 3,
            Rank::SymTensor => 6,
        }
    }

    pub fn code(&self) -> u8 {
        match self {
            Rank::Scalar => 0,
            Rank::Vector => 1,
            Rank::SymTensor => 2,
        }
    }

    pub fn from_code(c: u8) -> Option<Rank> {
        match c {
            0 => Some(Rank::Scalar),
            1 => Some(Rank::Vector),
            2 => Some(Rank::SymTensor),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Rank::Scalar => "scalar",
            Rank::Vector => "vector3",
            Rank::SymTensor => "symtensor3",
        }
    }

    /// Weight of component `c` in the squared pointwise magnitude.
    pub fn weight(&self, c: usize) -> f64 {
        match self {
            Rank::SymTensor => SYM_WEIGHTS[c],
            _ => 1.0,
        }
    }
}

/// Smallest 2^a 3^b 5^c that is >= m (and >= 1).
pub fn fft_size(m: usize) -> usize {
    let m = m.max(1);
    let mut best = usize::MAX;
    let mut p2 = 1usize;
    while p2 < 2 * m {
        let mut p3 = p2;
        while p3 < 2 * m {
            let mut p5 = p3;
            while p5 < 2 * m {
                if p5 >= m && p5 < best {
                    best = p5;
                }
                p5 *= 5;
            }
            p3 *= 3;
        }
        p2 *= 2;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retained_limits() {
        assert_eq!(FourierGrid::new(256).unwrap().retained_limit(), 85);
        assert_eq!(FourierGrid::new(64).unwrap().retained_limit(), 21);
        assert_eq!(FourierGrid::with_fraction(8, 1, 1).unwrap().retained_limit(), 4);
        assert!(FourierGrid::new(5).is_err());
        assert!(FourierGrid::new(2).is_err());
        assert!(FourierGrid::with_fraction(8, 3, 2).is_err());
    }

    #[test]
    fn smooth_sizes() {
        assert_eq!(fft_size(0), 1);
        assert_eq!(fft_size(1), 1);
        assert_eq!(fft_size(7), 8);
        assert_eq!(fft_size(11), 12);
        assert_eq!(fft_size(109), 120);
        assert_eq!(fft_size(257), 270);
    }

    #[test]
    fn sym_layout() {
        for (c, &(i, j)) in SYM_PAIRS.iter().enumerate() {
            assert_eq!(sym_index(i, j), c);
            assert_eq!(sym_index(j, i), c);
        }
    }
}
