//! Decomposition of symmetric matrices near the identity into positive combinations of
//! the projectors Id - khat (x) khat over two disjoint families of lattice directions.

use nalgebra::{Matrix6, Vector6};
use serde::{Deserialize, Serialize};

use super::beltrami::BeltramiDirection;
use crate::error::{Error, Result};

/// Which of the two families a time slice uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(l: usize) -> Parity {
        if l % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    fn slot(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// Representatives of the antipodal pairs on the shell |k|^2 = 5.
pub const EVEN_PAIRS: [[i32; 3]; 6] = [[1, 2, 0], [1, -2, 0], [0, 1, 2], [0, 1, -2], [2, 0, 1], [2, 0, -1]];
pub const ODD_PAIRS: [[i32; 3]; 6] = [[2, 1, 0], [2, -1, 0], [0, 2, 1], [0, 2, -1], [1, 0, 2], [1, 0, -2]];

/// Coordinates (11, 22, 33, 12, 13, 23) of a symmetric matrix.
pub fn sym_coords(r: &[[f64; 3]; 3]) -> [f64; 6] {
    [r[0][0], r[1][1], r[2][2], r[0][1], r[0][2], r[1][2]]
}

/// Frobenius weights of the coordinates above.
const COORD_WEIGHTS: [f64; 6] = [1.0, 1.0, 1.0, 2.0, 2.0, 2.0];

pub fn coords_to_matrix(x: &[f64; 6]) -> [[f64; 3]; 3] {
    [[x[0], x[3], x[4]], [x[3], x[1], x[5]], [x[4], x[5], x[2]]]
}

/// Coordinates from symmetric-tensor storage order (11, 12, 13, 22, 23, 33).
pub fn coords_from_storage(s: &[f64]) -> [f64; 6] {
    [s[0], s[3], s[5], s[1], s[2], s[4]]
}

pub fn frobenius_dist_to_identity(x: &[f64; 6]) -> f64 {
    let d = [x[0] - 1.0, x[1] - 1.0, x[2] - 1.0, x[3], x[4], x[5]];
    (0..6).map(|j| COORD_WEIGHTS[j] * d[j] * d[j]).sum::<f64>().sqrt()
}

/// One family: six antipodal pairs and the affine solver for their coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySet {
    pub pairs: [[i32; 3]; 6],
    pub directions: [BeltramiDirection; 6],
    pub matrix: Matrix6<f64>,
    pub inverse: Matrix6<f64>,
    /// Pair coefficients at R = Id.
    pub base: [f64; 6],
    pub condition: f64,
}

impl FamilySet {
    fn new(pairs: [[i32; 3]; 6]) -> FamilySet {
        let directions = pairs.map(|k| BeltramiDirection::new(k).expect("nonzero"));
        let mut matrix = Matrix6::zeros();
        for (p, d) in directions.iter().enumerate() {
            let x = sym_coords(&d.projector());
            for j in 0..6 {
                matrix[(j, p)] = x[j];
            }
        }
        let inverse = matrix.try_inverse().expect("projectors form a basis");
        let sv = matrix.singular_values();
        let condition = sv.max() / sv.min();
        let id = Vector6::new(1.0, 1.0, 1.0, 0.0, 0.0, 0.0);
        let b = inverse * id;
        FamilySet {
            pairs,
            directions,
            matrix,
            inverse,
            base: [b[0], b[1], b[2], b[3], b[4], b[5]],
            condition,
        }
    }

    /// Affine pair coefficients c with sum c_p (Id - khat_p (x) khat_p) = R.
    pub fn pair_coefficients(&self, x: &[f64; 6]) -> [f64; 6] {
        let c = self.inverse * Vector6::from_column_slice(x);
        [c[0], c[1], c[2], c[3], c[4], c[5]]
    }

    /// Sum c_p (Id - khat (x) khat) in coordinates.
    pub fn recompose(&self, c: &[f64; 6]) -> [f64; 6] {
        let r = self.matrix * Vector6::from_column_slice(c);
        [r[0], r[1], r[2], r[3], r[4], r[5]]
    }

    /// Distance from Id at which coefficient p first vanishes, for the worst direction.
    fn exact_radius(&self) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0);
        for p in 0..6 {
            let dual: f64 = (0..6).map(|j| self.inverse[(p, j)].powi(2) / COORD_WEIGHTS[j]).sum::<f64>().sqrt();
            let r = self.base[p] / dual;
            if r < best.0 {
                best = (r, p);
            }
        }
        best
    }

    /// Unit-Frobenius perturbation that drives coefficient p down fastest.
    pub fn adversarial_direction(&self, p: usize) -> [f64; 6] {
        let mut e = [0.0; 6];
        for j in 0..6 {
            e[j] = -self.inverse[(p, j)] / COORD_WEIGHTS[j];
        }
        let n: f64 = (0..6).map(|j| COORD_WEIGHTS[j] * e[j] * e[j]).sum::<f64>().sqrt();
        e.map(|x| x / n)
    }

    fn perturbation_radius(&self) -> f64 {
        (0..6)
            .map(|p| {
                let row: f64 = (0..6).map(|j| self.inverse[(p, j)].abs()).sum();
                self.base[p] / row
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// max over the ball |R - Id| <= r of sum over all 12 vectors of gamma_k.
    fn max_gamma_sum(&self, r: f64) -> f64 {
        let value = |x: &[f64; 6]| -> f64 {
            self.pair_coefficients(x).iter().map(|c| 2.0 * c.max(0.0).sqrt()).sum()
        };
        let mut e = [0.0f64; 6];
        let mut step = 0.25 * r;
        let point = |e: &[f64; 6]| [1.0 + e[0], 1.0 + e[1], 1.0 + e[2], e[3], e[4], e[5]];
        let mut best = value(&point(&e));
        for _ in 0..4000 {
            let c = self.pair_coefficients(&point(&e));
            let mut g = [0.0; 6];
            for j in 0..6 {
                for p in 0..6 {
                    g[j] += self.inverse[(p, j)] / c[p].sqrt();
                }
                g[j] /= COORD_WEIGHTS[j];
            }
            let gn: f64 = (0..6).map(|j| COORD_WEIGHTS[j] * g[j] * g[j]).sum::<f64>().sqrt();
            if gn == 0.0 {
                break;
            }
            let mut trial = [0.0; 6];
            for j in 0..6 {
                trial[j] = e[j] + step * g[j] / gn;
            }
            let tn: f64 = (0..6).map(|j| COORD_WEIGHTS[j] * trial[j] * trial[j]).sum::<f64>().sqrt();
            if tn > r {
                trial.iter_mut().for_each(|x| *x *= r / tn);
            }
            let v = value(&point(&trial));
            if v > best {
                best = v;
                e = trial;
            } else {
                step *= 0.5;
                if step < 1e-14 * r {
                    break;
                }
            }
        }
        best
    }
}

/// Both families together with the radius and constants derived from them.
#[derive(Clone, Debug, PartialEq)]
pub struct BeltramiFamily {
    pub lambda_bar_geom: f64,
    pub sets: [FamilySet; 2],
    pub r0: f64,
    pub exact_radius: f64,
    pub c_tilde: f64,
}

pub fn build_families() -> BeltramiFamily {
    let sets = [FamilySet::new(EVEN_PAIRS), FamilySet::new(ODD_PAIRS)];
    let r0 = 0.5 * sets.iter().map(|s| s.perturbation_radius()).fold(f64::INFINITY, f64::min);
    let exact_radius = sets.iter().map(|s| s.exact_radius().0).fold(f64::INFINITY, f64::min);
    let c_tilde = sets.iter().map(|s| s.max_gamma_sum(r0)).fold(0.0, f64::max);
    BeltramiFamily {
        lambda_bar_geom: 5f64.sqrt(),
        sets,
        r0,
        exact_radius,
        c_tilde,
    }
}

impl BeltramiFamily {
    pub fn set(&self, parity: Parity) -> &FamilySet {
        &self.sets[parity.slot()]
    }

    /// All 12 vectors of a family (pairs followed by their negatives).
    pub fn vectors(&self, parity: Parity) -> Vec<[i32; 3]> {
        let p = self.set(parity).pairs;
        p.iter().copied().chain(p.iter().map(|k| [-k[0], -k[1], -k[2]])).collect()
    }

    /// Number of vectors over both families.
    pub fn total_vectors(&self) -> usize {
        24
    }

    /// Pair amplitudes gamma_p = sqrt(c_p(R)); errors if R leaves the ball or positivity fails.
    pub fn pair_gammas(&self, x: &[f64; 6], parity: Parity) -> Result<[f64; 6]> {
        let dist = frobenius_dist_to_identity(x);
        let set = self.set(parity);
        let c = set.pair_coefficients(x);
        for (p, &cp) in c.iter().enumerate() {
            if cp <= 0.0 {
                return Err(Error::OutOfRange(format!(
                    "coefficient of direction {:?} is {cp:e} <= 0 at |R - Id| = {dist:e}",
                    set.pairs[p]
                )));
            }
        }
        if dist > self.r0 {
            return Err(Error::OutOfRange(format!("|R - Id| = {dist:e} exceeds r0 = {:e}", self.r0)));
        }
        Ok(c.map(f64::sqrt))
    }

    /// gamma_k for all 12 vectors of the family, with gamma_{-k} = gamma_k.
    pub fn geometric_decompose(&self, r: &[[f64; 3]; 3], parity: Parity) -> Result<Vec<([i32; 3], f64)>> {
        for i in 0..3 {
            for j in 0..i {
                if (r[i][j] - r[j][i]).abs() > 1e-12 * (1.0 + r[i][j].abs()) {
                    return Err(Error::Symmetry(format!("R[{i}][{j}] != R[{j}][{i}]")));
                }
            }
        }
        let g = self.pair_gammas(&sym_coords(r), parity)?;
        let set = self.set(parity);
        let mut out = Vec::with_capacity(12);
        for p in 0..6 {
            out.push((set.pairs[p], g[p]));
        }
        for p in 0..6 {
            let k = set.pairs[p];
            out.push(([-k[0], -k[1], -k[2]], g[p]));
        }
        Ok(out)
    }

    /// (1/2) sum_k gamma_k^2 (Id - khat (x) khat).
    pub fn recompose(&self, gammas: &[([i32; 3], f64)]) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for (k, g) in gammas {
            let p = BeltramiDirection::new(*k).expect("nonzero").projector();
            for i in 0..3 {
                for j in 0..3 {
                    m[i][j] += 0.5 * g * g * p[i][j];
                }
            }
        }
        m
    }

    /// Structured-text export of the families and solver matrices.
    pub fn to_fixture(&self) -> String {
        let fam = |s: &FamilySet| FixtureSet {
            pairs: s.pairs.to_vec(),
            matrix: (0..6).map(|i| (0..6).map(|j| s.matrix[(i, j)]).collect()).collect(),
            inverse: (0..6).map(|i| (0..6).map(|j| s.inverse[(i, j)]).collect()).collect(),
            base: s.base.to_vec(),
            condition: s.condition,
        };
        let f = Fixture {
            lambda_bar_geom: self.lambda_bar_geom,
            r0: self.r0,
            exact_radius: self.exact_radius,
            c_tilde: self.c_tilde,
            even: fam(&self.sets[0]),
            odd: fam(&self.sets[1]),
        };
        toml::to_string(&f).expect("serializable")
    }

    /// Parse a fixture and check it reproduces the built families bit for bit.
    pub fn matches_fixture(&self, text: &str) -> Result<bool> {
        let f: Fixture = toml::from_str(text).map_err(|e| Error::Format {
            offset: e.span().map(|s| s.start as u64).unwrap_or(0),
            msg: e.message().to_string(),
        })?;
        let same = |s: &FamilySet, x: &FixtureSet| {
            x.pairs == s.pairs.to_vec()
                && (0..6).all(|i| (0..6).all(|j| x.inverse[i][j].to_bits() == s.inverse[(i, j)].to_bits()))
                && (0..6).all(|i| (0..6).all(|j| x.matrix[i][j].to_bits() == s.matrix[(i, j)].to_bits()))
        };
        Ok(same(&self.sets[0], &f.even) && same(&self.sets[1], &f.odd) && f.r0.to_bits() == self.r0.to_bits())
    }
}

#[derive(Serialize, Deserialize)]
struct FixtureSet {
    pairs: Vec<[i32; 3]>,
    matrix: Vec<Vec<f64>>,
    inverse: Vec<Vec<f64>>,
    base: Vec<f64>,
    condition: f64,
}

#[derive(Serialize, Deserialize)]
struct Fixture {
    lambda_bar_geom: f64,
    r0: f64,
    exact_radius: f64,
    c_tilde: f64,
    even: FixtureSet,
    odd: FixtureSet,
}
