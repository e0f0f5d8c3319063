use num_complex::Complex64;

use super::fft::fft3;
use super::grid::{FourierGrid, Rank};
use crate::error::{Error, Result};

/// Fourier coefficients of a real field, stored on a box |k_i| <= half_i inside the retained cube.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: FourierGrid,
    rank: Rank,
    traceless: bool,
    half: [usize; 3],
    comps: Vec<Vec<Complex64>>,
}

/// Point values of a field on a uniform grid with per-axis sizes.
#[derive(Clone, Debug, PartialEq)]
pub struct Physical {
    pub sizes: [usize; 3],
    pub rank: Rank,
    pub data: Vec<Vec<f64>>,
}

impl Physical {
    pub fn zeros(sizes: [usize; 3], rank: Rank) -> Self {
        let n = sizes.iter().product();
        Self {
            sizes,
            rank,
            data: vec![vec![0.0; n]; rank.ncomp()],
        }
    }

    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        point_of(self.sizes, idx)
    }

    /// Euclidean (vector) or Frobenius (tensor) magnitude at a grid index.
    pub fn magnitude(&self, idx: usize) -> f64 {
        let mut s = 0.0;
        for (c, d) in self.data.iter().enumerate() {
            s += self.rank.weight(c) * d[idx] * d[idx];
        }
        s.sqrt()
    }

    pub fn max_magnitude(&self) -> f64 {
        (0..self.len()).map(|i| self.magnitude(i)).fold(0.0, f64::max)
    }
}

/// Coordinates of grid index `idx` for the given per-axis sizes.
pub fn point_of(sizes: [usize; 3], idx: usize) -> [f64; 3] {
    let i3 = idx % sizes[2];
    let i2 = (idx / sizes[2]) % sizes[1];
    let i1 = idx / (sizes[1] * sizes[2]);
    let tp = 2.0 * std::f64::consts::PI;
    [
        tp * i1 as f64 / sizes[0] as f64,
        tp * i2 as f64 / sizes[1] as f64,
        tp * i3 as f64 / sizes[2] as f64,
    ]
}

fn box_dims(half: [usize; 3]) -> [usize; 3] {
    [2 * half[0] + 1, 2 * half[1] + 1, 2 * half[2] + 1]
}

fn wrap(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

impl SpectralField {
    pub fn zeros(grid: FourierGrid, rank: Rank, half: [usize; 3]) -> Self {
        let l = grid.retained_limit();
        let half = half.map(|h| h.min(l));
        let len = box_dims(half).iter().product();
        Self {
            grid,
            rank,
            traceless: false,
            half,
            comps: vec![vec![Complex64::default(); len]; rank.ncomp()],
        }
    }

    /// Build from a list of (k, per-component value); the conjugate mode is filled in.
    pub fn from_modes(grid: FourierGrid, rank: Rank, modes: &[([i64; 3], Vec<Complex64>)]) -> Result<Self> {
        let l = grid.retained_limit() as i64;
        let mut half = [0usize; 3];
        for (k, vals) in modes {
            if vals.len() != rank.ncomp() {
                return Err(Error::Rank {
                    expected: format!("{} components", rank.ncomp()),
                    got: format!("{} components", vals.len()),
                });
            }
            for i in 0..3 {
                if k[i].abs() > l {
                    return Err(Error::Resolution(format!("mode {k:?} outside retained limit {l}")));
                }
                half[i] = half[i].max(k[i].unsigned_abs() as usize);
            }
        }
        let mut f = Self::zeros(grid, rank, half);
        for (k, vals) in modes {
            for (c, v) in vals.iter().enumerate() {
                f.add_pair(*k, c, *v);
            }
        }
        Ok(f)
    }

    pub fn grid(&self) -> FourierGrid {
        self.grid
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    pub fn half(&self) -> [usize; 3] {
        self.half
    }

    pub fn dims(&self) -> [usize; 3] {
        box_dims(self.half)
    }

    pub fn box_len(&self) -> usize {
        self.dims().iter().product()
    }

    pub fn is_traceless(&self) -> bool {
        self.traceless
    }

    pub fn with_traceless(mut self, flag: bool) -> Self {
        self.traceless = flag && self.rank == Rank::SymTensor;
        self
    }

    pub fn comps(&self) -> &[Vec<Complex64>] {
        &self.comps
    }

    pub fn comp(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.comps[c]
    }

    pub fn index(&self, k: [i64; 3]) -> Option<usize> {
        let d = self.dims();
        let mut idx = 0usize;
        for i in 0..3 {
            let h = self.half[i] as i64;
            if k[i].abs() > h {
                return None;
            }
            idx = idx * d[i] + (k[i] + h) as usize;
        }
        Some(idx)
    }

    /// Wave vector of a box index.
    pub fn wavevector(&self, idx: usize) -> [i64; 3] {
        let d = self.dims();
        let i3 = idx % d[2];
        let i2 = (idx / d[2]) % d[1];
        let i1 = idx / (d[1] * d[2]);
        [
            i1 as i64 - self.half[0] as i64,
            i2 as i64 - self.half[1] as i64,
            i3 as i64 - self.half[2] as i64,
        ]
    }

    pub fn coeff(&self, k: [i64; 3], c: usize) -> Complex64 {
        self.index(k).map(|i| self.comps[c][i]).unwrap_or_default()
    }

    /// Add `v` at k and conj(v) at -k (real part only at k = 0).
    pub fn add_pair(&mut self, k: [i64; 3], c: usize, v: Complex64) {
        if k == [0, 0, 0] {
            if let Some(i) = self.index(k) {
                self.comps[c][i] += Complex64::new(v.re, 0.0);
            }
            return;
        }
        if let Some(i) = self.index(k) {
            self.comps[c][i] += v;
        }
        if let Some(i) = self.index([-k[0], -k[1], -k[2]]) {
            self.comps[c][i] += v.conj();
        }
    }

    pub fn for_each_mode(&self, mut f: impl FnMut([i64; 3], usize)) {
        let d = self.dims();
        let h = self.half.map(|x| x as i64);
        let mut idx = 0;
        for i1 in 0..d[0] {
            for i2 in 0..d[1] {
                for i3 in 0..d[2] {
                    f([i1 as i64 - h[0], i2 as i64 - h[1], i3 as i64 - h[2]], idx);
                    idx += 1;
                }
            }
        }
    }

    /// Apply `f(k, values)` to every mode, with all components gathered.
    pub fn map_modes(&mut self, mut f: impl FnMut([i64; 3], &mut [Complex64])) {
        let nc = self.rank.ncomp();
        let mut buf = vec![Complex64::default(); nc];
        let d = self.dims();
        let h = self.half.map(|x| x as i64);
        let mut idx = 0;
        for i1 in 0..d[0] {
            for i2 in 0..d[1] {
                for i3 in 0..d[2] {
                    for c in 0..nc {
                        buf[c] = self.comps[c][idx];
                    }
                    f([i1 as i64 - h[0], i2 as i64 - h[1], i3 as i64 - h[2]], &mut buf);
                    for c in 0..nc {
                        self.comps[c][idx] = buf[c];
                    }
                    idx += 1;
                }
            }
        }
    }

    /// New field of another rank whose coefficients are a per-mode linear map of this one.
    pub fn map_to(&self, rank: Rank, mut f: impl FnMut([i64; 3], &[Complex64], &mut [Complex64])) -> SpectralField {
        let mut out = SpectralField::zeros(self.grid, rank, self.half);
        let nin = self.rank.ncomp();
        let nout = rank.ncomp();
        let mut a = vec![Complex64::default(); nin];
        let mut b = vec![Complex64::default(); nout];
        self.for_each_mode(|k, idx| {
            for c in 0..nin {
                a[c] = self.comps[c][idx];
            }
            b.iter_mut().for_each(|x| *x = Complex64::default());
            f(k, &a, &mut b);
            for c in 0..nout {
                out.comps[c][idx] = b[c];
            }
        });
        out
    }

    /// Copy into a box of different half-widths (truncating or zero-padding).
    pub fn resized(&self, half: [usize; 3]) -> SpectralField {
        let mut out = SpectralField::zeros(self.grid, self.rank, half);
        out.traceless = self.traceless;
        let h = out.half;
        let lo = [0, 1, 2].map(|i| h[i].min(self.half[i]) as i64);
        for k1 in -lo[0]..=lo[0] {
            for k2 in -lo[1]..=lo[1] {
                for k3 in -lo[2]..=lo[2] {
                    let k = [k1, k2, k3];
                    let (Some(i), Some(j)) = (self.index(k), out.index(k)) else { continue };
                    for c in 0..self.rank.ncomp() {
                        out.comps[c][j] = self.comps[c][i];
                    }
                }
            }
        }
        out
    }

    /// Same coefficients on another grid (the box is clipped to its retained limit).
    pub fn regrid(&self, grid: FourierGrid) -> SpectralField {
        let mut f = self.clone();
        f.grid = grid;
        let l = grid.retained_limit();
        if self.half.iter().any(|&h| h > l) {
            let mut g = f.resized(self.half.map(|h| h.min(l)));
            g.grid = grid;
            return g;
        }
        f
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest |c(k) - conj(c(-k))| relative to the largest coefficient.
    pub fn reality_defect(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        self.for_each_mode(|k, idx| {
            let j = self.index([-k[0], -k[1], -k[2]]).unwrap();
            for c in &self.comps {
                worst = worst.max((c[idx] - c[j].conj()).norm());
            }
        });
        worst / m
    }

    /// Project onto exactly conjugate-symmetric coefficients.
    pub fn enforce_reality(&mut self) {
        let len = self.box_len();
        // the box is centered, so -k has index len-1-idx
        for c in self.comps.iter_mut() {
            for idx in 0..len / 2 + 1 {
                let j = len - 1 - idx;
                let avg = (c[idx] + c[j].conj()) * 0.5;
                c[idx] = avg;
                c[j] = avg.conj();
            }
        }
    }

    /// Shrink the box to the coefficients above `rel * max`.
    pub fn trimmed(&self, rel: f64) -> SpectralField {
        let m = self.max_abs();
        if m == 0.0 {
            let mut z = SpectralField::zeros(self.grid, self.rank, [0, 0, 0]);
            z.traceless = self.traceless;
            return z;
        }
        let thr = rel * m;
        let mut need = [0usize; 3];
        self.for_each_mode(|k, idx| {
            if self.comps.iter().any(|c| c[idx].norm() > thr) {
                for i in 0..3 {
                    need[i] = need[i].max(k[i].unsigned_abs() as usize);
                }
            }
        });
        if need == self.half {
            return self.clone();
        }
        self.resized(need)
    }

    pub fn scaled(&self, s: f64) -> SpectralField {
        let mut out = self.clone();
        for c in out.comps.iter_mut() {
            for z in c.iter_mut() {
                *z *= s;
            }
        }
        out
    }

    /// self + s * other on the union box.
    pub fn axpy(&self, s: f64, other: &SpectralField) -> Result<SpectralField> {
        if self.rank != other.rank {
            return Err(Error::Rank {
                expected: self.rank.name().into(),
                got: other.rank.name().into(),
            });
        }
        let half = [0, 1, 2].map(|i| self.half[i].max(other.half[i]));
        let mut out = if half == self.half { self.clone() } else { self.resized(half) };
        out.grid = self.grid;
        other.for_each_mode(|k, idx| {
            let j = out.index(k).unwrap();
            for c in 0..self.rank.ncomp() {
                out.comps[c][j] += other.comps[c][idx] * s;
            }
        });
        out.traceless = self.traceless && other.traceless;
        Ok(out)
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.axpy(-1.0, other)
    }

    /// Scalar field of component c (or the trace for tensors when `c` is None).
    pub fn component(&self, c: usize) -> SpectralField {
        let mut out = SpectralField::zeros(self.grid, Rank::Scalar, self.half);
        out.comps[0] = self.comps[c].clone();
        out
    }

    pub fn trace(&self) -> Result<SpectralField> {
        if self.rank != Rank::SymTensor {
            return Err(Error::Rank {
                expected: Rank::SymTensor.name().into(),
                got: self.rank.name().into(),
            });
        }
        Ok(self.map_to(Rank::Scalar, |_, a, b| b[0] = a[0] + a[3] + a[5]))
    }

    /// Assemble a vector or tensor field from scalar components.
    pub fn from_components(rank: Rank, parts: &[SpectralField]) -> Result<SpectralField> {
        if parts.len() != rank.ncomp() || parts.is_empty() {
            return Err(Error::Rank {
                expected: format!("{} components", rank.ncomp()),
                got: format!("{} components", parts.len()),
            });
        }
        let grid = parts[0].grid;
        let mut half = [0usize; 3];
        for p in parts {
            for i in 0..3 {
                half[i] = half[i].max(p.half[i]);
            }
        }
        let mut out = SpectralField::zeros(grid, rank, half);
        for (c, p) in parts.iter().enumerate() {
            let q = p.resized(half);
            out.comps[c] = q.comps[0].clone();
        }
        Ok(out)
    }

    /// Mean (k = 0 coefficient) per component.
    pub fn mean(&self) -> Vec<f64> {
        self.comps.iter().map(|c| c[self.box_len() / 2].re).collect()
    }

    pub fn remove_mean(&mut self) {
        let mid = self.box_len() / 2;
        for c in self.comps.iter_mut() {
            c[mid] = Complex64::default();
        }
    }

    /// Values on a uniform grid. Any size is exact at the grid points (modes fold).
    pub fn to_physical(&self, sizes: [usize; 3]) -> Physical {
        let n: usize = sizes.iter().product();
        let nc = self.rank.ncomp();
        let mut out = Physical::zeros(sizes, self.rank);
        let mut buf = vec![Complex64::default(); n];
        let mut c = 0;
        while c < nc {
            let pair = c + 1 < nc;
            buf.iter_mut().for_each(|z| *z = Complex64::default());
            let i = Complex64::new(0.0, 1.0);
            self.for_each_mode(|k, idx| {
                let j = (wrap(k[0], sizes[0]) * sizes[1] + wrap(k[1], sizes[1])) * sizes[2] + wrap(k[2], sizes[2]);
                let mut v = self.comps[c][idx];
                if pair {
                    v += i * self.comps[c + 1][idx];
                }
                buf[j] += v;
            });
            fft3(&mut buf, sizes, true);
            for (j, z) in buf.iter().enumerate() {
                out.data[c][j] = z.re;
                if pair {
                    out.data[c + 1][j] = z.im;
                }
            }
            c += if pair { 2 } else { 1 };
        }
        out
    }

    /// Forward transform of real samples; box defaults to the largest unaliased one.
    pub fn from_physical(grid: FourierGrid, phys: &Physical, half: Option<[usize; 3]>) -> Result<SpectralField> {
        let sizes = phys.sizes;
        let l = grid.retained_limit();
        let half = half.unwrap_or([0, 1, 2].map(|i| ((sizes[i] - 1) / 2).min(l)));
        for i in 0..3 {
            if 2 * half[i] + 1 > sizes[i] && !(sizes[i] == 1 && half[i] == 0) {
                return Err(Error::Aliasing(format!(
                    "box half-width {} needs at least {} samples on axis {}, have {}",
                    half[i],
                    2 * half[i] + 1,
                    i,
                    sizes[i]
                )));
            }
        }
        let n: usize = sizes.iter().product();
        let nc = phys.rank.ncomp();
        let mut out = SpectralField::zeros(grid, phys.rank, half);
        let half = out.half;
        let mut buf = vec![Complex64::default(); n];
        let inv_n = 1.0 / n as f64;
        let mut c = 0;
        while c < nc {
            let pair = c + 1 < nc;
            for j in 0..n {
                buf[j] = Complex64::new(phys.data[c][j], if pair { phys.data[c + 1][j] } else { 0.0 });
            }
            fft3(&mut buf, sizes, false);
            let h = half.map(|x| x as i64);
            let mut idx = 0;
            for k1 in -h[0]..=h[0] {
                for k2 in -h[1]..=h[1] {
                    for k3 in -h[2]..=h[2] {
                        let j = (wrap(k1, sizes[0]) * sizes[1] + wrap(k2, sizes[1])) * sizes[2] + wrap(k3, sizes[2]);
                        let jm = (wrap(-k1, sizes[0]) * sizes[1] + wrap(-k2, sizes[1])) * sizes[2] + wrap(-k3, sizes[2]);
                        let z = buf[j] * inv_n;
                        let zm = buf[jm].conj() * inv_n;
                        if pair {
                            out.comps[c][idx] = (z + zm) * 0.5;
                            out.comps[c + 1][idx] = (z - zm) * Complex64::new(0.0, -0.5);
                        } else {
                            out.comps[c][idx] = (z + zm) * 0.5;
                        }
                        idx += 1;
                    }
                }
            }
            c += if pair { 2 } else { 1 };
        }
        Ok(out)
    }

    /// Natural collocation sizes: n on axes the field varies along, 1 elsewhere.
    pub fn collocation_sizes(&self) -> [usize; 3] {
        self.half.map(|h| if h == 0 { 1 } else { self.grid.n() })
    }
}

/// Forward transform of complex samples into a centered box (no symmetry assumed).
pub fn complex_spectrum(data: &[Complex64], sizes: [usize; 3], half: [usize; 3]) -> Vec<Complex64> {
    let n: usize = sizes.iter().product();
    let mut buf = data.to_vec();
    fft3(&mut buf, sizes, false);
    let inv_n = 1.0 / n as f64;
    let h = half.map(|x| x as i64);
    let mut out = Vec::with_capacity(box_dims(half).iter().product());
    for k1 in -h[0]..=h[0] {
        for k2 in -h[1]..=h[1] {
            for k3 in -h[2]..=h[2] {
                let j = (wrap(k1, sizes[0]) * sizes[1] + wrap(k2, sizes[1])) * sizes[2] + wrap(k3, sizes[2]);
                out.push(buf[j] * inv_n);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize) -> FourierGrid {
        FourierGrid::new(n).unwrap()
    }

    #[test]
    fn cosine_roundtrip() {
        let f = SpectralField::from_modes(g(16), Rank::Scalar, &[([1, 0, 0], vec![Complex64::new(0.5, 0.0)])]).unwrap();
        let p = f.to_physical([16, 1, 1]);
        for j in 0..16 {
            let x = p.point(j)[0];
            assert!((p.data[0][j] - x.cos()).abs() < 1e-14);
        }
        let back = SpectralField::from_physical(g(16), &p, Some([1, 0, 0])).unwrap();
        assert!((back.coeff([1, 0, 0], 0) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((back.coeff([-1, 0, 0], 0) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn paired_components_separate() {
        let modes = vec![
            ([0, 2, 1], vec![Complex64::new(0.3, -0.2), Complex64::new(0.0, 0.7), Complex64::new(-1.0, 0.1)]),
            ([1, 0, -1], vec![Complex64::new(0.1, 0.0), Complex64::new(0.2, 0.2), Complex64::new(0.0, -0.4)]),
        ];
        let f = SpectralField::from_modes(g(16), Rank::Vector, &modes).unwrap();
        let p = f.to_physical([8, 8, 8]);
        let back = SpectralField::from_physical(g(16), &p, Some(f.half())).unwrap();
        for c in 0..3 {
            for (a, b) in f.comp(c).iter().zip(back.comp(c)) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn trim_and_resize() {
        let f = SpectralField::from_modes(g(32), Rank::Scalar, &[([0, 0, 3], vec![Complex64::new(1.0, 0.0)])]).unwrap();
        let big = f.resized([4, 4, 8]);
        assert_eq!(big.half(), [4, 4, 8]);
        let t = big.trimmed(1e-15);
        assert_eq!(t.half(), [0, 0, 3]);
        assert_eq!(t, f);
    }

    #[test]
    fn aliasing_guard() {
        let p = Physical::zeros([4, 1, 1], Rank::Scalar);
        assert!(SpectralField::from_physical(g(16), &p, Some([2, 0, 0])).is_err());
    }
}
