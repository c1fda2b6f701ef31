use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum supported spatial dimension.
pub const MAX_DIM: usize = 3;

/// A space-time frequency lattice point. Components of `xi` past the grid
/// dimension are zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Freq {
    pub xi: [i64; MAX_DIM],
    pub tau: i64,
}

impl Freq {
    pub fn new(xi: &[i64], tau: i64) -> Self {
        assert!(xi.len() <= MAX_DIM, "at most {MAX_DIM} spatial components");
        let mut a = [0; MAX_DIM];
        a[..xi.len()].copy_from_slice(xi);
        Freq { xi: a, tau }
    }

    pub fn xi2(&self) -> i64 {
        self.xi.iter().map(|v| v * v).sum()
    }

    pub fn dot(&self, other: &Freq) -> i64 {
        dot(&self.xi, &other.xi)
    }

    pub fn add(&self, other: &Freq) -> Freq {
        let mut xi = [0; MAX_DIM];
        for (k, x) in xi.iter_mut().enumerate() {
            *x = self.xi[k] + other.xi[k];
        }
        Freq { xi, tau: self.tau + other.tau }
    }

    pub fn neg(&self) -> Freq {
        Freq { xi: self.xi.map(|v| -v), tau: -self.tau }
    }
}

pub fn dot(a: &[i64; MAX_DIM], b: &[i64; MAX_DIM]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Periodic space-time grid with spatial and temporal period 2π, so that the
/// dual lattices are exactly ℤⁿ ∩ [-M/2, M/2)ⁿ and ℤ ∩ [-K/2, K/2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    m: usize,
    k: usize,
}

impl GridSpec {
    pub fn new(n: usize, m: usize, k: usize) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::InvalidGrid(format!("dimension {n} not in 1..={MAX_DIM}")));
        }
        if m % 2 != 0 || k % 2 != 0 {
            return Err(Error::InvalidGrid(format!("M={m} and K={k} must be even")));
        }
        if m < 8 || k < 8 {
            return Err(Error::InvalidGrid(format!("M={m} and K={k} must be at least 8")));
        }
        let total = (m as u128).pow(n as u32) * k as u128;
        if total > (1u128 << 34) {
            return Err(Error::InvalidGrid(format!("grid with {total} points is too large")));
        }
        Ok(GridSpec { n, m, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Spatial modes per axis.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Temporal modes.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.spatial_len() * self.k
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spatial_len(&self) -> usize {
        self.m.pow(self.n as u32)
    }

    pub fn shape(&self) -> Vec<usize> {
        let mut s = vec![self.m; self.n];
        s.push(self.k);
        s
    }

    /// Largest annulus index whose spatial and temporal extent fit the grid:
    /// 2^{i+1} ≤ M/2 and 2^{2i+1} ≤ K/2.
    pub fn i_max(&self) -> u32 {
        let mut i = 0;
        while (1usize << (i + 2)) <= self.m / 2 && (1usize << (2 * i + 3)) <= self.k / 2 {
            i += 1;
        }
        i
    }

    /// True when the top annulus does not fit its full modulation range.
    pub fn modulation_truncated(&self) -> bool {
        self.k / 2 < 1usize << (2 * self.i_max() + 2)
    }

    /// Smallest i with 2^i bounding the anisotropic norm of every grid point.
    pub fn i_cover(&self) -> u32 {
        let half_m = (self.m / 2) as u64;
        let r2 = self.n as u64 * half_m * half_m + (self.k / 2) as u64;
        let mut i = 0;
        while (1u64 << (2 * i)) < r2 {
            i += 1;
        }
        i
    }

    pub fn xi_min(&self) -> i64 {
        -((self.m / 2) as i64)
    }

    pub fn xi_max(&self) -> i64 {
        (self.m / 2) as i64 - 1
    }

    pub fn tau_min(&self) -> i64 {
        -((self.k / 2) as i64)
    }

    pub fn tau_max(&self) -> i64 {
        (self.k / 2) as i64 - 1
    }

    pub fn contains(&self, f: &Freq) -> bool {
        f.xi[..self.n].iter().all(|&x| x >= self.xi_min() && x <= self.xi_max())
            && f.xi[self.n..].iter().all(|&x| x == 0)
            && f.tau >= self.tau_min()
            && f.tau <= self.tau_max()
    }

    /// Like `contains` but excluding the unpaired -M/2 and -K/2 rows, so the
    /// reflected point is also on the grid.
    pub fn contains_symmetric(&self, f: &Freq) -> bool {
        self.contains(f)
            && f.xi[..self.n].iter().all(|&x| x > self.xi_min())
            && f.tau > self.tau_min()
    }

    /// Flat storage index of a lattice point (FFT order per axis, time fastest).
    pub fn index(&self, f: &Freq) -> Option<usize> {
        if !self.contains(f) {
            return None;
        }
        Some(self.index_wrapped(f))
    }

    /// Flat index with periodic wrapping of every coordinate.
    pub fn index_wrapped(&self, f: &Freq) -> usize {
        let m = self.m as i64;
        let mut idx = 0usize;
        for a in 0..self.n {
            idx = idx * self.m + f.xi[a].rem_euclid(m) as usize;
        }
        idx * self.k + f.tau.rem_euclid(self.k as i64) as usize
    }

    pub fn spatial_index(&self, xi: &[i64; MAX_DIM]) -> usize {
        let m = self.m as i64;
        let mut idx = 0usize;
        for a in 0..self.n {
            idx = idx * self.m + xi[a].rem_euclid(m) as usize;
        }
        idx
    }

    pub fn freq_of(&self, index: usize) -> Freq {
        let tau = centered(index % self.k, self.k);
        let xi = self.spatial_freq_of(index / self.k);
        Freq { xi, tau }
    }

    pub fn spatial_freq_of(&self, sindex: usize) -> [i64; MAX_DIM] {
        let mut xi = [0; MAX_DIM];
        let mut rest = sindex;
        for a in (0..self.n).rev() {
            xi[a] = centered(rest % self.m, self.m);
            rest /= self.m;
        }
        xi
    }

    /// Spatial sample spacing 2π/M.
    pub fn dx(&self) -> f64 {
        2.0 * PI / self.m as f64
    }

    /// Temporal sample spacing 2π/K.
    pub fn dt(&self) -> f64 {
        2.0 * PI / self.k as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.n as i32) * self.dt()
    }

    /// Time of sample `l`, centred into [-π, π).
    pub fn time(&self, l: usize) -> f64 {
        centered(l, self.k) as f64 * self.dt()
    }

    pub fn doubled(&self) -> GridSpec {
        GridSpec { n: self.n, m: 2 * self.m, k: 2 * self.k }
    }

    /// Smallest power-of-two grid holding spatial frequencies |ξ_a| ≤ xi_abs
    /// and |τ| ≤ tau_abs symmetrically.
    pub fn enclosing(n: usize, xi_abs: i64, tau_abs: i64) -> Result<GridSpec> {
        let mut m = 8usize;
        while (m / 2) as i64 <= xi_abs {
            m *= 2;
        }
        let mut k = 8usize;
        while (k / 2) as i64 <= tau_abs {
            k *= 2;
        }
        GridSpec::new(n, m, k)
    }
}

/// Map an FFT-order index to its centred frequency.
pub fn centered(idx: usize, len: usize) -> i64 {
    if idx < len / 2 {
        idx as i64
    } else {
        idx as i64 - len as i64
    }
}

/// Anisotropic norm |(ξ,τ)| = (|τ| + |ξ|²)^{1/2}.
pub fn aniso_norm(xi: &[i64], tau: i64) -> f64 {
    let x2: i64 = xi.iter().map(|v| v * v).sum();
    ((tau.abs() + x2) as f64).sqrt()
}

/// ⟨x⟩ = (1 + x²)^{1/2}.
pub fn bracket(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// ⟨(ξ,τ)⟩.
pub fn aniso_bracket(xi: &[i64], tau: i64) -> f64 {
    let x2: i64 = xi.iter().map(|v| v * v).sum();
    (1.0 + (tau.abs() + x2) as f64).sqrt()
}

/// Signed modulation τ − |ξ|² (or τ + |ξ|² for the conjugate paraboloid).
pub fn modulation(f: &Freq, conjugate: bool) -> i64 {
    if conjugate {
        f.tau + f.xi2()
    } else {
        f.tau - f.xi2()
    }
}

/// ⟨τ − ξ²⟩.
pub fn modulation_bracket(xi: &[i64], tau: i64) -> f64 {
    let x2: i64 = xi.iter().map(|v| v * v).sum();
    bracket((tau - x2) as f64)
}

/// ⟨τ + ξ²⟩.
pub fn conj_modulation_bracket(xi: &[i64], tau: i64) -> f64 {
    let x2: i64 = xi.iter().map(|v| v * v).sum();
    bracket((tau + x2) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_grid_examples() {
        let g = GridSpec::new(2, 64, 64).unwrap();
        assert_eq!(g.xi_min(), -32);
        assert_eq!(g.xi_max(), 31);
        assert_eq!(g.tau_min(), -32);
        assert_eq!(g.i_max(), 2);
        assert!(g.modulation_truncated());
        assert!(GridSpec::new(1, 8, 8).is_ok());
        assert!(GridSpec::new(2, 63, 64).is_err());
        assert!(GridSpec::new(2, 64, 63).is_err());
        assert!(GridSpec::new(2, 6, 64).is_err());
        assert!(GridSpec::new(0, 8, 8).is_err());
        assert!(GridSpec::new(4, 8, 8).is_err());
    }

    #[test]
    fn i_cover_bounds_every_point() {
        for g in [GridSpec::new(2, 64, 64).unwrap(), GridSpec::new(1, 8, 8).unwrap()] {
            let ic = g.i_cover();
            let mut worst: f64 = 0.0;
            for idx in 0..g.len() {
                let f = g.freq_of(idx);
                worst = worst.max(aniso_norm(&f.xi, f.tau));
            }
            assert!(worst <= (1u64 << ic) as f64);
            assert!(worst > (1u64 << (ic - 1)) as f64);
        }
    }

    #[test]
    fn index_roundtrip() {
        let g = GridSpec::new(2, 8, 16).unwrap();
        for idx in 0..g.len() {
            let f = g.freq_of(idx);
            assert!(g.contains(&f));
            assert_eq!(g.index(&f), Some(idx));
        }
        assert_eq!(g.index(&Freq::new(&[4, 0], 0)), None);
    }

    #[test]
    fn aniso_examples() {
        assert_eq!(aniso_norm(&[0, 0], 0), 0.0);
        assert_eq!(aniso_bracket(&[0, 0], 0), 1.0);
        assert_eq!(aniso_norm(&[3, 4], 0), 5.0);
        assert!((aniso_norm(&[1, 0], -1) - 2f64.sqrt()).abs() < 1e-15);
        assert!((modulation_bracket(&[1, 0], -1) - 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(aniso_norm(&[-3, 4], 7), aniso_norm(&[3, -4], 7));
    }
}
