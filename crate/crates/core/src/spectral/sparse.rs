use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::field::{product_factor, FrequencyField};
use super::grid::{Freq, GridSpec, MAX_DIM};
use super::{Column, Spectral};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Sparse space-time spectrum on a (possibly very large) grid. Only the
/// listed modes are nonzero. Modes stay off the unpaired -M/2, -K/2 rows so
/// conjugation never leaves the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    grid: GridSpec,
    modes: Vec<(Freq, Complex64)>,
}

impl Spectrum {
    pub fn empty(grid: GridSpec) -> Self {
        Spectrum { grid, modes: Vec::new() }
    }

    /// Build from (point, value) pairs; duplicates are summed.
    pub fn from_modes(grid: GridSpec, modes: impl IntoIterator<Item = (Freq, Complex64)>) -> Result<Self> {
        let mut acc: HashMap<Freq, Complex64> = HashMap::new();
        for (f, v) in modes {
            if !grid.contains_symmetric(&f) {
                return Err(Error::Truncation(format!("mode {f:?} outside {grid:?}")));
            }
            *acc.entry(f).or_insert(ZERO) += v;
        }
        let mut modes: Vec<_> = acc.into_iter().filter(|(_, v)| *v != ZERO).collect();
        modes.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Spectrum { grid, modes })
    }

    fn from_sorted(grid: GridSpec, modes: Vec<(Freq, Complex64)>) -> Self {
        Spectrum { grid, modes }
    }

    pub fn from_field(f: &FrequencyField) -> Result<Self> {
        Spectrum::from_modes(*f.grid(), f.iter().filter(|(_, v)| *v != ZERO))
    }

    pub fn to_field(&self) -> FrequencyField {
        let mut out = FrequencyField::zeros(self.grid);
        for (f, v) in &self.modes {
            out.set(f, *v).expect("modes are inside the grid");
        }
        out
    }

    /// Re-host on another grid; errors if any mode falls outside.
    pub fn with_grid(&self, grid: GridSpec) -> Result<Spectrum> {
        if grid.n() != self.grid.n() {
            return Err(Error::Mismatch("dimension differs".into()));
        }
        if let Some((f, _)) = self.modes.iter().find(|(f, _)| !grid.contains_symmetric(f)) {
            return Err(Error::Truncation(format!("mode {f:?} outside {grid:?}")));
        }
        Ok(Spectrum { grid, modes: self.modes.clone() })
    }

    pub fn modes(&self) -> &[(Freq, Complex64)] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn get(&self, at: &Freq) -> Complex64 {
        self.modes.binary_search_by(|(f, _)| f.cmp(at)).map_or(ZERO, |i| self.modes[i].1)
    }

    pub fn scale(&self, c: Complex64) -> Spectrum {
        Spectrum { grid: self.grid, modes: self.modes.iter().map(|(f, v)| (*f, v * c)).collect() }
    }

    pub fn abs(&self) -> Spectrum {
        Spectrum {
            grid: self.grid,
            modes: self.modes.iter().map(|(f, v)| (*f, Complex64::new(v.norm(), 0.0))).collect(),
        }
    }

    pub fn sub(&self, other: &Spectrum) -> Result<Spectrum> {
        self.add_field(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Largest |ξ_a| and |τ| over the support.
    pub fn extent(&self) -> (i64, i64) {
        let mut xi = 0;
        let mut tau = 0;
        for (f, _) in &self.modes {
            for a in 0..self.grid.n() {
                xi = xi.max(f.xi[a].abs());
            }
            tau = tau.max(f.tau.abs());
        }
        (xi, tau)
    }

    /// Space-time product uv computed without aliasing; the result lives on
    /// `out`, and modes outside `out` are a truncation error.
    pub fn product(&self, other: &Spectrum, out: GridSpec) -> Result<Spectrum> {
        let c = product_factor(self.grid.n());
        Ok(convolve(self, other, |_, _| 1.0, out)?.scale(Complex64::new(c, 0.0)))
    }
}

impl Spectral for Spectrum {
    fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn for_each_mode<F: FnMut(&Freq, Complex64)>(&self, mut f: F) {
        for (p, v) in &self.modes {
            f(p, *v);
        }
    }

    fn map_weights<W: Fn(&Freq) -> f64>(&self, w: W) -> Self {
        let modes = self
            .modes
            .iter()
            .filter_map(|(f, v)| {
                let x = w(f);
                if x == 0.0 {
                    None
                } else {
                    Some((*f, v * x))
                }
            })
            .collect();
        Spectrum::from_sorted(self.grid, modes)
    }

    fn columns(&self) -> Vec<Column> {
        let mut out: Vec<Column> = Vec::new();
        for (f, v) in &self.modes {
            match out.last_mut() {
                Some(c) if c.xi == f.xi => c.entries.push((f.tau, *v)),
                _ => out.push(Column { xi: f.xi, entries: vec![(f.tau, *v)] }),
            }
        }
        out
    }

    fn conj_field(&self) -> Self {
        let mut modes: Vec<_> = self.modes.iter().map(|(f, v)| (f.neg(), v.conj())).collect();
        modes.sort_by(|a, b| a.0.cmp(&b.0));
        Spectrum::from_sorted(self.grid, modes)
    }

    fn zero_like(&self) -> Self {
        Spectrum::empty(self.grid)
    }

    fn add_field(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::Mismatch("spectra on different grids".into()));
        }
        let mut modes = Vec::with_capacity(self.modes.len() + other.modes.len());
        let (mut i, mut j) = (0, 0);
        while i < self.modes.len() || j < other.modes.len() {
            let take = if i == self.modes.len() {
                std::cmp::Ordering::Greater
            } else if j == other.modes.len() {
                std::cmp::Ordering::Less
            } else {
                self.modes[i].0.cmp(&other.modes[j].0)
            };
            match take {
                std::cmp::Ordering::Less => {
                    modes.push(self.modes[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    modes.push(other.modes[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let v = self.modes[i].1 + other.modes[j].1;
                    if v != ZERO {
                        modes.push((self.modes[i].0, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(Spectrum::from_sorted(self.grid, modes))
    }

    fn norm_l2(&self) -> f64 {
        self.modes.iter().map(|(_, v)| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

struct BoxIndex {
    n: usize,
    lo: [i64; MAX_DIM],
    size: [usize; MAX_DIM],
    slots: Vec<i32>,
}

impl BoxIndex {
    fn new(n: usize, cols: &[Column]) -> Self {
        let mut lo = [i64::MAX; MAX_DIM];
        let mut hi = [i64::MIN; MAX_DIM];
        for c in cols {
            for a in 0..n {
                lo[a] = lo[a].min(c.xi[a]);
                hi[a] = hi[a].max(c.xi[a]);
            }
        }
        let mut size = [1usize; MAX_DIM];
        for a in 0..n {
            if cols.is_empty() {
                lo[a] = 0;
                size[a] = 0;
            } else {
                size[a] = (hi[a] - lo[a] + 1) as usize;
            }
        }
        let total: usize = size[..n].iter().product();
        let mut b = BoxIndex { n, lo, size, slots: vec![-1; total] };
        for (k, c) in cols.iter().enumerate() {
            let idx = b.index(&c.xi).expect("inside own box");
            b.slots[idx] = k as i32;
        }
        b
    }

    fn index(&self, xi: &[i64; MAX_DIM]) -> Option<usize> {
        let mut idx = 0usize;
        for a in 0..self.n {
            let off = xi[a] - self.lo[a];
            if off < 0 || off as usize >= self.size[a] {
                return None;
            }
            idx = idx * self.size[a] + off as usize;
        }
        Some(idx)
    }

    fn get(&self, xi: &[i64; MAX_DIM]) -> Option<usize> {
        self.index(xi).and_then(|i| {
            let s = self.slots[i];
            (s >= 0).then_some(s as usize)
        })
    }
}

/// Raw lattice convolution Σ_{p+q=r} w(ξ_p, ξ_q) a(p) b(q) with a weight that
/// depends on the spatial frequencies only. No normalization factor.
pub fn convolve<W>(a: &Spectrum, b: &Spectrum, weight: W, out: GridSpec) -> Result<Spectrum>
where
    W: Fn(&[i64; MAX_DIM], &[i64; MAX_DIM]) -> f64 + Sync,
{
    let n = a.grid.n();
    if b.grid.n() != n || out.n() != n {
        return Err(Error::Mismatch("dimension differs".into()));
    }
    if a.is_empty() || b.is_empty() {
        return Ok(Spectrum::empty(out));
    }
    let ca = a.columns();
    let cb = b.columns();
    let ia = BoxIndex::new(n, &ca);
    let ib = BoxIndex::new(n, &cb);
    let tau_range = |cols: &[Column]| {
        let lo = cols.iter().flat_map(|c| c.entries.iter().map(|e| e.0)).min().unwrap();
        let hi = cols.iter().flat_map(|c| c.entries.iter().map(|e| e.0)).max().unwrap();
        (lo, hi)
    };
    let (ta0, ta1) = tau_range(&ca);
    let (tb0, tb1) = tau_range(&cb);
    let base = ta0 + tb0;
    let line_len = (ta1 + tb1 - base + 1) as usize;

    let mut zlo = [0i64; MAX_DIM];
    let mut zsize = [1usize; MAX_DIM];
    for k in 0..n {
        zlo[k] = ia.lo[k] + ib.lo[k];
        zsize[k] = ia.size[k] + ib.size[k] - 1;
    }
    let zcount: usize = zsize[..n].iter().product();

    let pairs = a.len().saturating_mul(b.len());
    if pairs.saturating_mul(8) < zcount.saturating_mul(line_len) {
        return convolve_sorted(&ca, &ib, &cb, n, &weight, out);
    }

    let chunks: Vec<Result<Vec<(Freq, Complex64)>>> = (0..zcount)
        .into_par_iter()
        .map(|zi| {
            let mut zeta = [0i64; MAX_DIM];
            let mut rest = zi;
            for k in (0..n).rev() {
                zeta[k] = zlo[k] + (rest % zsize[k]) as i64;
                rest /= zsize[k];
            }
            let mut line: Option<Vec<Complex64>> = None;
            for col in &ca {
                let mut eta = [0i64; MAX_DIM];
                for k in 0..n {
                    eta[k] = zeta[k] - col.xi[k];
                }
                let Some(jb) = ib.get(&eta) else { continue };
                let w = weight(&col.xi, &eta);
                if w == 0.0 {
                    continue;
                }
                let buf = line.get_or_insert_with(|| vec![ZERO; line_len]);
                let other = &cb[jb];
                for &(t1, v1) in &col.entries {
                    let wv = v1 * w;
                    for &(t2, v2) in &other.entries {
                        buf[(t1 + t2 - base) as usize] += wv * v2;
                    }
                }
            }
            let mut outv = Vec::new();
            if let Some(buf) = line {
                for (k, v) in buf.into_iter().enumerate() {
                    if v != ZERO {
                        let f = Freq { xi: zeta, tau: base + k as i64 };
                        if !out.contains_symmetric(&f) {
                            return Err(Error::Truncation(format!(
                                "convolution output {f:?} outside {out:?}"
                            )));
                        }
                        outv.push((f, v));
                    }
                }
            }
            Ok(outv)
        })
        .collect();
    let mut modes = Vec::new();
    for c in chunks {
        modes.extend(c?);
    }
    modes.sort_by(|x, y| x.0.cmp(&y.0));
    Ok(Spectrum::from_sorted(out, modes))
}

/// Pair enumeration followed by a sort, for supports much smaller than
/// their bounding box.
fn convolve_sorted<W>(ca: &[Column], ib: &BoxIndex, cb: &[Column], n: usize, weight: &W, out: GridSpec) -> Result<Spectrum>
where
    W: Fn(&[i64; MAX_DIM], &[i64; MAX_DIM]) -> f64,
{
    let mut items: Vec<(Freq, Complex64)> = Vec::new();
    let mut eta = [0i64; MAX_DIM];
    for (kb, other) in cb.iter().enumerate() {
        debug_assert_eq!(ib.get(&other.xi), Some(kb));
        for col in ca {
            let w = weight(&col.xi, &other.xi);
            if w == 0.0 {
                continue;
            }
            for k in 0..n {
                eta[k] = col.xi[k] + other.xi[k];
            }
            for &(t1, v1) in &col.entries {
                let wv = v1 * w;
                for &(t2, v2) in &other.entries {
                    items.push((Freq { xi: eta, tau: t1 + t2 }, wv * v2));
                }
            }
        }
    }
    items.sort_unstable_by(|x, y| x.0.cmp(&y.0));
    let mut modes: Vec<(Freq, Complex64)> = Vec::with_capacity(items.len());
    for (f, v) in items {
        match modes.last_mut() {
            Some(last) if last.0 == f => last.1 += v,
            _ => modes.push((f, v)),
        }
    }
    modes.retain(|(_, v)| *v != ZERO);
    if let Some((f, _)) = modes.iter().find(|(f, _)| !out.contains_symmetric(f)) {
        return Err(Error::Truncation(format!("convolution output {f:?} outside {out:?}")));
    }
    Ok(Spectrum::from_sorted(out, modes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::field::forward_transform;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_matches_physical_product_without_aliasing() {
        let g = GridSpec::new(2, 16, 32).unwrap();
        let a = Spectrum::from_modes(
            g,
            vec![(Freq::new(&[1, 0], 1), c(1.0, 0.5)), (Freq::new(&[-2, 1], 5), c(0.3, -0.2))],
        )
        .unwrap();
        let b = Spectrum::from_modes(
            g,
            vec![(Freq::new(&[0, 2], 4), c(0.7, 0.0)), (Freq::new(&[1, 1], -3), c(-0.1, 0.9))],
        )
        .unwrap();
        let sparse = a.product(&b, g).unwrap().to_field();
        let phys = a.to_field().inverse().mul(&b.to_field().inverse()).unwrap();
        let dense = forward_transform(&phys);
        assert!(sparse.rel_err(&dense) < 1e-12);
    }

    #[test]
    fn both_accumulation_paths_match_the_physical_product() {
        let g = GridSpec::new(2, 16, 32).unwrap();
        let low = |seed: u64| {
            let mut modes = Vec::new();
            for x in -3..=3i64 {
                for y in -3..=3i64 {
                    for t in -7..=7i64 {
                        let h = (seed ^ ((x + 9) * 1000 + (y + 9) * 50 + t + 20) as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
                        let v = ((h >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
                        modes.push((Freq::new(&[x, y], t), c(v, 0.3 * v)));
                    }
                }
            }
            Spectrum::from_modes(g, modes).unwrap()
        };
        // dense supports take the line path, a pair of points the sorted one
        let (a, b) = (low(1), low(2));
        let pa = Spectrum::from_modes(g, vec![(Freq::new(&[1, 2], 5), c(1.0, 0.5))]).unwrap();
        for (x, y) in [(&a, &b), (&pa, &b), (&pa, &pa)] {
            let sparse = x.product(y, g).unwrap().to_field();
            let phys = x.to_field().inverse().mul(&y.to_field().inverse()).unwrap();
            assert!(sparse.rel_err(&forward_transform(&phys)) < 1e-12);
        }
        let w = |x: &[i64; MAX_DIM], y: &[i64; MAX_DIM]| (x[0] * y[1]) as f64;
        let big = GridSpec::new(2, 64, 4096).unwrap();
        let q = Spectrum::from_modes(big, vec![(Freq::new(&[-20, 3], 400), c(0.3, -0.2))]).unwrap();
        let r = Spectrum::from_modes(big, vec![(Freq::new(&[9, 1], -1500), c(-0.1, 0.9))]).unwrap();
        let out = convolve(&q, &r, w, big).unwrap();
        assert_eq!(out.len(), 1);
        assert!((out.get(&Freq::new(&[-11, 4], -1100)) - c(0.3, -0.2) * c(-0.1, 0.9) * -20.0).norm() < 1e-15);
    }

    #[test]
    fn truncation_is_an_error() {
        let g = GridSpec::new(1, 8, 8).unwrap();
        let a = Spectrum::from_modes(g, vec![(Freq::new(&[3], 0), c(1.0, 0.0))]).unwrap();
        assert!(matches!(a.product(&a, g), Err(Error::Truncation(_))));
        assert!(Spectrum::from_modes(g, vec![(Freq::new(&[-4], 0), c(1.0, 0.0))]).is_err());
    }

    #[test]
    fn add_and_conj() {
        let g = GridSpec::new(1, 8, 8).unwrap();
        let a = Spectrum::from_modes(g, vec![(Freq::new(&[1], 2), c(1.0, 2.0))]).unwrap();
        let b = Spectrum::from_modes(g, vec![(Freq::new(&[1], 2), c(-1.0, -2.0)), (Freq::new(&[0], 1), c(1.0, 0.0))])
            .unwrap();
        let s = a.add_field(&b).unwrap();
        assert_eq!(s.len(), 1);
        let cj = a.conj_field();
        assert_eq!(cj.get(&Freq::new(&[-1], -2)), c(1.0, -2.0));
        let dense = a.to_field().conj();
        assert!(cj.to_field().rel_err(&dense) < 1e-15);
    }
}
