//! Space-time tubes T_ξ^{m,l} on the 2π-torus.
//!
//! Each spatial axis is cut into `CELLS` cells of length 2π/CELLS and time into
//! `CELLS` slabs. A grid point (x, t) lies in tube (m, l) iff t is in slab l and
//! x + 2tξ (mod 2π) lies in cell m. Membership is decided in exact integer
//! arithmetic, so the tubes for fixed ξ partition the grid.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{GridSpec, SpaceTimeField, MAX_DIM};

pub const CELLS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TubeIndex {
    pub xi: [i64; MAX_DIM],
    pub m: [usize; MAX_DIM],
    pub l: usize,
}

pub fn cell_length() -> f64 {
    2.0 * std::f64::consts::PI / CELLS as f64
}

/// Slab of time sample `ls` (time 2π·ls/K).
pub fn slab_of(grid: &GridSpec, ls: usize) -> usize {
    CELLS * ls / grid.k()
}

/// Cell of spatial sample j along an axis at time sample ls for slope ξ_a.
pub fn cell_of(grid: &GridSpec, j: usize, ls: usize, xi_a: i64) -> usize {
    let (m, k) = (grid.m() as i128, grid.k() as i128);
    let num = (j as i128 * k + 2 * ls as i128 * xi_a as i128 * m).rem_euclid(m * k);
    (CELLS as i128 * num / (m * k)) as usize
}

/// Number of spatial samples along one axis in each cell at time sample ls.
pub fn axis_counts(grid: &GridSpec, ls: usize, xi_a: i64) -> [usize; CELLS] {
    let (m, k) = (grid.m() as i128, grid.k() as i128);
    let shift = (2 * ls as i128 * xi_a as i128 * m).rem_euclid(m * k);
    let r = shift % k;
    let c = CELLS as i128;
    // #{j : c r + c K j < x}, j in [0, M)
    let below = |x: i128| -> i128 {
        let num = x - c * r;
        let den = c * k;
        let q = if num <= 0 { 0 } else { (num + den - 1) / den };
        q.clamp(0, m)
    };
    let mut out = [0usize; CELLS];
    for (cell, slot) in out.iter_mut().enumerate() {
        let lo = cell as i128 * m * k;
        let hi = (cell as i128 + 1) * m * k;
        *slot = (below(hi) - below(lo)) as usize;
    }
    out
}

/// Samples of a field on one tube, grouped by time sample.
#[derive(Clone, Debug, Default)]
pub struct TubeSamples {
    pub times: Vec<usize>,
    pub indices: Vec<Vec<usize>>,
    pub values: Vec<Vec<Complex64>>,
}

impl TubeSamples {
    fn l2_at(&self, k: usize, dv: f64) -> f64 {
        (self.values[k].iter().map(|v| v.norm_sqr()).sum::<f64>() * dv).sqrt()
    }

    pub fn linf_l2(&self, grid: &GridSpec) -> f64 {
        let dv = grid.dx().powi(grid.n() as i32);
        (0..self.values.len()).map(|k| self.l2_at(k, dv)).fold(0.0, f64::max)
    }

    pub fn l1_l2(&self, grid: &GridSpec) -> f64 {
        let dv = grid.dx().powi(grid.n() as i32);
        (0..self.values.len()).map(|k| self.l2_at(k, dv)).sum::<f64>() * grid.dt()
    }
}

/// Samples of u on the tube, from the physical grid.
pub fn tube_restrict(u: &SpaceTimeField, t: &TubeIndex) -> Result<TubeSamples> {
    let g = *u.grid();
    let n = g.n();
    if t.l >= CELLS || t.m[..n].iter().any(|&c| c >= CELLS) {
        return Err(Error::OutOfRange(format!("tube {t:?} outside the periodic cell")));
    }
    let mut out = TubeSamples::default();
    for ls in 0..g.k() {
        if slab_of(&g, ls) != t.l {
            continue;
        }
        let mut idx = Vec::new();
        let mut vals = Vec::new();
        for s in 0..g.spatial_len() {
            let mut rest = s;
            let mut inside = true;
            for a in (0..n).rev() {
                let j = rest % g.m();
                rest /= g.m();
                if cell_of(&g, j, ls, t.xi[a]) != t.m[a] {
                    inside = false;
                    break;
                }
            }
            if inside {
                let flat = s * g.k() + ls;
                idx.push(flat);
                vals.push(u.values()[flat]);
            }
        }
        out.times.push(ls);
        out.indices.push(idx);
        out.values.push(vals);
    }
    Ok(out)
}

/// All tube indices for a fixed ξ.
pub fn tubes_for(grid: &GridSpec, xi: [i64; MAX_DIM]) -> Vec<TubeIndex> {
    let n = grid.n();
    let cells = CELLS.pow(n as u32);
    let mut out = Vec::with_capacity(cells * CELLS);
    for l in 0..CELLS {
        for c in 0..cells {
            let mut m = [0usize; MAX_DIM];
            let mut rest = c;
            for a in (0..n).rev() {
                m[a] = rest % CELLS;
                rest /= CELLS;
            }
            out.push(TubeIndex { xi, m, l });
        }
    }
    out
}

/// Tube norms of a single-column field e^{ix·ξ} a(t): ℓ² over tubes of
/// L^∞_t L²_x (Y) and of L¹_t L²_x (script Y).
#[derive(Clone, Debug)]
pub struct ColumnTubeNorms {
    pub y: f64,
    pub scripty: f64,
    pub linf: Vec<f64>,
    pub l1: Vec<f64>,
}

pub fn column_tube_norms(grid: &GridSpec, xi: &[i64; MAX_DIM], a: &[Complex64]) -> ColumnTubeNorms {
    let n = grid.n();
    let cells = CELLS.pow(n as u32);
    let dv = grid.dx().powi(n as i32);
    let dt = grid.dt();
    let mut linf = vec![0.0f64; cells * CELLS];
    let mut l1 = vec![0.0f64; cells * CELLS];
    let mut counts = [[0usize; CELLS]; MAX_DIM];
    for (ls, av) in a.iter().enumerate() {
        let amp2 = av.norm_sqr();
        if amp2 == 0.0 {
            continue;
        }
        let slab = slab_of(grid, ls);
        for ax in 0..n {
            counts[ax] = axis_counts(grid, ls, xi[ax]);
        }
        for c in 0..cells {
            let mut rest = c;
            let mut cnt = 1usize;
            for ax in (0..n).rev() {
                cnt *= counts[ax][rest % CELLS];
                rest /= CELLS;
            }
            if cnt == 0 {
                continue;
            }
            let val = (amp2 * cnt as f64 * dv).sqrt();
            let slot = slab * cells + c;
            linf[slot] = linf[slot].max(val);
            l1[slot] += val * dt;
        }
    }
    let y = linf.iter().map(|v| v * v).sum::<f64>().sqrt();
    let scripty = l1.iter().map(|v| v * v).sum::<f64>().sqrt();
    ColumnTubeNorms { y, scripty, linf, l1 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tubes_partition_grid() {
        let g = GridSpec::new(2, 8, 16).unwrap();
        let u = SpaceTimeField::zeros(g);
        for xi in [[0, 0, 0], [1, -2, 0], [3, 3, 0]] {
            let mut hits = vec![0u32; g.len()];
            for t in tubes_for(&g, xi) {
                for idx in tube_restrict(&u, &t).unwrap().indices.into_iter().flatten() {
                    hits[idx] += 1;
                }
            }
            assert!(hits.iter().all(|&h| h == 1));
        }
    }

    #[test]
    fn counts_match_membership() {
        let g = GridSpec::new(1, 16, 24).unwrap();
        for xi in [-3i64, 0, 1, 5] {
            for ls in 0..g.k() {
                let fast = axis_counts(&g, ls, xi);
                let mut slow = [0usize; CELLS];
                for j in 0..g.m() {
                    slow[cell_of(&g, j, ls, xi)] += 1;
                }
                assert_eq!(fast, slow, "xi={xi} ls={ls}");
            }
        }
    }

    #[test]
    fn zero_slope_is_static() {
        let g = GridSpec::new(1, 12, 12).unwrap();
        for ls in 0..g.k() {
            for j in 0..g.m() {
                assert_eq!(cell_of(&g, j, ls, 0), CELLS * j / g.m());
            }
        }
    }

    #[test]
    fn constant_field_tube_norm() {
        let g = GridSpec::new(2, 12, 12).unwrap();
        let u = SpaceTimeField::from_fn(g, |_, _| Complex64::new(1.0, 0.0));
        let t = TubeIndex { xi: [0, 0, 0], m: [1, 2, 0], l: 3 };
        let s = tube_restrict(&u, &t).unwrap();
        let side = cell_length();
        // 12 samples per axis, 2 per cell: exact quadrature of the cell area
        assert!((s.linf_l2(&g) - side).abs() < 1e-12);
    }
}
