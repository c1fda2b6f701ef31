//! Spectral derivatives and the free and Duhamel propagators. Space-time
//! data are handled as spatial coefficients ĝ(ξ, t_l) with time fastest,
//! the layout of `spatial_forward`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dyadic::TimeCutoff;
use crate::spectral::fft::{fft_1d, ifft_1d};
use crate::spectral::grid::centered;
use crate::spectral::{field::spatial_forward, field::spatial_inverse, GridSpec, SpaceTimeField, SpatialField, MAX_DIM};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn xi_at(grid: &GridSpec, s: usize) -> [i64; MAX_DIM] {
    grid.spatial_freq_of(s)
}

fn xi2(xi: &[i64; MAX_DIM]) -> f64 {
    xi.iter().map(|v| (v * v) as f64).sum()
}

fn map_spatial(z: &SpatialField, f: impl Fn(&[i64; MAX_DIM]) -> Complex64) -> Vec<Complex64> {
    let grid = *z.grid();
    let mut c = z.spectrum();
    for (s, v) in c.iter_mut().enumerate() {
        *v *= f(&xi_at(&grid, s));
    }
    SpatialField::from_spectrum(grid, c).expect("same length").values().to_vec()
}

/// ∂_j z for each axis.
pub fn gradient_spatial(z: &SpatialField) -> Vec<Vec<Complex64>> {
    (0..z.grid().n()).map(|j| map_spatial(z, |xi| I * xi[j] as f64)).collect()
}

pub fn second_partial_spatial(z: &SpatialField, j: usize) -> Vec<Complex64> {
    map_spatial(z, |xi| Complex64::new(-((xi[j] * xi[j]) as f64), 0.0))
}

pub fn laplacian_spatial(z: &SpatialField) -> Vec<Complex64> {
    map_spatial(z, |xi| Complex64::new(-xi2(xi), 0.0))
}

/// Spatial coefficients of a space-time field.
pub fn coefficients(u: &SpaceTimeField) -> Vec<Complex64> {
    spatial_forward(u)
}

pub fn from_coefficients(grid: GridSpec, c: Vec<Complex64>) -> SpaceTimeField {
    spatial_inverse(grid, c)
}

/// ∂_j u for each axis, from spatial coefficients.
pub fn gradient_from_coefficients(grid: GridSpec, c: &[Complex64]) -> Vec<Vec<Complex64>> {
    let k = grid.k();
    (0..grid.n())
        .map(|j| {
            let mut d = c.to_vec();
            d.par_chunks_mut(k).enumerate().for_each(|(s, col)| {
                let f = I * xi_at(&grid, s)[j] as f64;
                col.iter_mut().for_each(|v| *v *= f);
            });
            spatial_inverse(grid, d).into_values()
        })
        .collect()
}

/// u(t) = e^{−itΔ} g: û(ξ,t) = e^{it|ξ|²} ĝ(ξ).
pub fn linear_propagate(g: &SpatialField, t: f64) -> SpatialField {
    let grid = *g.grid();
    let mut c = g.spectrum();
    for (s, v) in c.iter_mut().enumerate() {
        *v *= Complex64::from_polar(1.0, t * xi2(&xi_at(&grid, s)));
    }
    SpatialField::from_spectrum(grid, c).expect("same length")
}

/// The free solution sampled at every grid time, as spatial coefficients.
pub fn linear_coefficients(g: &SpatialField, grid: GridSpec) -> Vec<Complex64> {
    let k = grid.k();
    let c = g.spectrum();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    out.par_chunks_mut(k).enumerate().for_each(|(s, col)| {
        let w = xi2(&xi_at(&grid, s));
        for (l, v) in col.iter_mut().enumerate() {
            *v = c[s] * Complex64::from_polar(1.0, grid.time(l) * w);
        }
    });
    out
}

pub fn linear_solution(g: &SpatialField, grid: GridSpec) -> SpaceTimeField {
    spatial_inverse(grid, linear_coefficients(g, grid))
}

/// Zero-data solution of i u_t − Δu = f, from spatial coefficients of f.
/// In the interaction picture v(s) = e^{−is|ξ|²} f̂(ξ,s) is 2π-periodic and
/// is integrated from 0 termwise in its time Fourier series.
pub fn duhamel_coefficients(grid: GridSpec, f: &[Complex64]) -> Vec<Complex64> {
    let k = grid.k();
    let mut out = f.to_vec();
    out.par_chunks_mut(k).enumerate().for_each(|(s, col)| {
        if col.iter().all(|v| v.re == 0.0 && v.im == 0.0) {
            return;
        }
        let w = xi2(&xi_at(&grid, s));
        for (l, v) in col.iter_mut().enumerate() {
            *v *= Complex64::from_polar(1.0, -grid.time(l) * w);
        }
        fft_1d(col);
        let c0 = col[0] / k as f64;
        for (m, v) in col.iter_mut().enumerate() {
            let m = centered(m, k);
            *v = if m == 0 { Complex64::new(0.0, 0.0) } else { *v / (k as f64 * I * m as f64) };
        }
        // ifft_1d is unnormalized: Σ_m c_m e^{2πi m l / K}
        ifft_1d(col);
        let g0 = col[0];
        for (l, v) in col.iter_mut().enumerate() {
            let t = grid.time(l);
            let integral = c0 * t + *v - g0;
            *v = -I * Complex64::from_polar(1.0, t * w) * integral;
        }
    });
    out
}

pub fn duhamel(f: &SpaceTimeField) -> SpaceTimeField {
    let grid = *f.grid();
    spatial_inverse(grid, duhamel_coefficients(grid, &spatial_forward(f)))
}

/// Multiply space-time samples (time fastest) by χ(t).
pub fn apply_cutoff(grid: &GridSpec, values: &mut [Complex64], chi: &TimeCutoff) {
    let k = grid.k();
    let w: Vec<f64> = (0..k).map(|l| chi.value(grid.time(l))).collect();
    values.par_chunks_mut(k).for_each(|col| col.iter_mut().zip(&w).for_each(|(v, c)| *v *= c));
}

/// Per time sample, (Σ_ξ ⟨ξ⟩^{2s} |ĝ(ξ,t)|²)^{1/2}.
pub fn slice_hs(grid: &GridSpec, c: &[Complex64], s: f64) -> Vec<f64> {
    let k = grid.k();
    let mut acc = vec![0.0f64; k];
    for (sidx, col) in c.chunks_exact(k).enumerate() {
        let w = (1.0 + xi2(&xi_at(grid, sidx))).powf(s);
        for (a, v) in acc.iter_mut().zip(col) {
            *a += w * v.norm_sqr();
        }
    }
    acc.into_iter().map(f64::sqrt).collect()
}

/// sup_t ‖g(t)‖_{H^s}.
pub fn sup_hs(grid: &GridSpec, c: &[Complex64], s: f64) -> f64 {
    slice_hs(grid, c, s).into_iter().fold(0.0, f64::max)
}

/// (∫ ‖g(t)‖²_{H^s} dt)^{1/2} over the sampled period.
pub fn l2_hs(grid: &GridSpec, c: &[Complex64], s: f64) -> f64 {
    (slice_hs(grid, c, s).iter().map(|v| v * v).sum::<f64>() * TAU / grid.k() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{forward_transform, Freq};

    fn wave(grid: GridSpec, xi: [f64; 2], w: f64) -> SpaceTimeField {
        SpaceTimeField::from_fn(grid, |x, t| Complex64::from_polar(1.0, xi[0] * x[0] + xi[1] * x[1] + w * t))
    }

    #[test]
    fn free_waves_live_on_the_paraboloid() {
        let grid = GridSpec::new(2, 8, 32).unwrap();
        let g = SpatialField::from_fn(grid, |x| Complex64::from_polar(1.0, x[0] + 2.0 * x[1]));
        let u = linear_solution(&g, grid);
        let f = forward_transform(&u);
        let total = f.norm_l2();
        let at = f.get(&Freq::new(&[1, 2], 5)).norm();
        assert!((at - total).abs() < 1e-12 * total);
        assert!((linear_propagate(&g, 0.7).norm_l2() - g.norm_l2()).abs() < 1e-13);
        let direct = wave(grid, [1.0, 2.0], 5.0);
        let err = u.sub(&direct).unwrap().norm_l2();
        assert!(err < 1e-12);
    }

    #[test]
    fn duhamel_solves_the_inhomogeneous_equation() {
        let grid = GridSpec::new(2, 8, 64).unwrap();
        assert!(duhamel(&SpaceTimeField::zeros(grid)).norm_l2() == 0.0);
        // f = e^{i(x₁ + 3t)}: û = −i e^{it} ∫_0^t e^{2is} ds
        let f = wave(grid, [1.0, 0.0], 3.0);
        let u = duhamel(&f);
        let want = SpaceTimeField::from_fn(grid, |x, t| {
            let integral = (Complex64::from_polar(1.0, 2.0 * t) - 1.0) / (2.0 * I);
            -I * Complex64::from_polar(1.0, x[0] + t) * integral
        });
        assert!(u.sub(&want).unwrap().norm_l2() < 1e-12);
        // resonant forcing gives secular growth −i t e^{i(x₁+t)}
        let f = wave(grid, [1.0, 0.0], 1.0);
        let want = SpaceTimeField::from_fn(grid, |x, t| -I * t * Complex64::from_polar(1.0, x[0] + t));
        assert!(duhamel(&f).sub(&want).unwrap().norm_l2() < 1e-12);
        // vanishes at t = 0
        let c = coefficients(&duhamel(&wave(grid, [2.0, -1.0], -4.0)));
        assert!(c.chunks_exact(grid.k()).all(|col| col[0].norm() < 1e-15));
    }
}
