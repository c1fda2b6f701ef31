use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftDirection;

use super::fft::fft_axes;
use super::grid::{Freq, GridSpec, MAX_DIM};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// (2π)^{(n+1)/2}: value of a unit-amplitude plane wave's single mode.
pub fn plane_wave_mode(n: usize) -> f64 {
    (2.0 * PI).powf((n as f64 + 1.0) / 2.0)
}

/// Factor c in F(uv) = c · (F(u) * F(v)) for space-time products.
pub fn product_factor(n: usize) -> f64 {
    1.0 / plane_wave_mode(n)
}

fn check_same(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a != b {
        return Err(Error::Mismatch(format!("{a:?} vs {b:?}")));
    }
    Ok(())
}

/// Physical samples u(x_j, t_l), x_j = 2πj/M per axis, t_l = 2πl/K.
/// Row-major over (x_1..x_n, t) with time fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl SpaceTimeField {
    pub fn zeros(grid: GridSpec) -> Self {
        SpaceTimeField { grid, values: vec![ZERO; grid.len()] }
    }

    pub fn from_values(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Mismatch(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(SpaceTimeField { grid, values })
    }

    /// Sample a function of (x, t); t is centred into [-π, π).
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64], f64) -> Complex64) -> Self {
        let k = grid.k();
        let mut values = Vec::with_capacity(grid.len());
        let mut x = [0.0; MAX_DIM];
        for s in 0..grid.spatial_len() {
            spatial_point(&grid, s, &mut x);
            for l in 0..k {
                values.push(f(&x[..grid.n()], grid.time(l)));
            }
        }
        SpaceTimeField { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Continuum L² norm by grid quadrature.
    pub fn norm_l2(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn forward(&self) -> FrequencyField {
        forward_transform(self)
    }

    pub fn mul(&self, other: &SpaceTimeField) -> Result<SpaceTimeField> {
        check_same(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(SpaceTimeField { grid: self.grid, values })
    }

    /// Multiply every time slice by a(t).
    pub fn mul_time(&self, a: impl Fn(f64) -> f64) -> SpaceTimeField {
        let k = self.grid.k();
        let w: Vec<f64> = (0..k).map(|l| a(self.grid.time(l))).collect();
        let values = self.values.iter().enumerate().map(|(i, v)| v * w[i % k]).collect();
        SpaceTimeField { grid: self.grid, values }
    }

    pub fn conj(&self) -> SpaceTimeField {
        SpaceTimeField { grid: self.grid, values: self.values.iter().map(|v| v.conj()).collect() }
    }

    pub fn scale(&self, c: Complex64) -> SpaceTimeField {
        SpaceTimeField { grid: self.grid, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn add(&self, other: &SpaceTimeField) -> Result<SpaceTimeField> {
        check_same(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(SpaceTimeField { grid: self.grid, values })
    }

    pub fn sub(&self, other: &SpaceTimeField) -> Result<SpaceTimeField> {
        check_same(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(SpaceTimeField { grid: self.grid, values })
    }

    /// Spatial slice at time sample `l`.
    pub fn slice(&self, l: usize) -> SpatialField {
        let k = self.grid.k();
        let values = (0..self.grid.spatial_len()).map(|s| self.values[s * k + l]).collect();
        SpatialField { grid: self.grid, values }
    }

    pub fn set_slice(&mut self, l: usize, slice: &SpatialField) {
        let k = self.grid.k();
        for (s, v) in slice.values.iter().enumerate() {
            self.values[s * k + l] = *v;
        }
    }
}

pub(crate) fn spatial_point(grid: &GridSpec, sindex: usize, x: &mut [f64; MAX_DIM]) {
    let mut rest = sindex;
    for a in (0..grid.n()).rev() {
        x[a] = (rest % grid.m()) as f64 * grid.dx();
        rest /= grid.m();
    }
}

/// Space-time Fourier coefficients û(ξ,τ) on the integer lattice, scaled so the
/// lattice ℓ² norm equals the continuum L² norm of the physical samples.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl FrequencyField {
    pub fn zeros(grid: GridSpec) -> Self {
        FrequencyField { grid, values: vec![ZERO; grid.len()] }
    }

    pub fn from_values(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Mismatch(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(FrequencyField { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(&Freq) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.freq_of(i))).collect();
        FrequencyField { grid, values }
    }

    pub fn single_mode(grid: GridSpec, at: Freq, value: Complex64) -> Result<Self> {
        let mut f = FrequencyField::zeros(grid);
        f.set(&at, value)?;
        Ok(f)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn get(&self, at: &Freq) -> Complex64 {
        self.grid.index(at).map_or(ZERO, |i| self.values[i])
    }

    pub fn set(&mut self, at: &Freq, value: Complex64) -> Result<()> {
        let i = self
            .grid
            .index(at)
            .ok_or_else(|| Error::OutOfRange(format!("{at:?} outside {:?}", self.grid)))?;
        self.values[i] = value;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (Freq, Complex64)> + '_ {
        self.values.iter().enumerate().map(move |(i, v)| (self.grid.freq_of(i), *v))
    }

    pub fn norm_l2(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inverse(&self) -> SpaceTimeField {
        inverse_transform(self)
    }

    /// Transform of the complex conjugate: F(ū)(ξ,τ) = conj F(u)(-ξ,-τ),
    /// with periodic wrapping of the unpaired edge rows.
    pub fn conj(&self) -> FrequencyField {
        let mut out = FrequencyField::zeros(self.grid);
        for (i, v) in self.values.iter().enumerate() {
            let f = self.grid.freq_of(i);
            out.values[self.grid.index_wrapped(&f.neg())] = v.conj();
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> FrequencyField {
        FrequencyField { grid: self.grid, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn add(&self, other: &FrequencyField) -> Result<FrequencyField> {
        check_same(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(FrequencyField { grid: self.grid, values })
    }

    pub fn add_assign(&mut self, other: &FrequencyField) -> Result<()> {
        check_same(&self.grid, &other.grid)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
        Ok(())
    }

    pub fn sub(&self, other: &FrequencyField) -> Result<FrequencyField> {
        check_same(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(FrequencyField { grid: self.grid, values })
    }

    pub fn map_weights(&self, w: impl Fn(&Freq) -> f64) -> FrequencyField {
        let k = self.grid.k();
        let mut values = vec![ZERO; self.values.len()];
        for (s, (src, dst)) in self.values.chunks_exact(k).zip(values.chunks_exact_mut(k)).enumerate() {
            if src.iter().all(|v| *v == ZERO) {
                continue;
            }
            let mut p = Freq { xi: self.grid.spatial_freq_of(s), tau: 0 };
            for (l, (a, b)) in src.iter().zip(dst.iter_mut()).enumerate() {
                if *a != ZERO {
                    p.tau = super::grid::centered(l, k);
                    *b = a * w(&p);
                }
            }
        }
        FrequencyField { grid: self.grid, values }
    }

    /// Relative ℓ² distance ‖self − other‖ / max(‖other‖, tiny).
    pub fn rel_err(&self, other: &FrequencyField) -> f64 {
        let num: f64 =
            self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>();
        let den = other.norm_l2().max(1e-300);
        num.sqrt() / den
    }
}

/// Unitary space-time transform.
pub fn forward_transform(u: &SpaceTimeField) -> FrequencyField {
    let grid = *u.grid();
    let mut values = u.values.clone();
    let shape = grid.shape();
    let axes: Vec<usize> = (0..shape.len()).collect();
    fft_axes(&mut values, &shape, &axes, FftDirection::Forward);
    let c = plane_wave_mode(grid.n()) / grid.len() as f64;
    for v in values.iter_mut() {
        *v *= c;
    }
    FrequencyField { grid, values }
}

pub fn inverse_transform(f: &FrequencyField) -> SpaceTimeField {
    let grid = *f.grid();
    let mut values = f.values.clone();
    let shape = grid.shape();
    let axes: Vec<usize> = (0..shape.len()).collect();
    fft_axes(&mut values, &shape, &axes, FftDirection::Inverse);
    let c = 1.0 / plane_wave_mode(grid.n());
    for v in values.iter_mut() {
        *v *= c;
    }
    SpaceTimeField { grid, values }
}

/// Transform over the spatial axes only, for every time slice. Output keeps
/// time samples along the last axis: values ĝ(ξ, t_l).
pub fn spatial_forward(u: &SpaceTimeField) -> Vec<Complex64> {
    let grid = *u.grid();
    let mut values = u.values.clone();
    let axes: Vec<usize> = (0..grid.n()).collect();
    fft_axes(&mut values, &grid.shape(), &axes, FftDirection::Forward);
    let c = (2.0 * PI).powf(grid.n() as f64 / 2.0) / grid.spatial_len() as f64;
    for v in values.iter_mut() {
        *v *= c;
    }
    values
}

pub fn spatial_inverse(grid: GridSpec, mut values: Vec<Complex64>) -> SpaceTimeField {
    let axes: Vec<usize> = (0..grid.n()).collect();
    fft_axes(&mut values, &grid.shape(), &axes, FftDirection::Inverse);
    let c = (2.0 * PI).powf(-(grid.n() as f64) / 2.0);
    for v in values.iter_mut() {
        *v *= c;
    }
    SpaceTimeField { grid, values }
}

/// A function on the spatial torus, sampled on the M^n grid of `grid`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl SpatialField {
    pub fn zeros(grid: GridSpec) -> Self {
        SpatialField { grid, values: vec![ZERO; grid.spatial_len()] }
    }

    pub fn from_values(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.spatial_len() {
            return Err(Error::Mismatch(format!(
                "expected {} samples, got {}",
                grid.spatial_len(),
                values.len()
            )));
        }
        Ok(SpatialField { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let mut x = [0.0; MAX_DIM];
        let values = (0..grid.spatial_len())
            .map(|s| {
                spatial_point(&grid, s, &mut x);
                f(&x[..grid.n()])
            })
            .collect();
        SpatialField { grid, values }
    }

    /// Build from spatial Fourier coefficients (same normalization as `spectrum`).
    pub fn from_spectrum(grid: GridSpec, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.spatial_len() {
            return Err(Error::Mismatch("spectrum length".into()));
        }
        let shape = vec![grid.m(); grid.n()];
        let axes: Vec<usize> = (0..grid.n()).collect();
        fft_axes(&mut coeffs, &shape, &axes, FftDirection::Inverse);
        let c = (2.0 * PI).powf(-(grid.n() as f64) / 2.0);
        for v in coeffs.iter_mut() {
            *v *= c;
        }
        Ok(SpatialField { grid, values: coeffs })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Unitary spatial Fourier coefficients ĝ(ξ) in FFT order.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut v = self.values.clone();
        let shape = vec![self.grid.m(); self.grid.n()];
        let axes: Vec<usize> = (0..self.grid.n()).collect();
        fft_axes(&mut v, &shape, &axes, FftDirection::Forward);
        let c = (2.0 * PI).powf(self.grid.n() as f64 / 2.0) / self.grid.spatial_len() as f64;
        for x in v.iter_mut() {
            *x *= c;
        }
        v
    }

    pub fn norm_l2(&self) -> f64 {
        let dv = self.grid.dx().powi(self.grid.n() as i32);
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dv).sqrt()
    }

    /// (Σ ⟨ξ⟩^{2s} |ĝ(ξ)|²)^{1/2}.
    pub fn hs_norm(&self, s: f64) -> f64 {
        hs_norm_of_spectrum(&self.grid, &self.spectrum(), s)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> SpatialField {
        SpatialField { grid: self.grid, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn add(&self, other: &SpatialField) -> Result<SpatialField> {
        check_same(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(SpatialField { grid: self.grid, values })
    }

    pub fn sub(&self, other: &SpatialField) -> Result<SpatialField> {
        check_same(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(SpatialField { grid: self.grid, values })
    }
}

pub fn hs_norm_of_spectrum(grid: &GridSpec, coeffs: &[Complex64], s: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let xi = grid.spatial_freq_of(i);
            let x2: i64 = xi.iter().map(|a| a * a).sum();
            (1.0 + x2 as f64).powf(s) * v.norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}
