//! Grids, transforms, sparse spectra and the anisotropic frequency norm.

pub mod fft;
pub mod field;
pub mod grid;
pub mod io;
pub mod sparse;

use num_complex::Complex64;

pub use field::{
    forward_transform, inverse_transform, plane_wave_mode, product_factor, FrequencyField, SpaceTimeField,
    SpatialField,
};
pub use grid::{
    aniso_bracket, aniso_norm, bracket, conj_modulation_bracket, dot, modulation, modulation_bracket, Freq, GridSpec,
    MAX_DIM,
};
pub use sparse::{convolve, Spectrum};

use crate::error::Result;

/// All space-time modes sharing one spatial frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub xi: [i64; MAX_DIM],
    pub entries: Vec<(i64, Complex64)>,
}

impl Column {
    /// Samples of the column's time profile a(t_l), t_l = 2πl/K, where the
    /// physical field is e^{ix·ξ} a(t).
    pub fn time_series(&self, grid: &GridSpec) -> Vec<Complex64> {
        let k = grid.k();
        let mut buf = vec![Complex64::new(0.0, 0.0); k];
        for &(tau, v) in &self.entries {
            buf[tau.rem_euclid(k as i64) as usize] += v;
        }
        fft::ifft_1d(&mut buf);
        let c = 1.0 / plane_wave_mode(grid.n());
        for v in buf.iter_mut() {
            *v *= c;
        }
        buf
    }
}

/// Common interface of dense and sparse spectra.
pub trait Spectral: Clone + Send + Sync + Sized {
    fn grid(&self) -> &GridSpec;
    fn for_each_mode<F: FnMut(&Freq, Complex64)>(&self, f: F);
    fn map_weights<W: Fn(&Freq) -> f64>(&self, w: W) -> Self;
    /// Nonzero columns, sorted by spatial frequency.
    fn columns(&self) -> Vec<Column>;
    fn conj_field(&self) -> Self;
    fn zero_like(&self) -> Self;
    fn add_field(&self, other: &Self) -> Result<Self>;
    fn norm_l2(&self) -> f64;
}

impl Spectral for FrequencyField {
    fn grid(&self) -> &GridSpec {
        FrequencyField::grid(self)
    }

    fn for_each_mode<F: FnMut(&Freq, Complex64)>(&self, mut f: F) {
        let g = *FrequencyField::grid(self);
        let k = g.k();
        for (s, chunk) in self.values().chunks_exact(k).enumerate() {
            let mut xi = None;
            for (l, v) in chunk.iter().enumerate() {
                if v.re != 0.0 || v.im != 0.0 {
                    let xi = *xi.get_or_insert_with(|| g.spatial_freq_of(s));
                    f(&Freq { xi, tau: grid::centered(l, k) }, *v);
                }
            }
        }
    }

    fn map_weights<W: Fn(&Freq) -> f64>(&self, w: W) -> Self {
        FrequencyField::map_weights(self, w)
    }

    fn columns(&self) -> Vec<Column> {
        let g = *FrequencyField::grid(self);
        let k = g.k();
        let mut out = Vec::new();
        for (s, chunk) in self.values().chunks_exact(k).enumerate() {
            if chunk.iter().all(|v| v.re == 0.0 && v.im == 0.0) {
                continue;
            }
            let xi = g.spatial_freq_of(s);
            let mut entries: Vec<(i64, Complex64)> = chunk
                .iter()
                .enumerate()
                .filter(|(_, v)| v.re != 0.0 || v.im != 0.0)
                .map(|(l, v)| (grid::centered(l, k), *v))
                .collect();
            entries.sort_by_key(|e| e.0);
            out.push(Column { xi, entries });
        }
        out.sort_by(|a, b| a.xi.cmp(&b.xi));
        out
    }

    fn conj_field(&self) -> Self {
        FrequencyField::conj(self)
    }

    fn zero_like(&self) -> Self {
        FrequencyField::zeros(*FrequencyField::grid(self))
    }

    fn add_field(&self, other: &Self) -> Result<Self> {
        FrequencyField::add(self, other)
    }

    fn norm_l2(&self) -> f64 {
        FrequencyField::norm_l2(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_time_series_matches_inverse_transform() {
        let g = GridSpec::new(2, 8, 16).unwrap();
        let f = FrequencyField::from_fn(g, |p| {
            if p.xi == [1, -2, 0] {
                Complex64::new(p.tau as f64 * 0.1, 1.0 / (1.0 + p.tau.abs() as f64))
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let cols = Spectral::columns(&f);
        assert_eq!(cols.len(), 1);
        let a = cols[0].time_series(&g);
        let u = f.inverse();
        // at x = 0 the physical field equals a(t)
        for (l, v) in a.iter().enumerate() {
            assert!((u.values()[l] - v).norm() < 1e-12);
        }
    }
}
