//! The linear estimate ‖χ(e^{−itΔ}u₀ + D f)‖_{Z^s} ≤ C(‖u₀‖_{H^s} + ‖f‖_{W^s}).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::picard::SolverConfig;
use super::spectral_ops::{duhamel, linear_solution};
use crate::error::Result;
use crate::lab::estimates::{Sweep, SweepConfig};
use crate::norms::{w_norm, z_norm};
use crate::report::{EstimateConfig, EstimateReport};
use crate::sample::{localized, Family, Localization};
use crate::spectral::{forward_transform, inverse_transform, FrequencyField, GridSpec, SpatialField, Spectrum};

/// Entries below this fraction of the largest, and the τ = −K/2 row, are
/// dropped before the Z^s norm; the discarded mass is far below the sweep
/// tolerances.
const SPARSIFY: f64 = 1e-13;

/// Random spatial data with modes in ⟨ξ⟩ ≤ 2^{i+1}.
pub fn random_data<R: Rng>(grid: GridSpec, i: u32, rng: &mut R) -> SpatialField {
    let r = 1i64 << (i + 1);
    let mut c = vec![Complex64::new(0.0, 0.0); grid.spatial_len()];
    for (s, v) in c.iter_mut().enumerate() {
        let xi = grid.spatial_freq_of(s);
        let x2: i64 = xi.iter().map(|a| a * a).sum();
        if 1 + x2 <= r * r && rng.gen_bool(0.5) {
            *v = Complex64::from_polar(rng.gen_range(0.05..1.0), rng.gen_range(0.0..std::f64::consts::TAU));
        }
    }
    SpatialField::from_spectrum(grid, c).expect("sizes agree")
}

fn sparsified(f: &FrequencyField) -> Result<Spectrum> {
    let max = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let grid = *f.grid();
    Spectrum::from_modes(grid, f.iter().filter(|(p, v)| v.norm() > SPARSIFY * max && grid.contains_symmetric(p)))
}

/// Both sides for one pair (u₀, f), f given by its space-time spectrum.
pub fn le_sides(u0: &SpatialField, f: &Spectrum, grid: GridSpec, cfg: &SolverConfig) -> Result<(f64, f64)> {
    let chi = cfg.cutoff();
    let forcing = inverse_transform(&f.to_field());
    let u = linear_solution(u0, grid).add(&duhamel(&forcing))?;
    let cut = forward_transform(&u.mul_time(|t| chi.value(t)));
    let lhs = z_norm(&sparsified(&cut)?, cfg.s).total;
    let rhs = u0.hs_norm(cfg.s) + w_norm(f, cfg.s).total;
    Ok((lhs, rhs))
}

/// Sweep of the linear estimate on (2,16,128) and its doubling.
pub fn le_sweep(sc: &SweepConfig) -> Result<Sweep> {
    let base = GridSpec::new(2, 16, 128)?;
    let fine = base.doubled();
    let cfg = SolverConfig { s: sc.s, ..Default::default() };
    let parts: Vec<Result<(EstimateReport, EstimateReport)>> = (0..sc.samples)
        .into_par_iter()
        .map(|k| {
            let seed = sc.seed.wrapping_mul(1_000_003).wrapping_add(k as u64) ^ 0x6c65;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let i = rng.gen_range(0..=2u32);
            let j = rng.gen_range(0..=2u32);
            let family = Family::ALL[rng.gen_range(0..Family::ALL.len())];
            let loc = Localization::near(j, [0, 2, 8][rng.gen_range(0..3)], family);
            let f = localized(base, &loc, &mut rng)?.scale(Complex64::new(sc.scale, 0.0));
            let data = random_data(base, i, &mut rng).scale(Complex64::new(sc.scale, 0.0));
            let mut rows = Vec::new();
            for grid in [base, fine] {
                let u0 = SpatialField::from_spectrum(grid, rehost(&data, grid))?;
                let (lhs, rhs) = le_sides(&u0, &f.with_grid(grid)?, grid, &cfg)?;
                let c = EstimateConfig {
                    i: Some(i),
                    j: Some(j),
                    d2: Some(loc.max_mod as u64),
                    note: format!("s={};grid={}x{}", cfg.s, grid.m(), grid.k()),
                    ..Default::default()
                };
                rows.push(EstimateReport::new("le", c, lhs, rhs, family.name(), seed));
            }
            let fine_row = rows.pop().expect("two rows");
            Ok((rows.pop().expect("two rows"), fine_row))
        })
        .collect();
    let mut sweep = Sweep { id: "le".into(), ..Default::default() };
    for p in parts {
        let (b, f) = p?;
        sweep.base.push(b);
        sweep.fine.push(f);
    }
    Ok(sweep)
}

/// Spatial coefficients of `g` placed on a finer grid.
pub(crate) fn rehost(g: &SpatialField, grid: GridSpec) -> Vec<Complex64> {
    let from = *g.grid();
    let c = g.spectrum();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.spatial_len()];
    for (s, v) in c.iter().enumerate() {
        out[grid.spatial_index(&from.spatial_freq_of(s))] = *v;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_waves_and_zero_forcing() {
        let grid = GridSpec::new(2, 16, 128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u0 = random_data(grid, 1, &mut rng);
        let (lhs, rhs) = le_sides(&u0, &Spectrum::empty(grid), grid, &SolverConfig::default()).unwrap();
        assert!(lhs > 0.0 && rhs > 0.0 && lhs.is_finite());
        let z = SpatialField::zeros(grid);
        let (lhs, rhs) = le_sides(&z, &Spectrum::empty(grid), grid, &SolverConfig::default()).unwrap();
        assert_eq!((lhs, rhs), (0.0, 0.0));
    }

    #[test]
    fn rehosting_keeps_the_function() {
        let grid = GridSpec::new(2, 8, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = random_data(grid, 0, &mut rng);
        let fine = grid.doubled();
        let h = SpatialField::from_spectrum(fine, rehost(&g, fine)).unwrap();
        assert!((h.hs_norm(1.1) - g.hs_norm(1.1)).abs() < 1e-12);
        assert!((h.norm_l2() - g.norm_l2()).abs() < 1e-12);
    }
}
