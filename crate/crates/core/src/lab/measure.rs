//! Densities on the paraboloids τ = ±|ξ|² + c and their brute-force
//! convolution on the integer lattice.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sample::Family;
use crate::spectral::{aniso_norm, convolve, Freq, GridSpec, Spectral, Spectrum, MAX_DIM};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sheet {
    /// τ = |ξ|² + c
    P,
    /// τ = −|ξ|² + c
    PBar,
}

impl Sheet {
    pub const BOTH: [Sheet; 2] = [Sheet::P, Sheet::PBar];

    pub fn sign(&self) -> i64 {
        match self {
            Sheet::P => 1,
            Sheet::PBar => -1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Sheet::P => "P",
            Sheet::PBar => "Pbar",
        }
    }

    pub fn is_conjugate(&self) -> bool {
        *self == Sheet::PBar
    }
}

/// ⟨ξ⟩ = (1 + |ξ|²)^{1/2}.
pub fn spatial_bracket(xi: &[i64]) -> f64 {
    (1.0 + xi.iter().map(|v| (v * v) as f64).sum::<f64>()).sqrt()
}

/// 2^{i-1} ≤ ⟨ξ⟩ ≤ 2^{i+1}.
pub fn in_spatial_annulus(xi: &[i64], i: u32) -> bool {
    let b = spatial_bracket(xi);
    b >= (i as f64 - 1.0).exp2() && b <= (i as f64 + 1.0).exp2()
}

/// Surface-measure weight √(1 + 4|ξ|²).
pub fn surface_weight(xi: &[i64]) -> f64 {
    (1.0 + 4.0 * xi.iter().map(|v| (v * v) as f64).sum::<f64>()).sqrt()
}

/// A density f(ξ) carried by P_c or P̄_c, localized at ⟨ξ⟩ ≈ 2^i.
#[derive(Clone, Debug, PartialEq)]
pub struct ParaboloidMeasure {
    pub sheet: Sheet,
    pub c: f64,
    pub annulus: u32,
    n: usize,
    density: Vec<([i64; MAX_DIM], Complex64)>,
}

impl ParaboloidMeasure {
    /// Errors when a density point lies outside the annulus.
    pub fn new(n: usize, sheet: Sheet, c: f64, annulus: u32, density: Vec<([i64; MAX_DIM], Complex64)>) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&n) {
            return Err(Error::InvalidArgument(format!("dimension {n}")));
        }
        if !c.is_finite() {
            return Err(Error::InvalidArgument("offset must be finite".into()));
        }
        if let Some((xi, _)) = density.iter().find(|(xi, _)| !in_spatial_annulus(&xi[..n], annulus)) {
            return Err(Error::OutOfRange(format!("density point {:?} outside annulus {annulus}", &xi[..n])));
        }
        Ok(ParaboloidMeasure { sheet, c, annulus, n, density })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn density(&self) -> &[([i64; MAX_DIM], Complex64)] {
        &self.density
    }

    /// (Σ |f(ξ)|² √(1+4|ξ|²))^{1/2}, unit lattice spacing.
    pub fn l2_norm(&self) -> f64 {
        self.density.iter().map(|(xi, v)| v.norm_sqr() * surface_weight(&xi[..self.n])).sum::<f64>().sqrt()
    }

    pub fn with_density(&self, density: Vec<([i64; MAX_DIM], Complex64)>) -> Result<Self> {
        Self::new(self.n, self.sheet, self.c, self.annulus, density)
    }

    /// Largest |ξ| on the support.
    pub fn radius(&self) -> f64 {
        self.density
            .iter()
            .map(|(xi, _)| xi[..self.n].iter().map(|v| (v * v) as f64).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Masses f(ξ)√(1+4|ξ|²) at (ξ, ±|ξ|²), offset dropped.
    fn on_sheet(&self, grid: GridSpec) -> Result<Spectrum> {
        let s = self.sheet.sign();
        Spectrum::from_modes(
            grid,
            self.density.iter().map(|(xi, v)| {
                let x2: i64 = xi[..self.n].iter().map(|a| a * a).sum();
                (Freq { xi: *xi, tau: s * x2 }, v * surface_weight(&xi[..self.n]))
            }),
        )
    }
}

/// Convolution of two surface measures: f(ξ)g(η)√(1+4ξ²)√(1+4η²) deposited
/// at the lattice cell nearest to (ξ+η, ±ξ²+c₁ ±η²+c₂). Cells outside
/// `out` are a truncation error. The result is sparse because a dense grid
/// large enough for |ξ| ≈ 2^4 would not fit in memory.
pub fn measure_convolve(a: &ParaboloidMeasure, b: &ParaboloidMeasure, out: GridSpec) -> Result<Spectrum> {
    if a.n != b.n || out.n() != a.n {
        return Err(Error::Mismatch("measures of different dimension".into()));
    }
    // ξ², η² are integers, so nearest-cell rounding only sees the offsets
    let shift = (a.c + b.c).round() as i64;
    let wide = GridSpec::new(a.n, out.m().max(wide_m(a, b)), out.k().max(wide_k(a, b, shift)))?;
    let sa = a.on_sheet(wide)?;
    let sb = b.on_sheet(wide)?;
    let raw = convolve(&sa, &sb, |_, _| 1.0, wide)?;
    let modes: Vec<(Freq, Complex64)> =
        raw.modes().iter().map(|(f, v)| (Freq { xi: f.xi, tau: f.tau + shift }, *v)).collect();
    if let Some((f, _)) = modes.iter().find(|(f, _)| !out.contains_symmetric(f)) {
        return Err(Error::Truncation(format!("measure convolution reaches {f:?} outside {out:?}")));
    }
    Spectrum::from_modes(out, modes)
}

fn wide_m(a: &ParaboloidMeasure, b: &ParaboloidMeasure) -> usize {
    let r = (a.radius() + b.radius()).ceil() as usize;
    (2 * r + 2).next_power_of_two().max(8)
}

fn wide_k(a: &ParaboloidMeasure, b: &ParaboloidMeasure, shift: i64) -> usize {
    let t = (a.radius().powi(2) + b.radius().powi(2)).ceil() as usize + shift.unsigned_abs() as usize;
    (2 * t + 2).next_power_of_two().max(8)
}

/// Regions for restricted ℓ² norms. Boundaries are sharp.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Region {
    All,
    /// 2^{k-1} ≤ |(ξ,τ)| ≤ 2^{k+1}
    Annulus(u32),
    /// 2^{k-1} ≤ ⟨ξ⟩ ≤ 2^{k+1}
    SpatialAnnulus(u32),
    /// |(ξ,τ)| ≈ 2^j and |τ − |ξ|²| ≤ d
    NearP { j: u32, d: u64 },
}

impl Region {
    pub fn contains(&self, p: &Freq, n: usize) -> bool {
        let dyadic = |x: f64, k: u32| x >= (k as f64 - 1.0).exp2() && x <= (k as f64 + 1.0).exp2();
        match *self {
            Region::All => true,
            Region::Annulus(k) => {
                let r = aniso_norm(&p.xi[..n], p.tau);
                dyadic(r, k) || (k == 0 && r <= 2.0)
            }
            Region::SpatialAnnulus(k) => dyadic(spatial_bracket(&p.xi[..n]), k),
            Region::NearP { j, d } => {
                Region::Annulus(j).contains(p, n) && (p.tau - p.xi2()).unsigned_abs() <= d
            }
        }
    }
}

/// ℓ² mass of f over a region.
pub fn restricted_l2<S: Spectral>(f: &S, region: Region) -> f64 {
    let n = f.grid().n();
    let mut acc = 0.0;
    f.for_each_mode(|p, v| {
        if region.contains(p, n) {
            acc += v.norm_sqr();
        }
    });
    acc.sqrt()
}

/// Random nonnegative density on the spatial annulus i, at most `cap`
/// points, shaped by `family`.
pub fn random_density<R: Rng>(
    n: usize,
    sheet: Sheet,
    i: u32,
    family: Family,
    cap: usize,
    rng: &mut R,
) -> Result<ParaboloidMeasure> {
    let bound = (i as f64 + 1.0).exp2().floor() as i64;
    let span = 2 * bound + 1;
    let mut pts = Vec::new();
    let mut xi = [0i64; MAX_DIM];
    for c in 0..span.pow(n as u32) {
        let mut rest = c;
        for x in xi.iter_mut().take(n) {
            *x = rest % span - bound;
            rest /= span;
        }
        if in_spatial_annulus(&xi[..n], i) {
            pts.push(xi);
        }
    }
    if pts.is_empty() {
        return Err(Error::Inadmissible(format!("annulus {i} has no lattice points")));
    }
    let norm = |p: &[i64; MAX_DIM]| p[..n].iter().map(|v| (v * v) as f64).sum::<f64>().sqrt();
    match family {
        Family::Annulus => {}
        Family::Cap => {
            let anchor = pts[rng.gen_range(0..pts.len())];
            let ra = norm(&anchor);
            let kept: Vec<_> = pts
                .iter()
                .copied()
                .filter(|p| {
                    let rp = norm(p);
                    if ra == 0.0 || rp == 0.0 {
                        return true;
                    }
                    let c: f64 = (0..n).map(|a| (p[a] * anchor[a]) as f64).sum::<f64>() / (ra * rp);
                    c >= 0.5f64.cos()
                })
                .collect();
            pts = kept;
        }
        Family::Shell => {
            let r = norm(&pts[rng.gen_range(0..pts.len())]).floor();
            pts.retain(|p| norm(p).floor() == r);
        }
        Family::Point => {
            pts = vec![pts[rng.gen_range(0..pts.len())]];
        }
    }
    let keep = (cap as f64 / pts.len() as f64).min(1.0);
    let mut density = Vec::new();
    for p in &pts {
        if keep < 1.0 && !rng.gen_bool(keep) {
            continue;
        }
        density.push((*p, Complex64::new(rng.gen_range(0.05..1.0), 0.0)));
    }
    if density.is_empty() {
        density.push((pts[rng.gen_range(0..pts.len())], Complex64::new(1.0, 0.0)));
    }
    ParaboloidMeasure::new(n, sheet, 0.0, i, density)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(n: usize, sheet: Sheet, i: u32, xi: [i64; 3]) -> ParaboloidMeasure {
        ParaboloidMeasure::new(n, sheet, 0.0, i, vec![(xi, Complex64::new(1.0, 0.0))]).unwrap()
    }

    #[test]
    fn point_masses_meet_at_the_sum() {
        let g = GridSpec::new(2, 32, 256).unwrap();
        let a = point(2, Sheet::P, 2, [2, 1, 0]);
        let b = point(2, Sheet::P, 2, [-1, 3, 0]);
        let h = measure_convolve(&a, &b, g).unwrap();
        assert_eq!(h.len(), 1);
        let w = 21f64.sqrt() * 41f64.sqrt();
        assert!((h.get(&Freq::new(&[1, 4], 15)).re - w).abs() < 1e-12);
        let bb = point(2, Sheet::PBar, 2, [-2, -1, 0]);
        let h = measure_convolve(&a, &bb, g).unwrap();
        assert_eq!(h.modes()[0].0, Freq::new(&[0, 0], 0));
    }

    #[test]
    fn norm_and_support_checks() {
        let m = ParaboloidMeasure::new(1, Sheet::P, 0.0, 1, vec![([1, 0, 0], Complex64::new(2.0, 0.0))]).unwrap();
        assert!((m.l2_norm() - 2.0 * 5f64.powf(0.25)).abs() < 1e-12);
        assert!(ParaboloidMeasure::new(1, Sheet::P, 0.0, 0, vec![([5, 0, 0], Complex64::new(1.0, 0.0))]).is_err());
    }

    #[test]
    fn offsets_round_to_the_nearest_cell_and_truncation_errors() {
        let g = GridSpec::new(1, 16, 16).unwrap();
        let mut a = point(1, Sheet::P, 1, [1, 0, 0]);
        a.c = 0.6;
        let b = point(1, Sheet::P, 1, [1, 0, 0]);
        assert_eq!(measure_convolve(&a, &b, g).unwrap().modes()[0].0, Freq::new(&[2], 3));
        let far = point(1, Sheet::P, 3, [6, 0, 0]);
        assert!(matches!(measure_convolve(&far, &far, g), Err(Error::Truncation(_))));
    }

    #[test]
    fn regions() {
        let g = GridSpec::new(2, 32, 256).unwrap();
        let on_p = Spectrum::from_modes(g, [(Freq::new(&[3, 0], 9), Complex64::new(1.0, 0.0))]).unwrap();
        assert_eq!(restricted_l2(&on_p, Region::All), 1.0);
        assert_eq!(restricted_l2(&on_p, Region::NearP { j: 3, d: 1 }), 1.0);
        assert_eq!(restricted_l2(&on_p, Region::SpatialAnnulus(5)), 0.0);
    }
}
