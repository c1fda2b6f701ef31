//! Seeded random fields: dense noise and sparse fields localized near a
//! paraboloid in a given dyadic annulus.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{aniso_norm, Freq, FrequencyField, GridSpec, Spectrum, MAX_DIM};

/// Shape of the support inside the localized region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Every admissible point.
    Annulus,
    /// Directions within a random cap of half-angle 1/2.
    Cap,
    /// One fixed modulation offset.
    Shell,
    /// A single point.
    Point,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Annulus, Family::Cap, Family::Shell, Family::Point];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Annulus => "annulus",
            Family::Cap => "cap",
            Family::Shell => "shell",
            Family::Point => "point",
        }
    }
}

/// Where a localized field lives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Localization {
    /// Dyadic annulus in the anisotropic norm.
    pub i: u32,
    /// Largest |τ ∓ ξ²| allowed.
    pub max_mod: i64,
    pub conjugate: bool,
    pub family: Family,
    /// Real nonnegative amplitudes instead of random phases.
    pub nonnegative: bool,
}

impl Localization {
    pub fn near(i: u32, max_mod: i64, family: Family) -> Self {
        Localization { i, max_mod, conjugate: false, family, nonnegative: false }
    }
}

/// Cap on the number of sampled points, to keep sweeps lean.
pub const MAX_POINTS: usize = 1000;

/// Uniform complex noise in the unit square on every grid point.
pub fn dense_noise<R: Rng>(grid: GridSpec, rng: &mut R) -> FrequencyField {
    let v = (0..grid.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    FrequencyField::from_values(grid, v).expect("length matches grid")
}

/// Annulus membership |(ξ,τ)| ∈ (2^{i-1}, 2^{i+1}), or < 2 for i = 0.
pub fn in_annulus(xi: &[i64], tau: i64, i: u32) -> bool {
    let r = aniso_norm(xi, tau);
    if i == 0 {
        r < 2.0
    } else {
        r > (1u64 << (i - 1)) as f64 && r < (1u64 << (i + 1)) as f64
    }
}

/// All lattice points of the localization region that fit on the grid.
pub fn region_points(grid: &GridSpec, loc: &Localization) -> Vec<Freq> {
    let n = grid.n();
    let bound = 1i64 << (loc.i + 1);
    let xr = bound.min(grid.xi_max());
    let mut out = Vec::new();
    let mut xi = [0i64; MAX_DIM];
    let span = (2 * xr + 1) as usize;
    let total = span.pow(n as u32);
    for c in 0..total {
        let mut rest = c;
        for a in 0..n {
            xi[a] = (rest % span) as i64 - xr;
            rest /= span;
        }
        let x2: i64 = xi[..n].iter().map(|v| v * v).sum();
        let base = if loc.conjugate { -x2 } else { x2 };
        for k in -loc.max_mod..=loc.max_mod {
            let f = Freq { xi, tau: base + k };
            if grid.contains_symmetric(&f) && in_annulus(&xi[..n], f.tau, loc.i) {
                out.push(f);
            }
        }
    }
    out
}

/// Sparse random field on the localization region. Errors when the region
/// has no points on this grid.
pub fn localized<R: Rng>(grid: GridSpec, loc: &Localization, rng: &mut R) -> Result<Spectrum> {
    let n = grid.n();
    let mut pts = region_points(&grid, loc);
    if pts.is_empty() {
        return Err(Error::Inadmissible(format!("no lattice points for {loc:?} on {grid:?}")));
    }
    match loc.family {
        Family::Annulus => {}
        Family::Cap => {
            let dir = random_direction(n, rng);
            let kept: Vec<Freq> = pts
                .iter()
                .copied()
                .filter(|p| {
                    let r = p.xi2() as f64;
                    r == 0.0 || {
                        let c: f64 = (0..n).map(|a| p.xi[a] as f64 * dir[a]).sum::<f64>() / r.sqrt();
                        c >= 0.5f64.cos()
                    }
                })
                .collect();
            if !kept.is_empty() {
                pts = kept;
            }
        }
        Family::Shell => {
            let k = rng.gen_range(-loc.max_mod..=loc.max_mod);
            let kept: Vec<Freq> =
                pts.iter().copied().filter(|p| crate::spectral::modulation(p, loc.conjugate) == k).collect();
            if !kept.is_empty() {
                pts = kept;
            }
        }
        Family::Point => {
            let p = pts[rng.gen_range(0..pts.len())];
            pts = vec![p];
        }
    }
    let keep = (MAX_POINTS as f64 / pts.len() as f64).min(1.0);
    let mut modes: Vec<(Freq, Complex64)> = Vec::new();
    for p in &pts {
        if keep < 1.0 && !rng.gen_bool(keep) {
            continue;
        }
        modes.push((*p, amplitude(loc.nonnegative, rng)));
    }
    if modes.is_empty() {
        let p = pts[rng.gen_range(0..pts.len())];
        modes.push((p, amplitude(loc.nonnegative, rng)));
    }
    Spectrum::from_modes(grid, modes)
}

fn amplitude<R: Rng>(nonnegative: bool, rng: &mut R) -> Complex64 {
    let r: f64 = rng.gen_range(0.05..1.0);
    if nonnegative {
        Complex64::new(r, 0.0)
    } else {
        Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
    }
}

fn random_direction<R: Rng>(n: usize, rng: &mut R) -> [f64; MAX_DIM] {
    loop {
        let mut d = [0.0; MAX_DIM];
        for v in d.iter_mut().take(n) {
            *v = rng.gen_range(-1.0..1.0);
        }
        let r: f64 = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r > 1e-3 && r <= 1.0 {
            for v in d.iter_mut() {
                *v /= r;
            }
            return d;
        }
    }
}
