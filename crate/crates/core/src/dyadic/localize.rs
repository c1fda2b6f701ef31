use serde::Serialize;

use super::cutoff::{cube_profile, s, s0};
use crate::error::{Error, Result};
use crate::spectral::{aniso_norm, modulation, Freq, FrequencyField, Spectral};

/// Modulation localization of a piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Band {
    All,
    Exact(u64),
    AtMost(u64),
    AtLeast(u64),
}

/// A field annotated with its dyadic localization.
#[derive(Clone, Debug)]
pub struct DyadicPiece<S = FrequencyField> {
    pub field: S,
    pub i: u32,
    pub band: Band,
    pub conjugate: bool,
}

/// Modulation values I_i = {1, 2, 4, ..., 2^{2i+2}}.
pub fn modulation_values(i: u32) -> Vec<u64> {
    (0..=2 * i + 2).map(|k| 1u64 << k).collect()
}

pub fn log2_exact(d: u64) -> Option<u32> {
    (d.is_power_of_two()).then(|| d.trailing_zeros())
}

pub fn annulus_weight(f: &Freq, n: usize, i: u32) -> f64 {
    s(i, aniso_norm(&f.xi[..n], f.tau))
}

/// s_{log₂ d}(|τ ∓ ξ²|).
pub fn modulation_weight(f: &Freq, d: u64, conjugate: bool) -> f64 {
    let k = log2_exact(d).expect("modulation value is a power of two");
    s(k, modulation(f, conjugate).unsigned_abs() as f64)
}

/// Σ_{d' ≤ d} s_{log₂ d'}(|m|) = s₀(|m|/d).
pub fn at_most_weight(f: &Freq, d: u64, conjugate: bool) -> f64 {
    s0(modulation(f, conjugate).unsigned_abs() as f64 / d as f64)
}

/// Weight of the near-paraboloid shell Σ_i s_i(|(ξ,τ)|) s₀(2^{-i}|τ ∓ ξ²|).
pub fn near_weight(f: &Freq, n: usize, conjugate: bool) -> f64 {
    let r = aniso_norm(&f.xi[..n], f.tau);
    let m = modulation(f, conjugate).unsigned_abs() as f64;
    let mut total = 0.0;
    let (mut all_in, mut all_out) = (true, true);
    for i in super::cutoff::active(r) {
        let f = s0(m / (1u64 << i) as f64);
        all_in &= f == 1.0;
        all_out &= f == 0.0;
        total += s(i, r) * f;
    }
    // the s_i sum to one, so keep the flat regions exact
    if all_in {
        1.0
    } else if all_out {
        0.0
    } else {
        total
    }
}

fn check_annulus<S: Spectral>(f: &S, i: u32) -> Result<()> {
    let cover = f.grid().i_cover();
    if i > cover {
        return Err(Error::OutOfRange(format!("annulus {i} beyond grid support (cover {cover})")));
    }
    Ok(())
}

/// S_i f.
pub fn annulus_project<S: Spectral>(f: &S, i: u32) -> Result<DyadicPiece<S>> {
    check_annulus(f, i)?;
    let n = f.grid().n();
    Ok(DyadicPiece { field: f.map_weights(|p| annulus_weight(p, n, i)), i, band: Band::All, conjugate: false })
}

fn check_modulation(p_i: u32, d: u64) -> Result<()> {
    if log2_exact(d).is_none_or(|k| k > 2 * p_i + 2) {
        return Err(Error::OutOfRange(format!("modulation {d} not in I_{p_i}")));
    }
    Ok(())
}

fn require_full_band<S>(p: &DyadicPiece<S>) -> Result<()> {
    if p.band != Band::All {
        return Err(Error::InvalidArgument("piece is already modulation-localized".into()));
    }
    Ok(())
}

/// S_{i,d} (or the barred version when `conjugate`).
pub fn modulation_project<S: Spectral>(p: &DyadicPiece<S>, d: u64, conjugate: bool) -> Result<DyadicPiece<S>> {
    require_full_band(p)?;
    check_modulation(p.i, d)?;
    Ok(DyadicPiece {
        field: p.field.map_weights(|q| modulation_weight(q, d, conjugate)),
        i: p.i,
        band: Band::Exact(d),
        conjugate,
    })
}

/// S_{i,≤d}.
pub fn at_most<S: Spectral>(p: &DyadicPiece<S>, d: u64, conjugate: bool) -> Result<DyadicPiece<S>> {
    require_full_band(p)?;
    check_modulation(p.i, d)?;
    Ok(DyadicPiece {
        field: p.field.map_weights(|q| at_most_weight(q, d, conjugate)),
        i: p.i,
        band: Band::AtMost(d),
        conjugate,
    })
}

/// S_{i,≥d} = S_i − S_{i,≤d}.
pub fn at_least<S: Spectral>(p: &DyadicPiece<S>, d: u64, conjugate: bool) -> Result<DyadicPiece<S>> {
    require_full_band(p)?;
    check_modulation(p.i, d)?;
    Ok(DyadicPiece {
        field: p.field.map_weights(|q| 1.0 - at_most_weight(q, d, conjugate)),
        i: p.i,
        band: Band::AtLeast(d),
        conjugate,
    })
}

/// f ↦ (f_{P≤1}, f_{P≥1}).
pub fn shell_split<S: Spectral>(f: &S) -> (S, S) {
    shell_split_with(f, false)
}

pub fn shell_split_with<S: Spectral>(f: &S, conjugate: bool) -> (S, S) {
    let n = f.grid().n();
    let near = f.map_weights(|p| near_weight(p, n, conjugate));
    let far = f.map_weights(|p| {
        let w = near_weight(p, n, conjugate);
        if w == 1.0 {
            0.0
        } else {
            1.0 - w
        }
    });
    (near, far)
}

/// Spatial-frequency localization to the unit cube at ξ.
pub fn cube_localize<S: Spectral>(f: &S, xi: &[i64]) -> Result<S> {
    let g = f.grid();
    let n = g.n();
    if xi.len() != n || xi.iter().any(|&x| x < g.xi_min() || x > g.xi_max()) {
        return Err(Error::OutOfRange(format!("cube centre {xi:?} outside grid")));
    }
    Ok(f.map_weights(|p| (0..n).map(|a| cube_profile((p.xi[a] - xi[a]) as f64)).product()))
}

/// One cube piece f_ξ, stored sparsely.
#[derive(Clone, Debug)]
pub struct CubePiece {
    pub xi: [i64; crate::spectral::MAX_DIM],
    pub modes: Vec<(Freq, num_complex::Complex64)>,
}

/// All nonzero cube pieces f_ξ. Each column contributes to the cubes whose
/// profile reaches it (offsets in {-1,0,1}ⁿ cover the profile support).
pub fn cube_decompose<S: Spectral>(f: &S) -> Vec<CubePiece> {
    let g = *f.grid();
    let n = g.n();
    let mut pieces: std::collections::BTreeMap<[i64; crate::spectral::MAX_DIM], Vec<(Freq, num_complex::Complex64)>> =
        Default::default();
    let offsets = 3usize.pow(n as u32);
    for col in f.columns() {
        for o in 0..offsets {
            let mut xi = col.xi;
            let mut rest = o;
            for a in 0..n {
                xi[a] += (rest % 3) as i64 - 1;
                rest /= 3;
            }
            if (0..n).any(|a| xi[a] < g.xi_min() || xi[a] > g.xi_max()) {
                continue;
            }
            let w: f64 = (0..n).map(|a| cube_profile((col.xi[a] - xi[a]) as f64)).product();
            if w == 0.0 {
                continue;
            }
            let entry = pieces.entry(xi).or_default();
            for &(tau, v) in &col.entries {
                entry.push((Freq { xi: col.xi, tau }, v * w));
            }
        }
    }
    pieces.into_iter().map(|(xi, modes)| CubePiece { xi, modes }).collect()
}

/// Euclidean distance from (ξ,τ) to P = {τ = |ξ|²} (or P̄ = {τ = −|ξ|²}).
pub fn dist_to_paraboloid(xi: &[f64], tau: f64, conjugate: bool) -> f64 {
    let tau = if conjugate { -tau } else { tau };
    let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    // Critical points of (ρ−r)² + (ρ²−τ)² along the ξ ray: 2ρ³ + (1−2τ)ρ − r = 0.
    let mut best = f64::INFINITY;
    for rho in cubic_real_roots(2.0, 0.0, 1.0 - 2.0 * tau, -r) {
        let d = ((rho - r).powi(2) + (rho * rho - tau).powi(2)).sqrt();
        best = best.min(d);
    }
    best
}

fn cubic_real_roots(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    // Depressed cubic t³ + pt + q with x = t − b/(3a).
    let p = (3.0 * a * c - b * b) / (3.0 * a * a);
    let q = (2.0 * b.powi(3) - 9.0 * a * b * c + 27.0 * a * a * d) / (27.0 * a.powi(3));
    let shift = -b / (3.0 * a);
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let mut roots = Vec::new();
    if disc > 0.0 {
        let sq = disc.sqrt();
        roots.push((-q / 2.0 + sq).cbrt() + (-q / 2.0 - sq).cbrt() + shift);
    } else if p == 0.0 {
        roots.push(shift);
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = ((3.0 * q) / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        for k in 0..3 {
            roots.push(m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift);
        }
    }
    // One Newton polish per root.
    roots
        .into_iter()
        .map(|x| {
            let f = ((a * x + b) * x + c) * x + d;
            let df = (3.0 * a * x + 2.0 * b) * x + c;
            if df.abs() > 1e-12 {
                x - f / df
            } else {
                x
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;
    use num_complex::Complex64;

    fn one(f: Freq, g: GridSpec) -> FrequencyField {
        FrequencyField::single_mode(g, f, Complex64::new(1.0, 0.0)).unwrap()
    }

    #[test]
    fn mode_on_paraboloid_is_d1() {
        let g = GridSpec::new(2, 64, 64).unwrap();
        let f = one(Freq::new(&[2, 1], 5), g);
        let piece = annulus_project(&f, 2).unwrap();
        for d in modulation_values(2) {
            let q = modulation_project(&piece, d, false).unwrap();
            let v = q.field.get(&Freq::new(&[2, 1], 5)).re;
            if d == 1 {
                assert_eq!(v, piece.field.get(&Freq::new(&[2, 1], 5)).re);
            } else {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn modulation_offset_lands_at_matching_d() {
        let g = GridSpec::new(1, 64, 256).unwrap();
        for k in 1..=5u32 {
            let p = Freq::new(&[3], 9 + (1 << k));
            for d in modulation_values(4) {
                let w = modulation_weight(&p, d, false);
                if d == 1 << k {
                    assert_eq!(w, 1.0);
                } else {
                    assert_eq!(w, 0.0);
                }
            }
            assert!(g.contains(&p));
        }
    }

    #[test]
    fn errors() {
        let g = GridSpec::new(2, 16, 16).unwrap();
        let f = FrequencyField::zeros(g);
        assert!(annulus_project(&f, g.i_cover() + 1).is_err());
        let p = annulus_project(&f, 1).unwrap();
        assert!(modulation_project(&p, 3, false).is_err());
        assert!(modulation_project(&p, 32, false).is_err());
        assert!(modulation_project(&p, 16, false).is_ok());
        let q = modulation_project(&p, 16, false).unwrap();
        assert!(modulation_project(&q, 16, false).is_err());
        assert!(cube_localize(&f, &[8, 0]).is_err());
    }

    #[test]
    fn low_support_stays_in_s0() {
        let g = GridSpec::new(2, 16, 16).unwrap();
        let f = one(Freq::new(&[0, 0], 1), g);
        let s0f = annulus_project(&f, 0).unwrap().field;
        assert_eq!(s0f, f);
        for i in 2..=g.i_cover() {
            assert_eq!(annulus_project(&f, i).unwrap().field.norm_l2(), 0.0);
        }
    }

    #[test]
    fn shell_examples() {
        let g = GridSpec::new(2, 32, 128).unwrap();
        let on_p = FrequencyField::from_fn(g, |p| {
            if p.tau == p.xi2() {
                Complex64::new(1.0 + p.xi[0] as f64, 0.5)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let (near, far) = shell_split(&on_p);
        assert_eq!(far.norm_l2(), 0.0);
        assert_eq!(near, on_p);
        // |(ξ,τ)| = 2^3 exactly and modulation 48 ≥ 2^{3+1}: only annulus 3 is active.
        let p = Freq::new(&[2, 2], 56);
        assert_eq!(aniso_norm(&p.xi[..2], p.tau), 8.0);
        let (near, _) = shell_split(&one(p, g));
        assert_eq!(near.norm_l2(), 0.0);
    }

    #[test]
    fn distance_examples() {
        assert!(dist_to_paraboloid(&[2.0], 4.0, false) < 1e-12);
        assert!(dist_to_paraboloid(&[2.0], -4.0, true) < 1e-12);
        // ξ = 0, τ = -1: nearest point is the vertex.
        assert!((dist_to_paraboloid(&[0.0, 0.0], -1.0, false) - 1.0).abs() < 1e-12);
        // ξ = 0, τ = 4: ρ² = τ − 1/2.
        let rho2 = 3.5f64;
        let expect = (rho2 + 0.25f64).sqrt();
        assert!((dist_to_paraboloid(&[0.0], 4.0, false) - expect).abs() < 1e-10);
    }
}
