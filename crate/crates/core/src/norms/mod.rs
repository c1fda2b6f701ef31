//! Computable H^s, X^{s,b}, X^{s,±1/2,p}, Y^s, 𝒴^s, W^s and Z^s norms, with a
//! per-summand breakdown.
//!
//! Barred norms are the unbarred norm of the conjugate field, so
//! ‖ū‖_{X̄} = ‖u‖_X holds exactly.

pub mod breakdown;
pub mod embed;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use breakdown::{lp, Aggregation, Key, NormBreakdown};

use crate::dyadic::cutoff::{active, s as cutoff};
use crate::dyadic::{annulus_project, column_tube_norms, modulation_project, modulation_values, shell_split, TimeCutoff};
use crate::error::{Error, Result};
use crate::report::{EstimateConfig, EstimateReport};
use crate::spectral::{aniso_bracket, aniso_norm, bracket, modulation, plane_wave_mode, FrequencyField, Spectral};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// sup_t ‖u(t)‖_{H^s}
    Hs,
    Xsb,
    /// X^{s,1/2,p}
    XsHalfPlus,
    /// X^{s,-1/2,p}
    XsHalfMinus,
    Y,
    ScriptY,
    W,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceTag {
    pub family: Family,
    pub s: f64,
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub conjugate: bool,
}

impl SpaceTag {
    pub fn new(family: Family, s: f64) -> Self {
        SpaceTag { family, s, b: None, p: None, conjugate: false }
    }

    pub fn xsb(s: f64, b: f64) -> Self {
        SpaceTag { b: Some(b), ..SpaceTag::new(Family::Xsb, s) }
    }

    pub fn xshalf(s: f64, plus: bool, p: f64) -> Self {
        let fam = if plus { Family::XsHalfPlus } else { Family::XsHalfMinus };
        SpaceTag { p: Some(p), ..SpaceTag::new(fam, s) }
    }

    pub fn conj(self) -> Self {
        SpaceTag { conjugate: !self.conjugate, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let half = matches!(self.family, Family::XsHalfPlus | Family::XsHalfMinus);
        match (self.family == Family::Xsb, self.b) {
            (true, None) => return Err(Error::InvalidArgument("X^{s,b} needs b".into())),
            (false, Some(_)) => return Err(Error::InvalidArgument("b is only used by X^{s,b}".into())),
            _ => {}
        }
        match (half, self.p) {
            (true, None) => return Err(Error::InvalidArgument("X^{s,±1/2,p} needs p".into())),
            (true, Some(p)) if p < 1.0 || p.is_nan() => {
                return Err(Error::InvalidArgument(format!("p = {p} is below 1")))
            }
            (false, Some(_)) => return Err(Error::InvalidArgument("p is only used by X^{s,±1/2,p}".into())),
            _ => {}
        }
        if !self.s.is_finite() {
            return Err(Error::InvalidArgument("s must be finite".into()));
        }
        Ok(())
    }
}

/// Evaluate the norm named by `tag`.
pub fn norm<S: Spectral>(f: &S, tag: &SpaceTag) -> Result<NormBreakdown> {
    tag.validate()?;
    if tag.conjugate {
        return norm(&f.conj_field(), &SpaceTag { conjugate: false, ..*tag });
    }
    let s = tag.s;
    Ok(match tag.family {
        Family::Hs => hs_norm(f, s),
        Family::Xsb => xsb_norm(f, s, tag.b.unwrap_or(0.0), false),
        Family::XsHalfPlus => xshalf_p_norm(f, s, true, tag.p.unwrap_or(1.0), false),
        Family::XsHalfMinus => xshalf_p_norm(f, s, false, tag.p.unwrap_or(1.0), false),
        Family::Y => y_norm(f, s),
        Family::ScriptY => scripty_norm(f, s),
        Family::W => w_norm(f, s),
        Family::Z => z_norm(f, s),
    })
}

fn spatial_bracket(xi: &[i64]) -> f64 {
    let x2: i64 = xi.iter().map(|v| v * v).sum();
    (1.0 + x2 as f64).sqrt()
}

/// sup over time samples of ‖u(t)‖_{H^s_x}; contributions keyed by sample.
pub fn hs_norm<S: Spectral>(f: &S, s: f64) -> NormBreakdown {
    let g = *f.grid();
    let n = g.n();
    let vol = (2.0 * std::f64::consts::PI).powi(n as i32);
    let mut acc = vec![0.0f64; g.k()];
    for col in f.columns() {
        let w = spatial_bracket(&col.xi[..n]).powf(2.0 * s) * vol;
        for (l, a) in col.time_series(&g).iter().enumerate() {
            acc[l] += w * a.norm_sqr();
        }
    }
    let contributions = acc.into_iter().enumerate().map(|(l, v)| (Key::Time(l), v.sqrt())).collect();
    NormBreakdown::new(contributions, Aggregation::Max)
}

/// Dyadic shell of the anisotropic norm used to key contributions.
fn shell_of(r: f64) -> u32 {
    if r < 2.0 {
        0
    } else {
        r.log2().floor() as u32
    }
}

/// ‖⟨(ξ,τ)⟩^s ⟨τ∓ξ²⟩^b f‖_{ℓ²}, keyed by dyadic shell of |(ξ,τ)|.
pub fn xsb_norm<S: Spectral>(f: &S, s: f64, b: f64, conjugate: bool) -> NormBreakdown {
    let n = f.grid().n();
    let mut acc: BTreeMap<u32, f64> = BTreeMap::new();
    f.for_each_mode(|p, v| {
        let w = aniso_bracket(&p.xi[..n], p.tau).powf(s) * bracket(modulation(p, conjugate) as f64).powf(b);
        *acc.entry(shell_of(aniso_norm(&p.xi[..n], p.tau))).or_insert(0.0) += (w * v.norm()).powi(2);
    });
    let contributions = acc.into_iter().map(|(i, v)| (Key::Annulus(i), v.sqrt())).collect();
    NormBreakdown::new(contributions, Aggregation::L2)
}

/// ‖f_{i,d}‖_{X^{0,b}} for every nonzero block, f_{i,d} = S_{i,d} f.
pub fn block_norms<S: Spectral>(f: &S, b: f64, conjugate: bool) -> BTreeMap<(u32, u64), f64> {
    let n = f.grid().n();
    let mut acc: BTreeMap<(u32, u64), f64> = BTreeMap::new();
    f.for_each_mode(|p, v| {
        let r = aniso_norm(&p.xi[..n], p.tau);
        let m = modulation(p, conjugate);
        let mabs = m.unsigned_abs() as f64;
        let base = v.norm_sqr() * bracket(m as f64).powf(2.0 * b);
        for i in active(r) {
            let wi = cutoff(i, r);
            for k in active(mabs).filter(|&k| k <= 2 * i + 2) {
                let w = wi * cutoff(k, mabs);
                if w != 0.0 {
                    *acc.entry((i, 1u64 << k)).or_insert(0.0) += w * w * base;
                }
            }
        }
    });
    acc.into_iter().map(|(k, v)| (k, v.sqrt())).collect()
}

/// X^{s,±1/2,p}: ℓ^p over d of ‖f_{i,d}‖_{X^{0,±1/2}}, then the 2^{is}
/// weighted ℓ² over i.
pub fn xshalf_p_norm<S: Spectral>(f: &S, s: f64, plus: bool, p: f64, conjugate: bool) -> NormBreakdown {
    let b = if plus { 0.5 } else { -0.5 };
    let contributions = block_norms(f, b, conjugate).into_iter().map(|((i, d), v)| (Key::Block { i, d }, v)).collect();
    NormBreakdown::new(contributions, Aggregation::DyadicLp { s, p })
}

fn tube_norm<S: Spectral>(f: &S, s: f64, script: bool) -> NormBreakdown {
    let g = *f.grid();
    let n = g.n();
    let contributions: Vec<(Key, f64)> = f
        .columns()
        .par_iter()
        .map(|col| {
            let t = column_tube_norms(&g, &col.xi, &col.time_series(&g));
            let v = if script { t.scripty } else { t.y };
            (Key::Column(col.xi), spatial_bracket(&col.xi[..n]).powf(s) * v)
        })
        .collect();
    NormBreakdown::new(contributions, Aggregation::L2)
}

/// Y^s: ⟨ξ⟩^s-weighted ℓ² over ξ of the tube norms ‖f_ξ‖_{Y_ξ}. On the lattice
/// the cube piece f_ξ is exactly the ξ column.
pub fn y_norm<S: Spectral>(f: &S, s: f64) -> NormBreakdown {
    tube_norm(f, s, false)
}

/// 𝒴^s, as `y_norm` with L¹_t L²_x on each tube.
pub fn scripty_norm<S: Spectral>(f: &S, s: f64) -> NormBreakdown {
    tube_norm(f, s, true)
}

fn negate<S: Spectral>(f: &S) -> S {
    f.map_weights(|_| -1.0)
}

/// Value of one candidate split of the near part: ‖f₁‖_{𝒴^s} + ‖f₂‖_{X^{s,-1/2,1}}.
pub fn split_cost<S: Spectral>(f1: &S, f2: &S, s: f64) -> f64 {
    scripty_norm(f1, s).total + xshalf_p_norm(f2, s, false, 1.0, false).total
}

/// Candidate values of the near-part infimum: the two trivial splits, the
/// greedy per-block split, then `f₁ = g, f₂ = near − g` for each extra g.
pub fn w_candidates<S: Spectral>(near: &S, s: f64, extra: &[S]) -> Result<Vec<(String, f64)>> {
    let zero = near.zero_like();
    let mut out = vec![
        ("all-scripty".to_string(), split_cost(near, &zero, s)),
        ("all-x".to_string(), split_cost(&zero, near, s)),
    ];
    let g = near.grid();
    let mut f1 = near.zero_like();
    let mut f2 = near.zero_like();
    for i in 0..=g.i_cover() {
        let a = annulus_project(near, i)?;
        if a.field.norm_l2() == 0.0 {
            continue;
        }
        for d in modulation_values(i) {
            let blk = modulation_project(&a, d, false)?.field;
            if blk.norm_l2() == 0.0 {
                continue;
            }
            if scripty_norm(&blk, s).total <= xshalf_p_norm(&blk, s, false, 1.0, false).total {
                f1 = f1.add_field(&blk)?;
            } else {
                f2 = f2.add_field(&blk)?;
            }
        }
    }
    out.push(("greedy".to_string(), split_cost(&f1, &f2, s)));
    for (k, e) in extra.iter().enumerate() {
        let rest = near.add_field(&negate(e))?;
        out.push((format!("extra-{k}"), split_cost(e, &rest, s)));
    }
    Ok(out)
}

/// W^s with extra candidate splits for the near part.
pub fn w_norm_with<S: Spectral>(f: &S, s: f64, extra: &[S]) -> Result<NormBreakdown> {
    let (near, far) = shell_split(f);
    let best = w_candidates(&near, s, extra)?.into_iter().map(|(_, v)| v).fold(f64::INFINITY, f64::min);
    let far_v = xshalf_p_norm(&far, s, false, 1.0, false).total;
    let mut b = NormBreakdown::new(
        vec![(Key::Part("near".into()), best), (Key::Part("far".into()), far_v)],
        Aggregation::L2,
    );
    b.upper_bound = true;
    Ok(b)
}

/// W^s: the near-shell part in 𝒲^s (best candidate split) and the far part
/// in X^{s,-1/2,1}, combined in ℓ². An upper bound for the true infimum.
pub fn w_norm<S: Spectral>(f: &S, s: f64) -> NormBreakdown {
    w_norm_with(f, s, &[]).expect("near part is on its own grid")
}

/// Z^s = ‖f_{P≥1}‖_{X^{s,1/2,1}} + ‖f_{P≤1}‖_{Y^s} + ‖f_{P≤1}‖_{X^{s,1/2,∞}}.
pub fn z_norm<S: Spectral>(f: &S, s: f64) -> NormBreakdown {
    let (near, far) = shell_split(f);
    NormBreakdown::new(
        vec![
            (Key::Part("far:x1".into()), xshalf_p_norm(&far, s, true, 1.0, false).total),
            (Key::Part("near:y".into()), y_norm(&near, s).total),
            (Key::Part("near:xinf".into()), xshalf_p_norm(&near, s, true, f64::INFINITY, false).total),
        ],
        Aggregation::Sum,
    )
}

/// Upper bound for ‖f‖_{A+Ā}: the best of f ∈ A, f ∈ Ā, and the split
/// sending each mode to the nearer paraboloid.
pub fn conj_sum_norm<S: Spectral>(f: &S, norm: impl Fn(&S) -> f64) -> f64 {
    let toward_p = |p: &crate::spectral::Freq| modulation(p, false).abs() <= modulation(p, true).abs();
    let near_p = f.map_weights(|p| if toward_p(p) { 1.0 } else { 0.0 });
    let near_pbar = f.map_weights(|p| if toward_p(p) { 0.0 } else { 1.0 });
    let split = norm(&near_p) + norm(&near_pbar.conj_field());
    norm(f).min(norm(&f.conj_field())).min(split)
}

/// χ(t)·f through the physical side.
pub fn apply_time_cutoff(f: &FrequencyField, chi: &TimeCutoff) -> FrequencyField {
    if chi.is_identity() {
        return f.clone();
    }
    f.inverse().mul_time(|t| chi.value(t)).forward()
}

/// Ratios ‖χf‖/‖f‖ in X^{s,1/2,1}, Y^s and Z^s.
pub fn truncation_stability_check(f: &FrequencyField, s: f64, chi: &TimeCutoff) -> Vec<EstimateReport> {
    let cf = apply_time_cutoff(f, chi);
    let pairs = [
        ("truncation-x", xshalf_p_norm(&cf, s, true, 1.0, false).total, xshalf_p_norm(f, s, true, 1.0, false).total),
        ("truncation-y", y_norm(&cf, s).total, y_norm(f, s).total),
        ("truncation-z", z_norm(&cf, s).total, z_norm(f, s).total),
    ];
    let cfg = EstimateConfig { note: format!("s={s}"), ..Default::default() };
    pairs.into_iter().map(|(id, l, r)| EstimateReport::new(id, cfg.clone(), l, r, "given", 0)).collect()
}

/// Truncation ratios over random localized fields: one report per norm
/// and sample.
pub fn truncation_sweep(
    grid: crate::spectral::GridSpec,
    s: f64,
    chi: &TimeCutoff,
    samples: usize,
    seed: u64,
) -> Result<Vec<EstimateReport>> {
    use rand::SeedableRng;
    let mut out = Vec::with_capacity(3 * samples);
    for k in 0..samples {
        let sseed = seed.wrapping_mul(1_000_003).wrapping_add(k as u64);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(sseed);
        let (f, loc) = embed::random_localized(grid, &mut rng)?;
        for mut r in truncation_stability_check(&f.to_field(), s, chi) {
            r.sample = loc.family.name().to_string();
            r.seed = sseed;
            r.config.i = Some(loc.i);
            r.config.d1 = Some(loc.max_mod as u64);
            out.push(r);
        }
    }
    Ok(out)
}

/// Truncation ratios for fields drawn on `base` and re-hosted unchanged on
/// its doubling, as (base rows, fine rows).
pub fn truncation_refinement(
    base: crate::spectral::GridSpec,
    s: f64,
    chi: &TimeCutoff,
    samples: usize,
    seed: u64,
) -> Result<(Vec<EstimateReport>, Vec<EstimateReport>)> {
    use rand::SeedableRng;
    let fine_grid = base.doubled();
    let (mut b, mut f) = (Vec::with_capacity(3 * samples), Vec::with_capacity(3 * samples));
    for k in 0..samples {
        let sseed = seed.wrapping_mul(1_000_003).wrapping_add(k as u64);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(sseed);
        let (g, loc) = embed::random_localized(base, &mut rng)?;
        let fine = g.with_grid(fine_grid)?;
        for (field, dst) in [(g.to_field(), &mut b), (fine.to_field(), &mut f)] {
            let grid = *field.grid();
            for mut r in truncation_stability_check(&field, s, chi) {
                r.sample = loc.family.name().to_string();
                r.seed = sseed;
                r.config.i = Some(loc.i);
                r.config.d1 = Some(loc.max_mod as u64);
                r.config.note = format!("s={s};grid={}x{}", grid.m(), grid.k());
                dst.push(r);
            }
        }
    }
    Ok((b, f))
}

/// Amplitude of a unit plane wave's single mode, re-exported for tests that
/// build free waves by hand.
pub fn unit_wave_amplitude(n: usize) -> f64 {
    plane_wave_mode(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Freq, GridSpec, Spectrum};
    use num_complex::Complex64;

    fn grid() -> GridSpec {
        GridSpec::new(2, 16, 32).unwrap()
    }

    #[test]
    fn xsb_single_modes() {
        let g = grid();
        let one = Complex64::new(1.0, 0.0);
        let f = FrequencyField::single_mode(g, Freq::new(&[0, 0], 0), one).unwrap();
        for (s, b) in [(0.0, 0.0), (1.3, -0.5), (2.0, 0.7)] {
            assert!((xsb_norm(&f, s, b, false).total - 1.0).abs() < 1e-15);
        }
        let f = FrequencyField::single_mode(g, Freq::new(&[2, 1], 5), one).unwrap();
        let want = aniso_bracket(&[2, 1], 5).powf(1.5);
        assert!((xsb_norm(&f, 1.5, 0.8, false).total - want).abs() < 1e-13);
    }

    #[test]
    fn tag_validation() {
        assert!(SpaceTag::new(Family::Xsb, 1.0).validate().is_err());
        assert!(SpaceTag { p: Some(2.0), ..SpaceTag::new(Family::Y, 1.0) }.validate().is_err());
        assert!(SpaceTag::xshalf(1.0, true, 0.5).validate().is_err());
        assert!(SpaceTag::xshalf(1.0, false, f64::INFINITY).validate().is_ok());
    }

    #[test]
    fn zero_field_norms_vanish() {
        let f = Spectrum::empty(grid());
        for fam in [Family::Hs, Family::Y, Family::ScriptY, Family::W, Family::Z] {
            assert_eq!(norm(&f, &SpaceTag::new(fam, 1.0)).unwrap().total, 0.0);
        }
    }

    #[test]
    fn plane_wave_y_concentrates() {
        // 12 samples per axis: every cell holds exactly two per axis
        let g = GridSpec::new(2, 12, 24).unwrap();
        let c = Complex64::new(plane_wave_mode(2), 0.0);
        let f = Spectrum::from_modes(g, [(Freq::new(&[2, -1], 5), c)]).unwrap();
        let y = y_norm(&f, 1.0);
        assert_eq!(y.contributions.len(), 1);
        assert_eq!(y.contributions[0].0, Key::Column([2, -1, 0]));
        // |u| = 1: each of the 6ⁿ⁺¹ tubes carries the cell area (2π/6)²
        let cell = (2.0 * std::f64::consts::PI / 6.0).powi(2);
        let want = 6f64.sqrt() * bracket(5f64.sqrt()) * (36.0 * cell).sqrt();
        assert!((y.total - want).abs() / want < 1e-12, "{} vs {want}", y.total);
    }

    #[test]
    fn identity_cutoff_ratio_is_one() {
        let g = grid();
        let f = FrequencyField::single_mode(g, Freq::new(&[1, 0], 1), Complex64::new(1.0, 0.0)).unwrap();
        for r in truncation_stability_check(&f, 1.1, &TimeCutoff::identity()) {
            assert_eq!(r.ratio, 1.0, "{}", r.id);
        }
    }
}
