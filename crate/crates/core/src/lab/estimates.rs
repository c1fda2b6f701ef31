//! Estimate registry and sweeps. Each sweep draws seeded random inputs
//! matching an estimate's hypotheses, evaluates both sides with constant 1
//! and records the ratio, once on a base grid and once on its doubling.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::measure::{measure_convolve, random_density, restricted_l2, ParaboloidMeasure, Region, Sheet};
use super::null::{bilinear_b, bilinear_bhat, bilinear_tilde, resonance_scan, sup_symbol};
use super::sector::SectorDecomposition;
use crate::dyadic::cutoff::s as cutoff;
use crate::dyadic::{
    annulus_project, annulus_weight, at_least, at_most, modulation_project, modulation_values, Band, DyadicPiece,
};
use crate::error::{Error, Result};
use crate::norms::{conj_sum_norm, scripty_norm, w_norm, xsb_norm, xshalf_p_norm, y_norm, z_norm};
use crate::regression::RegressionConstants;
use crate::report::{max_ratio, EstimateConfig, EstimateReport};
use crate::sample::{localized, Family, Localization};
use crate::spectral::{aniso_norm, modulation, Freq, GridSpec, Spectral, Spectrum, MAX_DIM};

/// Largest annulus used by the sweeps.
pub const LAB_MAX_ANNULUS: u32 = 4;
/// Points per random input.
pub const DEFAULT_CAP: usize = 250;
const N: usize = 2;
/// Blocks with at most this many candidate points are enumerated.
const ENUMERATE_LIMIT: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub samples: usize,
    pub seed: u64,
    pub s: f64,
    /// Every random input is multiplied by this.
    pub scale: f64,
    pub cap: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { samples: 50, seed: 1, s: 1.1, scale: 1.0, cap: DEFAULT_CAP }
    }
}

/// How a sweep is judged.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Bound {
    /// Frozen regression constant.
    Frozen,
    /// A bound that holds with this constant by construction.
    Exact(f64),
}

#[derive(Clone, Copy, Debug)]
pub struct EstimateInfo {
    pub id: &'static str,
    pub family: &'static str,
    pub statement: &'static str,
    pub bound: Bound,
}

pub const ESTIMATES: &[EstimateInfo] = &[
    EstimateInfo { id: "ge", family: "pp1", statement: "‖fδ¹*gδ²‖ ≤ C 2^{min(i,j)n/2} ‖f‖‖g‖", bound: Bound::Frozen },
    EstimateInfo { id: "ge1", family: "pp1", statement: "‖fδ¹*gδ²‖_{|.|≈2^j, |τ−ξ²|≤d} ≤ C 2^{ni/2}(2^{-2i}d)^{1/2} ‖f‖‖g‖", bound: Bound::Frozen },
    EstimateInfo { id: "ge2", family: "pp1", statement: "‖fδ¹*gδ²‖_{⟨ξ⟩≈2^k} ≤ C 2^{(n-1)k/2} 2^{i/2} ‖f‖‖g‖, |i−j| ≤ 2, k ≤ max(i,j)+2", bound: Bound::Frozen },
    EstimateInfo { id: "ge3", family: "pp1", statement: "‖fδ¹*gδ²‖_{|.|≈2^j, |τ−ξ²|≤d} ≤ C 2^{ni/2} min(1,(2^{-2i}d)^{1/2}) ‖f‖‖g‖", bound: Bound::Frozen },
    EstimateInfo { id: "null", family: "null", statement: "‖B(u,v)‖ ≤ C α 2^{i+j} ‖B̂(u,v)‖ for sectors within α of perpendicular", bound: Bound::Frozen },
    EstimateInfo { id: "r1", family: "r1", statement: "‖B(u,v)‖_{L²_{k,d3}} ≤ sup|ξ·η| ‖B̂(u,v)‖", bound: Bound::Exact(1.0 + 1e-12) },
    EstimateInfo { id: "res1", family: "res1", statement: "sup|ξ·η| ≤ max(d1,d2,d3) + C", bound: Bound::Frozen },
    EstimateInfo { id: "be11", family: "be11", statement: "‖B(u,v)‖_{X^{s,-1/2,1}_k} ≤ C j² 2^{(n/2−s)i} 2^{(n/2−1+s)(k−j)} ‖u‖_{X^{s,1/2,1}_i}‖v‖_{X^{s,1/2,1}_j}", bound: Bound::Frozen },
    EstimateInfo { id: "be22", family: "be22", statement: "‖B(u,v)‖_{X^{s,-1/2,1}_{k,≥2^{k−i}}} ≤ C i² 2^{(n/2−s)i} ‖u‖_{X^{s,1/2}_i}‖v‖_{X^{s,1/2}_{j,≥2^{j−i}}}", bound: Bound::Frozen },
    EstimateInfo { id: "b1", family: "u1", statement: "‖uv‖_{X^{0,-1/2}_{k,d3}} ≤ C 2^{(n−1)i/2}2^{−j/2} min(2^{−i},d2^{−1/2},d3^{−1/2}) ‖u‖‖v‖", bound: Bound::Frozen },
    EstimateInfo { id: "b10", family: "u1", statement: "‖uv‖_{X^{0,-1/2}_{k,d3}} ≤ C 2^{(n−1)k/2}2^{−j/2} min(2^{−k},d1^{−1/2},d2^{−1/2}) ‖u‖‖v‖, k ≤ j−1", bound: Bound::Frozen },
    EstimateInfo { id: "b2", family: "b2", statement: "‖uv‖_{X^{0,-1/2}_{k,d3}} ≤ C 2^{ni/2} d3^{−1} ‖u‖‖v‖, max(d2,d3) ≥ 2^{i+j+6}", bound: Bound::Frozen },
    EstimateInfo { id: "y1", family: "y1", statement: "‖u_i v_{j,≤d}‖_{L²} ≤ C 2^{((n−1)i−j)/2} ‖u_i‖_{X^{0,1/2,1}}‖v‖_{Y^0}", bound: Bound::Frozen },
    EstimateInfo { id: "y2", family: "y2", statement: "‖u_i v‖_{𝒴^0_{j,≤d}} ≤ C 2^{((n−1)i−j)/2} ‖u_i‖_{X^{0,1/2,1}}‖v‖_{L²}", bound: Bound::Frozen },
    EstimateInfo { id: "m9", family: "m9", statement: "‖fg‖_{L²} ≤ C 2^{−((n−1)i+j)/2} ‖f‖_{Y_j}‖g‖_{L²}", bound: Bound::Frozen },
    EstimateInfo { id: "c0", family: "c0", statement: "Σ ‖g‖²_{L^∞(Q_i^{m,l})} ≤ C 2^{−ni}‖g‖²_{L²}", bound: Bound::Frozen },
    EstimateInfo { id: "y6", family: "y6", statement: "‖B(u_i,v_j)‖_{W^s_j} ≤ C i² 2^{(n/2−s)i} ‖u_i‖_{Z^s}‖v_j‖_{Z^s}", bound: Bound::Frozen },
    EstimateInfo { id: "algebra-Z", family: "algebra-Z", statement: "‖uv‖_{Z^s} ≤ C ‖u‖_{Z^s}‖v‖_{Z^s}", bound: Bound::Frozen },
    EstimateInfo { id: "algebra-ZZbar", family: "algebra-ZZbar", statement: "‖ūv‖_{Z^s+Z̄^s} ≤ C ‖u‖_{Z^s}‖v‖_{Z^s}", bound: Bound::Frozen },
    EstimateInfo { id: "y4", family: "y4", statement: "‖uv‖_{X+X̄} ≤ C ‖u‖_{X+X̄}‖v‖_{X+X̄}, X = X^{s,1/2,1}", bound: Bound::Frozen },
    EstimateInfo { id: "mult-W", family: "mult-W", statement: "‖uw‖_{W^s} ≤ C ‖u‖_{Z^s+Z̄^s}‖w‖_{W^s}", bound: Bound::Frozen },
    EstimateInfo { id: "le", family: "le", statement: "‖χ(e^{−itΔ}u₀ + D f)‖_{Z^s} ≤ C(‖u₀‖_{H^s} + ‖f‖_{W^s})", bound: Bound::Frozen },
];

pub fn info(id: &str) -> Option<&'static EstimateInfo> {
    ESTIMATES.iter().find(|e| e.id == id)
}

/// Reports for one estimate id on the base grid and on its doubling.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Sweep {
    pub id: String,
    pub base: Vec<EstimateReport>,
    pub fine: Vec<EstimateReport>,
    /// Configurations that cannot be realized on the lab grids.
    pub untestable: Vec<String>,
}

impl Sweep {
    fn new(id: &str) -> Self {
        Sweep { id: id.to_string(), ..Default::default() }
    }

    pub fn max_base(&self) -> f64 {
        max_ratio(&self.base)
    }

    pub fn max_fine(&self) -> f64 {
        max_ratio(&self.fine)
    }

    /// |C_fine − C_base| / C_base.
    pub fn change(&self) -> f64 {
        let (a, b) = (self.max_base(), self.max_fine());
        if a == 0.0 {
            b
        } else {
            (b - a).abs() / a
        }
    }
}

/// Largest relative change allowed under one refinement.
pub const REFINEMENT_TOL: f64 = 0.25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub id: String,
    pub max_base: f64,
    pub max_fine: f64,
    pub change: f64,
    pub constant: Option<f64>,
    pub pass: bool,
    pub reason: String,
}

pub fn judge(sweep: &Sweep, constants: &RegressionConstants) -> Verdict {
    let (mb, mf, ch) = (sweep.max_base(), sweep.max_fine(), sweep.change());
    let constant = match info(&sweep.id).map(|e| e.bound) {
        Some(Bound::Exact(c)) => Some(c),
        _ => constants.get(&sweep.id),
    };
    let empty = sweep.base.is_empty();
    let (pass, reason) = match constant {
        _ if empty => (false, "no testable configuration".to_string()),
        None => (false, "no frozen constant".to_string()),
        Some(c) if !(mb.is_finite() && mf.is_finite()) => (false, format!("non-finite ratio (C = {c})")),
        Some(c) if mb > c || mf > c => (false, format!("max ratio {:.4} exceeds C = {c:.4}", mb.max(mf))),
        Some(_) if ch > REFINEMENT_TOL => (false, format!("refinement change {:.1}%", 100.0 * ch)),
        Some(c) => (true, format!("max {:.4} ≤ C = {c:.4}, refinement change {:.2}%", mb.max(mf), 100.0 * ch)),
    };
    Verdict { id: sweep.id.clone(), max_base: mb, max_fine: mf, change: ch, constant, pass, reason }
}

/// Estimate families in run order; each produces one or more ids.
pub const FAMILIES: &[&str] = &[
    "pp1", "null", "r1", "res1", "be11", "be22", "u1", "b2", "y1", "y2", "m9", "c0", "y6", "algebra-Z",
    "algebra-ZZbar", "y4", "mult-W", "le",
];

/// Run one estimate id (its whole family is evaluated).
pub fn verify_estimate(id: &str, cfg: &SweepConfig) -> Result<Sweep> {
    let e = info(id).ok_or_else(|| Error::InvalidArgument(format!("unknown estimate id {id}")))?;
    run_family(e.family, cfg)?
        .into_iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::InvalidArgument(format!("family {} produced no {id}", e.family)))
}

pub fn run_family(family: &str, cfg: &SweepConfig) -> Result<Vec<Sweep>> {
    if cfg.samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    if !(cfg.scale.is_finite() && cfg.scale > 0.0) {
        return Err(Error::InvalidArgument("scale must be positive".into()));
    }
    match family {
        "pp1" => pp1(cfg),
        "null" => null_suppression(cfg).map(|s| vec![s.sweep]),
        "r1" => r1(cfg).map(|s| vec![s]),
        "res1" => Ok(vec![res1()]),
        "be11" => be11(cfg).map(|s| vec![s]),
        "be22" => be22(cfg).map(|s| vec![s]),
        "u1" => u1(cfg),
        "b2" => b2(cfg).map(|s| vec![s]),
        "y1" => y1(cfg).map(|s| vec![s]),
        "y2" => y2(cfg).map(|s| vec![s]),
        "m9" => m9(cfg).map(|s| vec![s]),
        "c0" => c0(cfg).map(|s| vec![s]),
        "y6" => y6(cfg).map(|s| vec![s]),
        "algebra-Z" => algebra_z(cfg).map(|s| vec![s]),
        "algebra-ZZbar" => algebra_zzbar(cfg).map(|s| vec![s]),
        "y4" => y4(cfg).map(|s| vec![s]),
        "mult-W" => mult_w(cfg).map(|s| vec![s]),
        "le" => crate::solver::le_sweep(cfg).map(|s| vec![s]),
        _ => Err(Error::InvalidArgument(format!("unknown estimate family {family}"))),
    }
}

/// Every family, in order.
pub fn run_all(cfg: &SweepConfig) -> Result<Vec<Sweep>> {
    let mut out = Vec::new();
    for f in FAMILIES {
        out.extend(run_family(f, cfg)?);
    }
    Ok(out)
}

fn salt(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

fn sample_rng(cfg: &SweepConfig, name: &str, k: usize) -> (ChaCha8Rng, u64) {
    let seed = cfg.seed.wrapping_mul(1_000_003).wrapping_add(k as u64) ^ salt(name);
    (ChaCha8Rng::seed_from_u64(seed), seed)
}

fn pow2(x: f64) -> f64 {
    x.exp2()
}

fn scaled(f: Spectrum, c: f64) -> Spectrum {
    if c == 1.0 {
        f
    } else {
        f.scale(Complex64::new(c, 0.0))
    }
}

/// Run `task` for every sample in parallel; each returns (base, fine) rows.
fn collect<F>(sweep: &mut Sweep, samples: usize, task: F) -> Result<()>
where
    F: Fn(usize) -> Result<(Vec<EstimateReport>, Vec<EstimateReport>)> + Sync + Send,
{
    let parts: Vec<Result<_>> = (0..samples).into_par_iter().map(task).collect();
    for p in parts {
        let (b, f) = p?;
        sweep.base.extend(b);
        sweep.fine.extend(f);
    }
    Ok(())
}

fn row(id: &str, config: EstimateConfig, lhs: f64, rhs: f64, sample: &str, seed: u64) -> EstimateReport {
    EstimateReport::new(id, config, lhs, rhs, sample, seed)
}

fn grid_note(g: &GridSpec) -> String {
    format!("grid={}x{}", g.m(), g.k())
}

// ---------------------------------------------------------------------------
// random inputs

/// Random field supported where S_{i,d} is nonzero (near P, or near P̄ when
/// `conjugate`), weighted by the S_{i,d} cutoffs so it is exactly an
/// S_{i,d} image. At most `cap` points, found by rejection sampling.
pub fn block_field<R: Rng>(
    grid: GridSpec,
    i: u32,
    d: u64,
    conjugate: bool,
    family: Family,
    cap: usize,
    rng: &mut R,
) -> Result<Spectrum> {
    let n = grid.n();
    let bound = (1i64 << (i + 1)).min(grid.xi_max());
    let (mlo, mhi) = if d == 1 { (0i64, 1i64) } else { (d as i64 / 2 + 1, 2 * d as i64 - 1) };
    let sign = if conjugate { -1 } else { 1 };
    let target = match family {
        Family::Point => 1,
        _ => cap.max(1),
    };
    let dir: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let dnorm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-9);
    // the shell is fixed by the first accepted point
    let mut shell: Option<i64> = None;
    let weight = |p: &Freq| annulus_weight(p, n, i) * crate::dyadic::modulation_weight(p, d, conjugate);
    let amp = |rng: &mut R| Complex64::from_polar(rng.gen_range(0.05..1.0), rng.gen_range(0.0..TAU));
    let side = (2 * bound + 1) as u64;
    if side.pow(n as u32) * 2 * (mhi - mlo + 1) as u64 <= ENUMERATE_LIMIT {
        // small block: enumerate it, then subsample
        let mut all = Vec::new();
        for c in 0..side.pow(n as u32) {
            let mut xi = [0i64; MAX_DIM];
            let mut rest = c;
            for x in xi.iter_mut().take(n) {
                *x = (rest % side) as i64 - bound;
                rest /= side;
            }
            let x2: i64 = xi[..n].iter().map(|v| v * v).sum();
            for m in (mlo..=mhi).flat_map(|m| [m, -m]) {
                let p = Freq { xi, tau: sign * x2 + m };
                if grid.contains_symmetric(&p) && weight(&p) > 0.0 {
                    all.push(p);
                }
            }
        }
        all.sort();
        all.dedup();
        if all.is_empty() {
            return Err(Error::Inadmissible(format!("block ({i},{d}) has no points on {grid:?}")));
        }
        let keep = rand::seq::index::sample(rng, all.len(), target.min(all.len()));
        let modes: Vec<_> = keep.iter().map(|k| (all[k], amp(rng) * weight(&all[k]))).collect();
        return Spectrum::from_modes(grid, modes);
    }
    let mut modes = Vec::new();
    let mut tries = 0usize;
    while modes.len() < target && tries < (200 * target).max(50_000) {
        tries += 1;
        let mut xi = [0i64; MAX_DIM];
        for x in xi.iter_mut().take(n) {
            *x = rng.gen_range(-bound..=bound);
        }
        let m = match shell {
            Some(m) => m,
            None => rng.gen_range(mlo..=mhi) * if rng.gen_bool(0.5) { 1 } else { -1 },
        };
        if family == Family::Cap {
            let r = xi[..n].iter().map(|v| (v * v) as f64).sum::<f64>().sqrt();
            let c: f64 = (0..n).map(|a| xi[a] as f64 * dir[a]).sum::<f64>() / dnorm;
            if r > 0.0 && c < 0.5f64.cos() * r {
                continue;
            }
        }
        let x2: i64 = xi[..n].iter().map(|v| v * v).sum();
        let p = Freq { xi, tau: sign * x2 + m };
        if !grid.contains_symmetric(&p) {
            continue;
        }
        let w = weight(&p);
        if w == 0.0 {
            continue;
        }
        if family == Family::Shell {
            shell = Some(m);
        }
        modes.push((p, amp(rng) * w));
    }
    if modes.is_empty() {
        return Err(Error::Inadmissible(format!("block ({i},{d}) has no points on {grid:?}")));
    }
    Spectrum::from_modes(grid, modes)
}

fn random_family<R: Rng>(rng: &mut R) -> Family {
    Family::ALL[rng.gen_range(0..Family::ALL.len())]
}

fn piece(field: Spectrum, i: u32) -> DyadicPiece<Spectrum> {
    DyadicPiece { field, i, band: Band::All, conjugate: false }
}

fn sheets_label(a: bool, b: bool) -> String {
    let s = |c: bool| if c { "Pbar" } else { "P" };
    format!("{},{}", s(a), s(b))
}

// ---------------------------------------------------------------------------
// surface measures

fn pp1(cfg: &SweepConfig) -> Result<Vec<Sweep>> {
    let base = GridSpec::new(N, 128, 4096)?;
    let fine = base.doubled();
    let ids = ["ge", "ge1", "ge2", "ge3"];
    let mut configs = Vec::new();
    for i in 0..=LAB_MAX_ANNULUS {
        for j in i..=LAB_MAX_ANNULUS {
            for s1 in Sheet::BOTH {
                for s2 in Sheet::BOTH {
                    configs.push((i, j, s1, s2));
                }
            }
        }
    }
    let tasks = configs.len() * cfg.samples;
    let rows: Vec<Result<[Vec<EstimateReport>; 2]>> = (0..tasks)
        .into_par_iter()
        .map(|t| {
            let (i, j, s1, s2) = configs[t / cfg.samples];
            let (mut rng, seed) = sample_rng(cfg, "pp1", t);
            let (fa, fb) = (random_family(&mut rng), random_family(&mut rng));
            let f = scale_measure(random_density(N, s1, i, fa, cfg.cap, &mut rng)?, cfg.scale)?;
            let g = scale_measure(random_density(N, s2, j, fb, cfg.cap, &mut rng)?, cfg.scale)?;
            let sample = format!("{}/{}", fa.name(), fb.name());
            let mut out = [Vec::new(), Vec::new()];
            for (slot, grid) in [base, fine].into_iter().enumerate() {
                let h = measure_convolve(&f, &g, grid)?;
                out[slot] = pp1_rows(&f, &g, &h, i, j, &grid, &sample, seed);
            }
            Ok(out)
        })
        .collect();
    let mut sweeps: Vec<Sweep> = ids.iter().map(|id| Sweep::new(id)).collect();
    for r in rows {
        let [b, f] = r?;
        for (rows, fine_side) in [(b, false), (f, true)] {
            for rep in rows {
                let k = ids.iter().position(|id| *id == rep.id).expect("known id");
                if fine_side {
                    sweeps[k].fine.push(rep);
                } else {
                    sweeps[k].base.push(rep);
                }
            }
        }
    }
    sweeps[1].untestable.push("ge1 with offsets |c1|,|c2| > 0: only c = 0 is swept (unexplored)".into());
    Ok(sweeps)
}

fn scale_measure(m: ParaboloidMeasure, c: f64) -> Result<ParaboloidMeasure> {
    if c == 1.0 {
        return Ok(m);
    }
    m.with_density(m.density().iter().map(|(x, v)| (*x, v * c)).collect())
}

#[allow(clippy::too_many_arguments)]
fn pp1_rows(
    f: &ParaboloidMeasure,
    g: &ParaboloidMeasure,
    h: &Spectrum,
    i: u32,
    j: u32,
    grid: &GridSpec,
    sample: &str,
    seed: u64,
) -> Vec<EstimateReport> {
    let n = N as f64;
    let norms = f.l2_norm() * g.l2_norm();
    let signs = format!("{},{}", f.sheet.name(), g.sheet.name());
    let cfg = |k: Option<u32>, d: Option<u64>| EstimateConfig {
        i: Some(i),
        j: Some(j),
        k,
        d3: d,
        signs: signs.clone(),
        note: grid_note(grid),
        ..Default::default()
    };
    let mut out = vec![row("ge", cfg(None, None), h.norm_l2(), pow2(i.min(j) as f64 * n / 2.0) * norms, sample, seed)];
    if i.abs_diff(j) <= 2 {
        for k in 0..=i.max(j) + 2 {
            let lhs = restricted_l2(h, Region::SpatialAnnulus(k));
            let rhs = pow2((n - 1.0) * k as f64 / 2.0 + i as f64 / 2.0) * norms;
            out.push(row("ge2", cfg(Some(k), None), lhs, rhs, sample, seed));
        }
    }
    for d in modulation_values(j) {
        let lhs = restricted_l2(h, Region::NearP { j, d });
        let gain = (d as f64 / pow2(2.0 * i as f64)).sqrt();
        let base = pow2(n * i as f64 / 2.0) * norms;
        out.push(row("ge1", cfg(None, Some(d)), lhs, base * gain, sample, seed));
        out.push(row("ge3", cfg(None, Some(d)), lhs, base * gain.min(1.0), sample, seed));
    }
    out
}

// ---------------------------------------------------------------------------
// null structure

/// Result of the sector experiment: the sweep plus the suppression
/// max ‖B‖/(2^{i+j}‖B̂‖) per α, largest α first.
#[derive(Clone, Debug)]
pub struct NullSuppression {
    pub sweep: Sweep,
    pub suppression: Vec<(f64, f64)>,
}

pub const NULL_ALPHAS: [f64; 3] = [0.5, 0.25, 0.125];

/// Densities on P in two sectors of width α whose directions differ by
/// π/2 to within α, at ⟨ξ⟩ ≈ 2^4; the sectors come from a
/// `SectorDecomposition` and its perpendicularity relation.
pub fn null_suppression(cfg: &SweepConfig) -> Result<NullSuppression> {
    let (i, j) = (LAB_MAX_ANNULUS, LAB_MAX_ANNULUS);
    let base = GridSpec::new(N, 128, 4096)?;
    let fine = base.doubled();
    let mut sweep = Sweep::new("null");
    let mut suppression = Vec::new();
    for (ai, &alpha) in NULL_ALPHAS.iter().enumerate() {
        let dec = SectorDecomposition::new(N, alpha)?;
        let rows: Vec<Result<(Vec<EstimateReport>, Vec<EstimateReport>, f64)>> = (0..cfg.samples)
            .into_par_iter()
            .map(|k| {
                let (mut rng, seed) = sample_rng(cfg, "null", ai * 1_000_000 + k);
                let (u, v) = loop {
                    let fu = random_density(N, Sheet::P, i, Family::Annulus, 4000, &mut rng)?;
                    let fv = random_density(N, Sheet::P, j, Family::Annulus, 4000, &mut rng)?;
                    let pu = dec.split(&fu)?;
                    let pv = dec.split(&fv)?;
                    let l = rng.gen_range(0..dec.len());
                    // partner sector whose center is closest to a right angle
                    let partners = &dec.perp[l];
                    let center = |s: usize| 0.5 * (dec.sectors[s].azimuth.0 + dec.sectors[s].azimuth.1);
                    let off = |s: usize| {
                        let d = (center(s) - center(l)).rem_euclid(TAU);
                        (d - TAU / 4.0).abs().min((d - 3.0 * TAU / 4.0).abs())
                    };
                    let Some(&m) = partners.iter().min_by(|a, b| off(**a).total_cmp(&off(**b))) else { continue };
                    if pu[l].density().is_empty() || pv[m].density().is_empty() {
                        continue;
                    }
                    break (on_paraboloid(&pu[l], base, cfg.scale)?, on_paraboloid(&pv[m], base, cfg.scale)?);
                };
                let mut out = (Vec::new(), Vec::new(), 0.0);
                for (slot, grid) in [base, fine].into_iter().enumerate() {
                    let (u, v) = (u.with_grid(grid)?, v.with_grid(grid)?);
                    let b = bilinear_b(&u, &v, grid)?.norm_l2();
                    let bh = bilinear_bhat(&u, &v, grid)?.norm_l2();
                    let scale = pow2((i + j) as f64);
                    let c = EstimateConfig {
                        i: Some(i),
                        j: Some(j),
                        signs: "P,P".into(),
                        note: format!("alpha={alpha};{}", grid_note(&grid)),
                        ..Default::default()
                    };
                    let r = row("null", c, b, alpha * scale * bh, "sector", seed);
                    if slot == 0 {
                        out.2 = if bh > 0.0 { b / (scale * bh) } else { 0.0 };
                        out.0.push(r);
                    } else {
                        out.1.push(r);
                    }
                }
                Ok(out)
            })
            .collect();
        let mut worst: f64 = 0.0;
        for r in rows {
            let (b, f, s) = r?;
            sweep.base.extend(b);
            sweep.fine.extend(f);
            worst = worst.max(s);
        }
        suppression.push((alpha, worst));
    }
    Ok(NullSuppression { sweep, suppression })
}

fn on_paraboloid(m: &ParaboloidMeasure, grid: GridSpec, c: f64) -> Result<Spectrum> {
    let s = m.sheet.sign();
    Spectrum::from_modes(
        grid,
        m.density().iter().map(|(xi, v)| {
            let x2: i64 = xi[..N].iter().map(|a| a * a).sum();
            (Freq { xi: *xi, tau: s * x2 }, v * c)
        }),
    )
}

fn r1(cfg: &SweepConfig) -> Result<Sweep> {
    let base = GridSpec::new(N, 64, 1024)?;
    let fine = base.doubled();
    let mut sweep = Sweep::new("r1");
    collect(&mut sweep, cfg.samples, |k| {
        let (mut rng, seed) = sample_rng(cfg, "r1", k);
        let i = rng.gen_range(0..=3u32);
        let j = rng.gen_range(i..=3u32);
        let d1 = *pick(&modulation_values(i), &mut rng);
        let d2 = *pick(&modulation_values(j), &mut rng);
        let u = scaled(block_field(base, i, d1, false, random_family(&mut rng), cfg.cap, &mut rng)?, cfg.scale);
        let v = scaled(block_field(base, j, d2, false, random_family(&mut rng), cfg.cap, &mut rng)?, cfg.scale);
        let mut out = (Vec::new(), Vec::new());
        for (slot, grid) in [base, fine].into_iter().enumerate() {
            let (u, v) = (u.with_grid(grid)?, v.with_grid(grid)?);
            let b = bilinear_b(&u, &v, grid)?;
            let bh = bilinear_bhat(&u, &v, grid)?.norm_l2();
            for kk in 0..=j + 2 {
                let a = annulus_project(&b, kk)?;
                if a.field.is_empty() {
                    continue;
                }
                for d3 in modulation_values(kk) {
                    let lhs = modulation_project(&a, d3, false)?.field.norm_l2();
                    if lhs == 0.0 {
                        continue;
                    }
                    let sup = sup_symbol(&u, &v, |p| {
                        cutoff(kk, aniso_norm(&p.xi[..N], p.tau)) > 0.0
                            && crate::dyadic::modulation_weight(p, d3, false) > 0.0
                    });
                    let c = EstimateConfig {
                        i: Some(i),
                        j: Some(j),
                        k: Some(kk),
                        d1: Some(d1),
                        d2: Some(d2),
                        d3: Some(d3),
                        signs: "P,P".into(),
                        note: grid_note(&grid),
                    };
                    let r = row("r1", c, lhs, sup as f64 * bh, "block", seed);
                    if slot == 0 {
                        out.0.push(r);
                    } else {
                        out.1.push(r);
                    }
                }
            }
        }
        Ok(out)
    })?;
    Ok(sweep)
}

/// Half-width of the exhaustive resonance enumeration (9 points per axis).
pub const RESONANCE_HALF: i64 = 4;

fn res1() -> Sweep {
    let scan = resonance_scan(N, RESONANCE_HALF);
    let mut sweep = Sweep::new("res1");
    let c = EstimateConfig {
        note: format!(
            "pairs={};identity_defect={:e};max_ratio={:.3}",
            scan.pairs, scan.identity_defect, scan.ratio
        ),
        ..Default::default()
    };
    // the ratio column carries the additive constant C
    let r = row("res1", c, scan.additive.max(0.0), 1.0, "exhaustive", 0);
    sweep.base.push(r.clone());
    sweep.fine.push(r);
    sweep
}

fn pick<'a, T, R: Rng>(v: &'a [T], rng: &mut R) -> &'a T {
    &v[rng.gen_range(0..v.len())]
}

// ---------------------------------------------------------------------------
// bilinear estimates in X^{s,1/2,1}

fn xs1(f: &Spectrum, s: f64) -> f64 {
    xshalf_p_norm(f, s, true, 1.0, false).total
}

fn xsm1(f: &Spectrum, s: f64) -> f64 {
    xshalf_p_norm(f, s, false, 1.0, false).total
}

fn max1sq(j: u32) -> f64 {
    (j.max(1) as f64).powi(2)
}

fn be11(cfg: &SweepConfig) -> Result<Sweep> {
    let base = GridSpec::new(N, 64, 1024)?;
    let fine = base.doubled();
    let s = cfg.s;
    let n = N as f64;
    let mut sweep = Sweep::new("be11");
    collect(&mut sweep, cfg.samples, |k| {
        let (mut rng, seed) = sample_rng(cfg, "be11", k);
        let i = rng.gen_range(0..=3u32);
        let j = rng.gen_range(i..=3u32);
        let d1 = *pick(&modulation_values(i), &mut rng);
        let d2 = *pick(&modulation_values(j), &mut rng);
        let u = scaled(block_field(base, i, d1, false, random_family(&mut rng), cfg.cap, &mut rng)?, cfg.scale);
        let v = scaled(block_field(base, j, d2, false, random_family(&mut rng), cfg.cap, &mut rng)?, cfg.scale);
        let rhs0 = max1sq(j) * pow2((n / 2.0 - s) * i as f64) * xs1(&u, s) * xs1(&v, s);
        let mut out = (Vec::new(), Vec::new());
        for (slot, grid) in [base, fine].into_iter().enumerate() {
            let u = u.with_grid(grid)?;
            for conj_v in [false, true] {
                let v = v.with_grid(grid)?;
                let v = if conj_v { v.conj_field() } else { v };
                let b = bilinear_b(&u, &v, grid)?;
                for kk in 0..=j + 2 {
                    let bk = annulus_project(&b, kk)?.field;
                    if bk.is_empty() {
                        continue;
                    }
                    let rhs = rhs0 * pow2((n / 2.0 - 1.0 + s) * (kk as f64 - j as f64));
                    let c = EstimateConfig {
                        i: Some(i),
                        j: Some(j),
                        k: Some(kk),
                        d1: Some(d1),
                        d2: Some(d2),
                        signs: sheets_label(false, conj_v),
                        note: format!("s={s};{}", grid_note(&grid)),
                        ..Default::default()
                    };
                    let r = row("be11", c, xsm1(&bk, s), rhs, "block", seed);
                    if slot == 0 {
                        out.0.push(r);
                    } else {
                        out.1.push(r);
                    }
                }
            }
        }
        Ok(out)
    })?;
    Ok(sweep)
}

fn be22(cfg: &SweepConfig) -> Result<Sweep> {
    let base = GridSpec::new(N, 128, 4096)?;
    let fine = base.doubled();
    let s = cfg.s;
    let mut sweep = Sweep::new("be22");
    for i in 1..=LAB_MAX_ANNULUS {
        sweep.untestable.push(format!(
            "be22 i={i}: needs j ≥ {} > {LAB_MAX_ANNULUS} (UNTESTABLE-AT-SCALE)",
            2 * (N as u32 + 2) * i
        ));
    }
    collect(&mut sweep, cfg.samples, |k| {
        let (mut rng, seed) = sample_rng(cfg, "be22", k);
        let i = 0u32;
        let j = rng.gen_range(1..=LAB_MAX_ANNULUS);
        let d1 = *pick(&modulation_values(i), &mut rng);
        let low = 1u64 << (j - i);
        let choices: Vec<u64> = modulation_values(j).into_iter().filter(|&d| d >= low).collect();
        let d2 = *pick(&choices, &mut rng);
        let u = scaled(block_field(base, i, d1, false, random_family(&mut rng), cfg.cap, &mut rng)?, cfg.scale);
        let v0 = scaled(block_field(base, j, d2, false, random_family(&mut rng), cfg.cap, &mut rng)?, cfg.scale);
        let v = at_least(&piece(v0, j), low, false)?.field;
        if v.is_empty() {
            return Ok((Vec::new(), Vec::new()));
        }
        let rhs = max1sq(i) * pow2((N as f64 / 2.0 - s) * i as f64) * xsb_norm(&u, s, 0.5, false).total
            * xsb_norm(&v, s, 0.5, false).total;
        let mut out = (Vec::new(), Vec::new());
        for (slot, grid) in [base, fine].into_iter().enumerate() {
            let u = u.with_grid(grid)?;
            for conj_v in [false, true] {
                let v = v.with_grid(grid)?;
                let v = if conj_v { v.conj_field() } else { v };
                let b = bilinear_b(&u, &v, grid)?;
                for kk in j.saturating_sub(1)..=j + 1 {
                    let bk = annulus_project(&b, kk)?;
                    let tail = at_least(&bk, 1u64 << (kk - i), false)?.field;
                    let c = EstimateConfig {
                        i: Some(i),
                        j: Some(j),
                        k: Some(kk),
                        d1: Some(d1),
                        d2: Some(d2),
                        signs: sheets_label(false, conj_v),
                        note: format!("s={s};{}", grid_note(&grid)),
                        ..Default::default()
                    };
                    let r = row("be22", c, xsm1(&tail, s), rhs, "block", seed);
                    if slot == 0 {
                        out.0.push(r);
                    } else {
                        out.1.push(r);
                    }
                }
            }
        }
        Ok(out)
    })?;
    Ok(sweep)
}

/// The three sign variants B̃(u,v), B̃(ū,v), B̃(u,v̄).
const PRODUCT_SIGNS: [(bool, bool); 3] = [(false, false), (true, false), (false, true)];

fn x0(f: &Spectrum, b: f64) -> f64 {
    xsb_norm(f, 0.0, b, false).total
}

fn u1(cfg: &SweepConfig) -> Result<Vec<Sweep>> {
    let base = GridSpec::new(N, 64, 1024)?;
    let fine = base.doubled();
    let mut b1 = Sweep::new("b1");
    let mut b10 = Sweep::new("b10");
    let parts: Vec<Result<[Vec<EstimateReport>; 4]>> = (0..cfg.samples)
        .into_par_iter()
        .map(|k| {
            let (mut rng, seed) = sample_rng(cfg, "u1", k);
            let i = rng.gen_range(0..=3u32);
            let j = rng.gen_range(i..=3u32);
            let d1 = *pick(&modulation_values(i), &mut rng);
            let d2 = *pick(&modulation_values(j), &mut rng);
            let u = scaled(block_field(base, i, d1, false, random_family(&mut rng), cfg.cap, &mut rng)?, cfg.scale);
            let v = scaled(block_field(base, j, d2, false, random_family(&mut rng), cfg.cap, &mut rng)?, cfg.scale);
            let norms = x0(&u, 0.5) * x0(&v, 0.5);
            let mut out: [Vec<EstimateReport>; 4] = Default::default();
            for (slot, grid) in [base, fine].into_iter().enumerate() {
                for (cu, cv) in PRODUCT_SIGNS {
                    let uu = u.with_grid(grid)?;
                    let vv = v.with_grid(grid)?;
                    let uu = if cu { uu.conj_field() } else { uu };
                    let vv = if cv { vv.conj_field() } else { vv };
                    let p = bilinear_tilde(&uu, &vv, grid)?;
                    for kk in j.saturating_sub(4)..=(j + 4).min(grid.i_cover()) {
                        let a = annulus_project(&p, kk)?;
                        if a.field.is_empty() {
                            continue;
                        }
                        for d3 in modulation_values(kk) {
                            let lhs = x0(&modulation_project(&a, d3, false)?.field, -0.5);
                            let c = EstimateConfig {
                                i: Some(i),
                                j: Some(j),
                                k: Some(kk),
                                d1: Some(d1),
                                d2: Some(d2),
                                d3: Some(d3),
                                signs: product_label(cu, cv),
                                note: grid_note(&grid),
                            };
                            let (fi, fj, fk) = (i as f64, j as f64, kk as f64);
                            let m1 = pow2(-fi).min((d2 as f64).powf(-0.5)).min((d3 as f64).powf(-0.5));
                            let rhs = pow2((N as f64 - 1.0) * fi / 2.0 - fj / 2.0) * m1 * norms;
                            out[slot].push(row("b1", c.clone(), lhs, rhs, "block", seed));
                            if j - i <= 2 && kk < j {
                                let m10 = pow2(-fk).min((d1 as f64).powf(-0.5)).min((d2 as f64).powf(-0.5));
                                let rhs = pow2((N as f64 - 1.0) * fk / 2.0 - fj / 2.0) * m10 * norms;
                                out[2 + slot].push(row("b10", c, lhs, rhs, "block", seed));
                            }
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect();
    for p in parts {
        let [a, b, c, d] = p?;
        b1.base.extend(a);
        b1.fine.extend(b);
        b10.base.extend(c);
        b10.fine.extend(d);
    }
    Ok(vec![b1, b10])
}

fn product_label(cu: bool, cv: bool) -> String {
    match (cu, cv) {
        (false, false) => "u,v".into(),
        (true, false) => "ubar,v".into(),
        (false, true) => "u,vbar".into(),
        (true, true) => "ubar,vbar".into(),
    }
}

/// b2 needs 2^{i+j+6} ≤ 2^{2j+2} on annuli j ≤ 4: only (i, j) = (0, 4).
fn b2(cfg: &SweepConfig) -> Result<Sweep> {
    let base = GridSpec::new(N, 128, 4096)?;
    let fine = base.doubled();
    let (i, j) = (0u32, LAB_MAX_ANNULUS);
    let threshold = 1u64 << (i + j + 6);
    let mut sweep = Sweep::new("b2");
    for ii in 0..=LAB_MAX_ANNULUS {
        for jj in ii..=LAB_MAX_ANNULUS {
            if (ii, jj) != (i, j) {
                sweep.untestable.push(format!(
                    "b2 i={ii} j={jj}: max(d2,d3) ≥ 2^{} is outside the modulations of annulus {jj} (UNTESTABLE-AT-SCALE)",
                    ii + jj + 6
                ));
            }
        }
    }
    collect(&mut sweep, cfg.samples, |k| {
        let (mut rng, seed) = sample_rng(cfg, "b2", k);
        let d1 = *pick(&modulation_values(i), &mut rng);
        let d2 = *pick(&[threshold / 4, threshold / 2, threshold], &mut rng);
        let u = scaled(block_field(base, i, d1, false, random_family(&mut rng), cfg.cap, &mut rng)?, cfg.scale);
        let v = scaled(block_field(base, j, d2, false, random_family(&mut rng), cfg.cap, &mut rng)?, cfg.scale);
        let norms = x0(&u, 0.5) * x0(&v, 0.5);
        let mut out = (Vec::new(), Vec::new());
        for (slot, grid) in [base, fine].into_iter().enumerate() {
            for cu in [false, true] {
                let uu = u.with_grid(grid)?;
                let uu = if cu { uu.conj_field() } else { uu };
                let p = bilinear_tilde(&uu, &v.with_grid(grid)?, grid)?;
                for kk in j.saturating_sub(4)..=(j + 4).min(grid.i_cover()) {
                    let a = annulus_project(&p, kk)?;
                    for d3 in modulation_values(kk) {
                        if d2.max(d3) < threshold {
                            continue;
                        }
                        let lhs = x0(&modulation_project(&a, d3, false)?.field, -0.5);
                        let ratio = d2 as f64 / d3 as f64;
                        let trivial = !(0.25..=4.0).contains(&ratio);
                        let c = EstimateConfig {
                            i: Some(i),
                            j: Some(j),
                            k: Some(kk),
                            d1: Some(d1),
                            d2: Some(d2),
                            d3: Some(d3),
                            signs: product_label(cu, false),
                            note: format!("{}{}", grid_note(&grid), if trivial { ";trivial" } else { "" }),
                        };
                        let rhs = pow2(N as f64 * i as f64 / 2.0) / d3 as f64 * norms;
                        let r = row("b2", c, lhs, rhs, "block", seed);
                        if slot == 0 {
                            out.0.push(r);
                        } else {
                            out.1.push(r);
                        }
                    }
                }
            }
        }
        Ok(out)
    })?;
    Ok(sweep)
}

// ---------------------------------------------------------------------------
// estimates involving Y spaces (low-high interactions, i = 0)

fn y_untestable(id: &str) -> Vec<String> {
    (1..=LAB_MAX_ANNULUS)
        .map(|i| format!("{id} i={i}: needs j ≥ {} > {LAB_MAX_ANNULUS} (UNTESTABLE-AT-SCALE)", 2 * (N as u32 + 2) * i))
        .collect()
}

fn y_grids() -> Result<(GridSpec, GridSpec)> {
    let base = GridSpec::new(N, 64, 1024)?;
    Ok((base, base.doubled()))
}

fn x01(f: &Spectrum) -> f64 {
    xshalf_p_norm(f, 0.0, true, 1.0, false).total
}

fn y1(cfg: &SweepConfig) -> Result<Sweep> {
    let (base, fine) = y_grids()?;
    let mut sweep = Sweep::new("y1");
    sweep.untestable = y_untestable("y1");
    collect(&mut sweep, cfg.samples, |k| {
        let (mut rng, seed) = sample_rng(cfg, "y1", k);
        let (i, j) = (0u32, rng.gen_range(1..=3u32));
        let d = 1u64 << rng.gen_range(0..=(j - i));
        let d1 = *pick(&modulation_values(i), &mut rng);
        let d2 = 1u64 << rng.gen_range(0..=d.trailing_zeros());
        let u = scaled(block_field(base, i, d1, false, random_family(&mut rng), cfg.cap, &mut rng)?, cfg.scale);
        let v0 = scaled(block_field(base, j, d2, false, random_family(&mut rng), cfg.cap, &mut rng)?, cfg.scale);
        let v = at_most(&piece(v0, j), d, false)?.field;
        let mut out = (Vec::new(), Vec::new());
        for (slot, grid) in [base, fine].into_iter().enumerate() {
            let v = v.with_grid(grid)?;
            let yv = y_norm(&v, 0.0).total;
            for cu in [false, true] {
                let uu = u.with_grid(grid)?;
                let uu = if cu { uu.conj_field() } else { uu };
                let lhs = bilinear_tilde(&uu, &v, grid)?.norm_l2();
                let rhs = pow2(((N as f64 - 1.0) * i as f64 - j as f64) / 2.0) * x01(&u) * yv;
                let c = EstimateConfig {
                    i: Some(i),
                    j: Some(j),
                    d1: Some(d1),
                    d2: Some(d),
                    signs: product_label(cu, false),
                    note: grid_note(&grid),
                    ..Default::default()
                };
                let r = row("y1", c, lhs, rhs, "block", seed);
                if slot == 0 {
                    out.0.push(r);
                } else {
                    out.1.push(r);
                }
            }
        }
        Ok(out)
    })?;
    Ok(sweep)
}

fn y2(cfg: &SweepConfig) -> Result<Sweep> {
    let (base, fine) = y_grids()?;
    let mut sweep = Sweep::new("y2");
    sweep.untestable = y_untestable("y2");
    collect(&mut sweep, cfg.samples, |k| {
        let (mut rng, seed) = sample_rng(cfg, "y2", k);
        let (i, j) = (0u32, rng.gen_range(1..=3u32));
        let d = 1u64 << rng.gen_range(0..=(j - i));
        let d1 = *pick(&modulation_values(i), &mut rng);
        let u = scaled(block_field(base, i, d1, false, random_family(&mut rng), cfg.cap, &mut rng)?, cfg.scale);
        let loc = Localization::near(j, 2 * d as i64, random_family(&mut rng));
        let v = scaled(localized(base, &loc, &mut rng)?, cfg.scale);
        let mut out = (Vec::new(), Vec::new());
        for (slot, grid) in [base, fine].into_iter().enumerate() {
            let v = v.with_grid(grid)?;
            for cu in [false, true] {
                let uu = u.with_grid(grid)?;
                let uu = if cu { uu.conj_field() } else { uu };
                let p = bilinear_tilde(&uu, &v, grid)?;
                let local = at_most(&annulus_project(&p, j)?, d, false)?.field;
                let lhs = scripty_norm(&local, 0.0).total;
                let rhs = pow2(((N as f64 - 1.0) * i as f64 - j as f64) / 2.0) * x01(&u) * v.norm_l2();
                let c = EstimateConfig {
                    i: Some(i),
                    j: Some(j),
                    d1: Some(d1),
                    d3: Some(d),
                    signs: product_label(cu, false),
                    note: grid_note(&grid),
                    ..Default::default()
                };
                let r = row("y2", c, lhs, rhs, loc.family.name(), seed);
                if slot == 0 {
                    out.0.push(r);
                } else {
                    out.1.push(r);
                }
            }
        }
        Ok(out)
    })?;
    Ok(sweep)
}

/// Random spatial frequency with 2^{i-1} ≤ ⟨ξ⟩ ≤ 2^{i+1}.
fn spatial_point<R: Rng>(i: u32, rng: &mut R) -> [i64; MAX_DIM] {
    let b = 1i64 << (i + 1);
    loop {
        let mut xi = [0i64; MAX_DIM];
        for x in xi.iter_mut().take(N) {
            *x = rng.gen_range(-b..=b);
        }
        if super::measure::in_spatial_annulus(&xi[..N], i) {
            return xi;
        }
    }
}

/// One spatial frequency, τ ∈ {τ₀, τ₀+1} with τ₀ near ξ².
fn unit_tube<R: Rng>(grid: GridSpec, xi: [i64; MAX_DIM], rng: &mut R) -> Result<Spectrum> {
    let x2: i64 = xi[..N].iter().map(|v| v * v).sum();
    let t0 = x2 + rng.gen_range(-2..=1);
    let amp = |rng: &mut R| Complex64::from_polar(rng.gen_range(0.05..1.0), rng.gen_range(0.0..TAU));
    let (a, b) = (amp(rng), amp(rng));
    Spectrum::from_modes(grid, [(Freq { xi, tau: t0 }, a), (Freq { xi, tau: t0 + 1 }, b)])
}

fn m9(cfg: &SweepConfig) -> Result<Sweep> {
    let base = GridSpec::new(N, 128, 4096)?;
    let fine = base.doubled();
    let mut sweep = Sweep::new("m9");
    sweep.untestable = y_untestable("m9");
    collect(&mut sweep, cfg.samples, |k| {
        let (mut rng, seed) = sample_rng(cfg, "m9", k);
        let (i, j) = (0u32, rng.gen_range(1..=LAB_MAX_ANNULUS));
        let eta = spatial_point(j, &mut rng);
        let e2: i64 = eta[..N].iter().map(|v| v * v).sum();
        let width = rng.gen_range(0..=3i64);
        let f = Spectrum::from_modes(
            base,
            (-width..=width).map(|m| {
                (Freq { xi: eta, tau: e2 + m }, Complex64::from_polar(rng.gen_range(0.05..1.0), rng.gen_range(0.0..TAU)))
            }),
        )?;
        let f = scaled(f, cfg.scale);
        let g = scaled(unit_tube(base, spatial_point(i, &mut rng), &mut rng)?, cfg.scale);
        let mut out = (Vec::new(), Vec::new());
        for (slot, grid) in [base, fine].into_iter().enumerate() {
            let (f, g) = (f.with_grid(grid)?, g.with_grid(grid)?);
            let lhs = bilinear_tilde(&f, &g, grid)?.norm_l2();
            let rhs = pow2(-((N as f64 - 1.0) * i as f64 + j as f64) / 2.0) * y_norm(&f, 0.0).total * g.norm_l2();
            let c = EstimateConfig { i: Some(i), j: Some(j), note: grid_note(&grid), ..Default::default() };
            let r = row("m9", c, lhs, rhs, "column", seed);
            if slot == 0 {
                out.0.push(r);
            } else {
                out.1.push(r);
            }
        }
        Ok(out)
    })?;
    Ok(sweep)
}

/// Σ_{m,l} ‖g‖²_{L^∞(Q_i^{m,l})} for a single-column g. |g| is constant in
/// x, so every one of the cubes of side ≈ 2^i sees sup over its unit time
/// slab of |a(t)|. Cubes per axis: round(2π/2^i); unit slabs: round(2π).
pub fn cube_sup_sum(g: &Spectrum, i: u32) -> Result<f64> {
    let grid = *g.grid();
    let cols = g.columns();
    if cols.len() != 1 {
        return Err(Error::InvalidArgument("cube sums need a single spatial frequency".into()));
    }
    let cubes = (TAU / pow2(i as f64)).round().max(1.0).powi(N as i32);
    let slabs = TAU.round() as usize;
    let a = cols[0].time_series(&grid);
    let mut sup = vec![0.0f64; slabs];
    for (l, v) in a.iter().enumerate() {
        let slab = (slabs * l / grid.k()).min(slabs - 1);
        sup[slab] = sup[slab].max(v.norm_sqr());
    }
    Ok(cubes * sup.iter().sum::<f64>())
}

fn c0(cfg: &SweepConfig) -> Result<Sweep> {
    let base = GridSpec::new(N, 32, 512)?;
    let fine = base.doubled();
    let mut sweep = Sweep::new("c0");
    for i in 3..=LAB_MAX_ANNULUS {
        sweep.untestable.push(format!(
            "c0 i={i}: cubes of side 2^{i} exceed the 2π period (UNTESTABLE-AT-SCALE)"
        ));
    }
    collect(&mut sweep, cfg.samples, |k| {
        let (mut rng, seed) = sample_rng(cfg, "c0", k);
        let i = rng.gen_range(0..=2u32);
        let g = scaled(unit_tube(base, spatial_point(i, &mut rng), &mut rng)?, cfg.scale);
        let mut out = (Vec::new(), Vec::new());
        for (slot, grid) in [base, fine].into_iter().enumerate() {
            let g = g.with_grid(grid)?;
            let lhs = cube_sup_sum(&g, i)?;
            let rhs = pow2(-(N as f64) * i as f64) * g.norm_l2().powi(2);
            let c = EstimateConfig { i: Some(i), note: grid_note(&grid), ..Default::default() };
            let r = row("c0", c, lhs, rhs, "column", seed);
            if slot == 0 {
                out.0.push(r);
            } else {
                out.1.push(r);
            }
        }
        Ok(out)
    })?;
    Ok(sweep)
}

fn y6(cfg: &SweepConfig) -> Result<Sweep> {
    let (base, fine) = y_grids()?;
    let s = cfg.s;
    let mut sweep = Sweep::new("y6");
    sweep.untestable = y_untestable("y6");
    collect(&mut sweep, cfg.samples, |k| {
        let (mut rng, seed) = sample_rng(cfg, "y6", k);
        let (i, j) = (0u32, rng.gen_range(1..=3u32));
        let lu = Localization::near(i, rng.gen_range(0..=2), random_family(&mut rng));
        let lv = Localization::near(j, 1 << rng.gen_range(0..=j), random_family(&mut rng));
        let u = scaled(localized(base, &lu, &mut rng)?, cfg.scale);
        let v = scaled(localized(base, &lv, &mut rng)?, cfg.scale);
        let mut out = (Vec::new(), Vec::new());
        for (slot, grid) in [base, fine].into_iter().enumerate() {
            let (u, v) = (u.with_grid(grid)?, v.with_grid(grid)?);
            let b = annulus_project(&bilinear_b(&u, &v, grid)?, j)?.field;
            let lhs = w_norm(&b, s).total;
            let rhs = max1sq(i) * pow2((N as f64 / 2.0 - s) * i as f64) * z_norm(&u, s).total * z_norm(&v, s).total;
            let c = EstimateConfig {
                i: Some(i),
                j: Some(j),
                d1: Some(lu.max_mod as u64),
                d2: Some(lv.max_mod as u64),
                signs: "P,P".into(),
                note: format!("s={s};{}", grid_note(&grid)),
                ..Default::default()
            };
            let r = row("y6", c, lhs, rhs, &format!("{}/{}", lu.family.name(), lv.family.name()), seed);
            if slot == 0 {
                out.0.push(r);
            } else {
                out.1.push(r);
            }
        }
        Ok(out)
    })?;
    Ok(sweep)
}

// ---------------------------------------------------------------------------
// algebra and multiplication

fn algebra_grids() -> Result<(GridSpec, GridSpec)> {
    let base = GridSpec::new(N, 32, 256)?;
    Ok((base, base.doubled()))
}

/// Random field near P (or P̄) in annulus ≤ 2 with modulation ≤ max_mod.
fn near_field<R: Rng>(grid: GridSpec, max_mod_choices: &[i64], conjugate: bool, rng: &mut R) -> Result<(Spectrum, Localization)> {
    let i = rng.gen_range(0..=2u32);
    let mut loc = Localization::near(i, *pick(max_mod_choices, rng), random_family(rng));
    loc.conjugate = conjugate;
    Ok((localized(grid, &loc, rng)?, loc))
}

fn zzbar(f: &Spectrum, s: f64) -> f64 {
    conj_sum_norm(f, |g| z_norm(g, s).total)
}

fn xxbar(f: &Spectrum, s: f64) -> f64 {
    conj_sum_norm(f, |g| xs1(g, s))
}

/// Shared driver for the pair sweeps: `eval(u, v, grid)` returns (lhs, rhs).
fn pair_sweep<G, E>(id: &str, cfg: &SweepConfig, gen: G, eval: E) -> Result<Sweep>
where
    G: Fn(GridSpec, &mut ChaCha8Rng) -> Result<(Spectrum, Spectrum, String, String)> + Sync,
    E: Fn(&Spectrum, &Spectrum, GridSpec) -> Result<(f64, f64)> + Sync,
{
    let (base, fine) = algebra_grids()?;
    let mut sweep = Sweep::new(id);
    collect(&mut sweep, cfg.samples, |k| {
        let (mut rng, seed) = sample_rng(cfg, id, k);
        let (u, v, signs, sample) = gen(base, &mut rng)?;
        let (u, v) = (scaled(u, cfg.scale), scaled(v, cfg.scale));
        let mut out = (Vec::new(), Vec::new());
        for (slot, grid) in [base, fine].into_iter().enumerate() {
            let (lhs, rhs) = eval(&u.with_grid(grid)?, &v.with_grid(grid)?, grid)?;
            let c = EstimateConfig {
                signs: signs.clone(),
                note: format!("s={};{}", cfg.s, grid_note(&grid)),
                ..Default::default()
            };
            let r = row(id, c, lhs, rhs, &sample, seed);
            if slot == 0 {
                out.0.push(r);
            } else {
                out.1.push(r);
            }
        }
        Ok(out)
    })?;
    Ok(sweep)
}

const SMALL_MODS: [i64; 4] = [0, 1, 2, 4];

fn algebra_z(cfg: &SweepConfig) -> Result<Sweep> {
    let s = cfg.s;
    pair_sweep(
        "algebra-Z",
        cfg,
        |g, rng| {
            let (u, lu) = near_field(g, &SMALL_MODS, false, rng)?;
            let (v, lv) = near_field(g, &SMALL_MODS, false, rng)?;
            Ok((u, v, "P,P".into(), format!("{}/{}", lu.family.name(), lv.family.name())))
        },
        |u, v, grid| Ok((z_norm(&u.product(v, grid)?, s).total, z_norm(u, s).total * z_norm(v, s).total)),
    )
}

fn algebra_zzbar(cfg: &SweepConfig) -> Result<Sweep> {
    let s = cfg.s;
    pair_sweep(
        "algebra-ZZbar",
        cfg,
        |g, rng| {
            let (u, lu) = near_field(g, &SMALL_MODS, false, rng)?;
            let (v, lv) = near_field(g, &SMALL_MODS, false, rng)?;
            Ok((u, v, "Pbar,P".into(), format!("{}/{}", lu.family.name(), lv.family.name())))
        },
        |u, v, grid| {
            let w = u.conj_field().product(v, grid)?;
            Ok((zzbar(&w, s), z_norm(u, s).total * z_norm(v, s).total))
        },
    )
}

fn y4(cfg: &SweepConfig) -> Result<Sweep> {
    let s = cfg.s;
    pair_sweep(
        "y4",
        cfg,
        |g, rng| {
            let (cu, cv) = (rng.gen_bool(0.5), rng.gen_bool(0.5));
            let (u, lu) = near_field(g, &[0, 2, 8, 16], cu, rng)?;
            let (v, lv) = near_field(g, &[0, 2, 8, 16], cv, rng)?;
            Ok((u, v, sheets_label(cu, cv), format!("{}/{}", lu.family.name(), lv.family.name())))
        },
        |u, v, grid| Ok((xxbar(&u.product(v, grid)?, s), xxbar(u, s) * xxbar(v, s))),
    )
}

fn mult_w(cfg: &SweepConfig) -> Result<Sweep> {
    let s = cfg.s;
    pair_sweep(
        "mult-W",
        cfg,
        |g, rng| {
            let cu = rng.gen_bool(0.5);
            let (u, lu) = near_field(g, &SMALL_MODS, cu, rng)?;
            let (w, lw) = near_field(g, &[1, 4, 16, 32], false, rng)?;
            Ok((u, w, sheets_label(cu, false), format!("{}/{}", lu.family.name(), lw.family.name())))
        },
        |u, w, grid| Ok((w_norm(&u.product(w, grid)?, s).total, zzbar(u, s) * w_norm(w, s).total)),
    )
}

/// Modulation of a mode relative to its nearer paraboloid, for reports.
pub fn nearer_modulation(p: &Freq) -> i64 {
    let (a, b) = (modulation(p, false), modulation(p, true));
    if a.abs() <= b.abs() {
        a
    } else {
        b
    }
}
