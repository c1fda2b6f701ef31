//! Embedding sweeps: X^{s,1/2,1} ⊂ Z^s, X^{s,1/2,1} ⊂ Y^s and 𝒴^s ⊂ X^{s,-1/2,∞}
//! measured on random localized fields at two grid resolutions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{scripty_norm, xshalf_p_norm, y_norm, z_norm};
use crate::error::Result;
use crate::report::{max_ratio, EstimateConfig, EstimateReport};
use crate::sample::{localized, region_points, Family, Localization};
use crate::spectral::{GridSpec, Spectral, Spectrum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Embedding {
    XToZ,
    XToY,
    ScriptYToX,
}

impl Embedding {
    pub const ALL: [Embedding; 3] = [Embedding::XToZ, Embedding::XToY, Embedding::ScriptYToX];

    pub fn id(&self) -> &'static str {
        match self {
            Embedding::XToZ => "embed-x-z",
            Embedding::XToY => "embed-x-y",
            Embedding::ScriptYToX => "embed-scripty-x",
        }
    }

    /// (smaller-space norm, larger-space norm), so lhs ≤ C·rhs.
    pub fn sides<S: Spectral>(&self, f: &S, s: f64) -> (f64, f64) {
        match self {
            Embedding::XToZ => (z_norm(f, s).total, xshalf_p_norm(f, s, true, 1.0, false).total),
            Embedding::XToY => (y_norm(f, s).total, xshalf_p_norm(f, s, true, 1.0, false).total),
            Embedding::ScriptYToX => (xshalf_p_norm(f, s, false, f64::INFINITY, false).total, scripty_norm(f, s).total),
        }
    }
}

/// Reports on the base grid and on its doubling, sample by sample.
#[derive(Clone, Debug)]
pub struct EmbeddingSweep {
    pub base: Vec<EstimateReport>,
    pub fine: Vec<EstimateReport>,
}

impl EmbeddingSweep {
    pub fn max_base(&self) -> f64 {
        max_ratio(&self.base)
    }

    pub fn max_fine(&self) -> f64 {
        max_ratio(&self.fine)
    }

    /// |C_fine − C_base| / C_base.
    pub fn refinement_change(&self) -> f64 {
        let (a, b) = (self.max_base(), self.max_fine());
        if a == 0.0 {
            b
        } else {
            (b - a).abs() / a
        }
    }
}

/// Random localized field whose support fits the base grid.
pub fn random_localized(grid: GridSpec, rng: &mut ChaCha8Rng) -> Result<(Spectrum, Localization)> {
    loop {
        let i = rng.gen_range(0..=grid.i_max());
        let max_mod = [0i64, 1, 2, 4, 8][rng.gen_range(0..5)];
        let family = Family::ALL[rng.gen_range(0..Family::ALL.len())];
        let loc = Localization::near(i, max_mod, family);
        if region_points(&grid, &loc).is_empty() {
            continue;
        }
        return Ok((localized(grid, &loc, rng)?, loc));
    }
}

pub fn embedding_sweep(e: Embedding, base: GridSpec, s: f64, samples: usize, seed: u64) -> Result<EmbeddingSweep> {
    let fine_grid = base.doubled();
    let mut out = EmbeddingSweep { base: Vec::with_capacity(samples), fine: Vec::with_capacity(samples) };
    for k in 0..samples {
        let sseed = seed.wrapping_mul(1_000_003).wrapping_add(k as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(sseed);
        let (f, loc) = random_localized(base, &mut rng)?;
        let fine = f.with_grid(fine_grid)?;
        let cfg = EstimateConfig {
            i: Some(loc.i),
            d1: Some(loc.max_mod as u64),
            note: format!("s={s}"),
            ..Default::default()
        };
        for (g, sp, dst) in [(base, &f, &mut out.base), (fine_grid, &fine, &mut out.fine)] {
            let (l, r) = e.sides(sp, s);
            let mut c = cfg.clone();
            c.note = format!("s={s};grid={}x{}", g.m(), g.k());
            dst.push(EstimateReport::new(e.id(), c, l, r, loc.family.name(), sseed));
        }
    }
    Ok(out)
}
