//! Dyadic cutoffs, annulus/modulation projections, shell split, cube and tube
//! localizations, and the refined decompositions.

pub mod cutoff;
pub mod localize;
pub mod refined;
pub mod tubes;

use serde::Serialize;

pub use cutoff::{cube_profile, s, s0, CutoffFamily, TimeCutoff};
pub use localize::{
    annulus_project, annulus_weight, at_least, at_most, cube_decompose, cube_localize, CubePiece, dist_to_paraboloid, modulation_project,
    modulation_values, modulation_weight, near_weight, shell_split, shell_split_with, Band, DyadicPiece,
};
pub use refined::{refined_decompose, RefinedKey, SubPiece};
pub use tubes::{column_tube_norms, tube_restrict, TubeIndex, TubeSamples};

use crate::error::Result;
use crate::spectral::{FrequencyField, Spectral};

/// One row of a decomposition manifest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PieceRow {
    pub i: u32,
    pub d: u64,
    pub l2: f64,
}

/// ℓ² mass of every S_{i,d} piece, i up to the grid cover.
pub fn piece_table<S: Spectral>(f: &S, conjugate: bool) -> Result<Vec<PieceRow>> {
    let mut rows = Vec::new();
    for i in 0..=f.grid().i_cover() {
        let a = annulus_project(f, i)?;
        for d in modulation_values(i) {
            let p = modulation_project(&a, d, conjugate)?;
            rows.push(PieceRow { i, d, l2: p.field.norm_l2() });
        }
    }
    Ok(rows)
}

/// Relative reconstruction errors of each decomposition family.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Reconstruction {
    pub annulus: f64,
    pub modulation: f64,
    pub cube: f64,
    pub shell: f64,
    pub refined: f64,
}

impl Reconstruction {
    pub fn worst(&self) -> f64 {
        [self.annulus, self.modulation, self.cube, self.shell, self.refined].into_iter().fold(0.0, f64::max)
    }
}

/// Decompose `f` every supported way and measure how well each sums back.
pub fn reconstruction_errors(f: &FrequencyField) -> Result<Reconstruction> {
    let g = *f.grid();
    let mut annulus_sum = FrequencyField::zeros(g);
    let mut worst_mod: f64 = 0.0;
    let mut refined_sum = FrequencyField::zeros(g);
    let mut refined_target = FrequencyField::zeros(g);
    for i in 0..=g.i_cover() {
        let a = annulus_project(f, i)?;
        annulus_sum.add_assign(&a.field)?;
        let mut msum = FrequencyField::zeros(g);
        for d in modulation_values(i) {
            let p = modulation_project(&a, d, false)?;
            if i >= 2 && d <= 1u64 << (2 * i - 4) {
                accumulate(&mut refined_sum, &refined_decompose(&p)?)?;
                refined_target.add_assign(&p.field)?;
            }
            msum.add_assign(&p.field)?;
        }
        worst_mod = worst_mod.max(rel(&msum, &a.field));
        if i >= 2 {
            let tail = at_least(&a, 1u64 << (2 * i - 3), false)?;
            accumulate(&mut refined_sum, &refined_decompose(&tail)?)?;
            refined_target.add_assign(&tail.field)?;
        }
    }
    let mut cube_sum = FrequencyField::zeros(g);
    {
        let vals = cube_sum.values_mut();
        for piece in cube_decompose(f) {
            for (p, v) in piece.modes {
                vals[g.index_wrapped(&p)] += v;
            }
        }
    }
    let (near, far) = shell_split(f);
    Ok(Reconstruction {
        annulus: rel(&annulus_sum, f),
        modulation: worst_mod,
        cube: rel(&cube_sum, f),
        shell: rel(&near.add(&far)?, f),
        refined: rel(&refined_sum, &refined_target),
    })
}

fn accumulate(acc: &mut FrequencyField, subs: &[SubPiece]) -> Result<()> {
    let g = *acc.grid();
    let vals = acc.values_mut();
    for sp in subs {
        for (p, v) in &sp.modes {
            vals[g.index_wrapped(p)] += v;
        }
    }
    Ok(())
}

fn rel(a: &FrequencyField, b: &FrequencyField) -> f64 {
    if b.norm_l2() == 0.0 {
        return a.norm_l2();
    }
    a.rel_err(b)
}
