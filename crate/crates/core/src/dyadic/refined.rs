use num_complex::Complex64;
use serde::Serialize;

use super::localize::{Band, DyadicPiece};
use crate::error::{Error, Result};
use crate::spectral::{modulation, Freq, FrequencyField, Spectral};

/// Index of a refined sub-piece. Every integer ξ is its own refined cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum RefinedKey {
    /// g_{ξ, ξ² + k} (signed offset k = τ ∓ ξ²), from the small-modulation regime.
    Offset { xi: [i64; 3], k: i64 },
    /// g_{ξ, l}, from the large-modulation tail.
    Level { xi: [i64; 3], l: i64 },
}

impl RefinedKey {
    pub fn xi(&self) -> [i64; 3] {
        match self {
            RefinedKey::Offset { xi, .. } | RefinedKey::Level { xi, .. } => *xi,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SubPiece {
    pub key: RefinedKey,
    pub modes: Vec<(Freq, Complex64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    SmallModulation,
    Tail,
}

pub fn regime<S>(p: &DyadicPiece<S>) -> Result<Regime> {
    let i = p.i;
    match p.band {
        Band::Exact(d) if i >= 2 && d <= 1u64 << (2 * i - 4) => Ok(Regime::SmallModulation),
        Band::AtLeast(d) if i >= 2 && d == 1u64 << (2 * i - 3) => Ok(Regime::Tail),
        _ => Err(Error::Inadmissible(format!(
            "piece (i={i}, band={:?}) is in neither refined regime",
            p.band
        ))),
    }
}

/// Split a piece into refined sub-pieces g_{ξ,ξ²±k} or g_{ξ,l}.
pub fn refined_decompose<S: Spectral>(p: &DyadicPiece<S>) -> Result<Vec<SubPiece>> {
    let reg = regime(p)?;
    let mut keyed: Vec<(RefinedKey, Freq, Complex64)> = Vec::new();
    p.field.for_each_mode(|f, v| {
        let key = match reg {
            Regime::SmallModulation => RefinedKey::Offset { xi: f.xi, k: modulation(f, p.conjugate) },
            Regime::Tail => RefinedKey::Level { xi: f.xi, l: f.tau },
        };
        keyed.push((key, *f, v));
    });
    keyed.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out: Vec<SubPiece> = Vec::new();
    for (key, f, v) in keyed {
        match out.last_mut() {
            Some(sp) if sp.key == key => sp.modes.push((f, v)),
            _ => out.push(SubPiece { key, modes: vec![(f, v)] }),
        }
    }
    Ok(out)
}

/// Sum sub-pieces back into a dense field.
pub fn reassemble(grid: crate::spectral::GridSpec, pieces: &[SubPiece]) -> Result<FrequencyField> {
    let mut out = FrequencyField::zeros(grid);
    for sp in pieces {
        for (f, v) in &sp.modes {
            let cur = out.get(f);
            out.set(f, cur + v)?;
        }
    }
    Ok(out)
}
