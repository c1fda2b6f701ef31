//! Conical sectors of angular width α and the near-perpendicularity
//! relation between them.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use super::measure::ParaboloidMeasure;
use crate::error::{Error, Result};
use crate::spectral::MAX_DIM;

/// One sector: a box in angular coordinates. In n = 2 only the azimuth is
/// used; in n = 3 the polar band is [polar.0, polar.1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub azimuth: (f64, f64),
    pub polar: (f64, f64),
}

impl Sector {
    fn center(&self, n: usize) -> [f64; MAX_DIM] {
        let a = 0.5 * (self.azimuth.0 + self.azimuth.1);
        match n {
            1 => [a.cos().signum(), 0.0, 0.0],
            2 => [a.cos(), a.sin(), 0.0],
            _ => {
                let p = 0.5 * (self.polar.0 + self.polar.1);
                [p.sin() * a.cos(), p.sin() * a.sin(), p.cos()]
            }
        }
    }

    /// Largest angle between the center and any direction in the sector.
    fn radius(&self, n: usize) -> f64 {
        match n {
            1 => 0.0,
            2 => 0.5 * (self.azimuth.1 - self.azimuth.0),
            _ => {
                let c = self.center(3);
                let mut r: f64 = 0.0;
                for p in [self.polar.0, self.polar.1] {
                    for a in [self.azimuth.0, self.azimuth.1] {
                        let d = [p.sin() * a.cos(), p.sin() * a.sin(), p.cos()];
                        r = r.max(angle(&c, &d));
                    }
                }
                r
            }
        }
    }
}

fn angle(a: &[f64; MAX_DIM], b: &[f64; MAX_DIM]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    (d / (na * nb)).clamp(-1.0, 1.0).acos()
}

/// Sectors covering the sphere of directions, each of angular diameter at
/// most α, with l ⊥ l′ when some pair of their directions makes an angle
/// within α of π/2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorDecomposition {
    pub n: usize,
    pub alpha: f64,
    pub sectors: Vec<Sector>,
    pub perp: Vec<Vec<usize>>,
}

impl SectorDecomposition {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidArgument(format!("alpha = {alpha} outside (0, 1]")));
        }
        let sectors = match n {
            1 => vec![
                Sector { azimuth: (-FRAC_PI_2, FRAC_PI_2), polar: (0.0, 0.0) },
                Sector { azimuth: (FRAC_PI_2, 3.0 * FRAC_PI_2), polar: (0.0, 0.0) },
            ],
            2 => {
                let count = (TAU / alpha).ceil() as usize;
                let w = TAU / count as f64;
                (0..count).map(|l| Sector { azimuth: (l as f64 * w, (l + 1) as f64 * w), polar: (0.0, 0.0) }).collect()
            }
            3 => {
                // boxes of side α/√2 in (polar, sin·azimuth)
                let side = alpha / 2f64.sqrt();
                let bands = (PI / side).ceil() as usize;
                let h = PI / bands as f64;
                let mut out = Vec::new();
                for b in 0..bands {
                    let (p0, p1) = (b as f64 * h, (b + 1) as f64 * h);
                    let widest = if p0 < FRAC_PI_2 && p1 > FRAC_PI_2 { 1.0 } else { p0.sin().max(p1.sin()) };
                    let count = ((TAU * widest / side).ceil() as usize).max(1);
                    let w = TAU / count as f64;
                    for l in 0..count {
                        out.push(Sector { azimuth: (l as f64 * w, (l + 1) as f64 * w), polar: (p0, p1) });
                    }
                }
                out
            }
            _ => return Err(Error::InvalidArgument(format!("dimension {n}"))),
        };
        let perp = (0..sectors.len()).map(|l| perpendicular(n, alpha, &sectors, l)).collect();
        Ok(SectorDecomposition { n, alpha, sectors, perp })
    }

    pub fn len(&self) -> usize {
        self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }

    /// Sector containing the direction of ξ; ξ = 0 goes to sector 0.
    pub fn sector_of(&self, xi: &[i64]) -> usize {
        let x: Vec<f64> = xi[..self.n].iter().map(|&v| v as f64).collect();
        if x.iter().all(|&v| v == 0.0) {
            return 0;
        }
        match self.n {
            1 => usize::from(x[0] < 0.0),
            2 => {
                let a = x[1].atan2(x[0]).rem_euclid(TAU);
                self.find(|s| a >= s.azimuth.0 && a < s.azimuth.1)
            }
            _ => {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                let p = (x[2] / r).clamp(-1.0, 1.0).acos();
                let a = x[1].atan2(x[0]).rem_euclid(TAU);
                self.find(|s| {
                    (p >= s.polar.0 && p < s.polar.1 || p == PI && s.polar.1 >= PI)
                        && a >= s.azimuth.0
                        && a < s.azimuth.1
                })
            }
        }
    }

    fn find(&self, pred: impl Fn(&Sector) -> bool) -> usize {
        self.sectors.iter().position(pred).unwrap_or(self.sectors.len() - 1)
    }

    pub fn are_perpendicular(&self, a: usize, b: usize) -> bool {
        self.perp[a].contains(&b)
    }

    /// Split a density by sector. Errors when α is finer than the lattice
    /// spacing seen at the outer radius of the support.
    pub fn split(&self, m: &ParaboloidMeasure) -> Result<Vec<ParaboloidMeasure>> {
        if m.n() != self.n {
            return Err(Error::Mismatch("measure and sectors differ in dimension".into()));
        }
        let r = m.radius();
        if self.n > 1 && self.alpha * r < 1.0 && r > 0.0 {
            return Err(Error::InvalidArgument(format!(
                "alpha = {} is below the angular resolution 1/{r:.2} of the lattice",
                self.alpha
            )));
        }
        let mut parts = vec![Vec::new(); self.len()];
        for (xi, v) in m.density() {
            parts[self.sector_of(&xi[..self.n])].push((*xi, *v));
        }
        parts.into_iter().map(|d| m.with_density(d)).collect()
    }
}

fn perpendicular(n: usize, alpha: f64, sectors: &[Sector], l: usize) -> Vec<usize> {
    match n {
        1 => Vec::new(),
        2 => {
            let s = sectors[l];
            (0..sectors.len())
                .filter(|&k| {
                    // differences θ' − θ sweep an open interval of width 2w
                    let t = sectors[k];
                    let lo = t.azimuth.0 - s.azimuth.1;
                    let hi = t.azimuth.1 - s.azimuth.0;
                    [FRAC_PI_2, -FRAC_PI_2].iter().any(|&target| {
                        (-2..=2).any(|wrap| {
                            let c = target + wrap as f64 * TAU;
                            lo < c + alpha && hi > c - alpha
                        })
                    })
                })
                .collect()
        }
        _ => {
            let c = sectors[l].center(3);
            let r = sectors[l].radius(3);
            (0..sectors.len())
                .filter(|&k| {
                    let a = angle(&c, &sectors[k].center(3));
                    (a - FRAC_PI_2).abs() <= alpha + r + sectors[k].radius(3)
                })
                .collect()
        }
    }
}

/// The split parts in sector order, summed back into one density.
pub fn reassemble(parts: &[ParaboloidMeasure]) -> Vec<([i64; MAX_DIM], num_complex::Complex64)> {
    let mut all: Vec<_> = parts.iter().flat_map(|p| p.density().iter().copied()).collect();
    all.sort_by(|a, b| a.0.cmp(&b.0));
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::measure::{random_density, Sheet};
    use crate::sample::Family;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn counts_follow_alpha() {
        let one = SectorDecomposition::new(2, 1.0).unwrap();
        assert_eq!(one.len(), 7);
        let fine = SectorDecomposition::new(2, 0.125).unwrap();
        let target = TAU / 0.125;
        assert!(fine.len() as f64 <= 2.0 * target && fine.len() as f64 >= target / 2.0);
        for l in 0..fine.len() {
            let p = fine.perp[l].len();
            assert!((2..=12).contains(&p), "sector {l} has {p} perpendicular partners");
        }
        let three = SectorDecomposition::new(3, 0.5).unwrap();
        let target = 4.0 * PI / 0.25;
        assert!(three.len() as f64 <= 4.0 * target && three.len() as f64 >= target / 4.0);
        assert!(SectorDecomposition::new(2, 0.0).is_err());
    }

    #[test]
    fn split_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = random_density(2, Sheet::P, 3, Family::Annulus, 400, &mut rng).unwrap();
        let d = SectorDecomposition::new(2, 0.25).unwrap();
        let parts = d.split(&m).unwrap();
        let mut orig = m.density().to_vec();
        orig.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(reassemble(&parts), orig);
        let small = random_density(2, Sheet::P, 1, Family::Annulus, 400, &mut rng).unwrap();
        assert!(SectorDecomposition::new(2, 0.05).unwrap().split(&small).is_err());
    }

    #[test]
    fn every_direction_has_a_sector_within_alpha() {
        let d = SectorDecomposition::new(2, 0.25).unwrap();
        for x in -6..=6i64 {
            for y in -6..=6i64 {
                if x == 0 && y == 0 {
                    continue;
                }
                let s = d.sectors[d.sector_of(&[x, y])];
                let a = (y as f64).atan2(x as f64).rem_euclid(TAU);
                assert!(a >= s.azimuth.0 && a < s.azimuth.1);
                assert!(s.azimuth.1 - s.azimuth.0 <= 0.25);
            }
        }
    }
}
