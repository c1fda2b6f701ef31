//! The sphere in the stereographic chart: projection, the coefficient
//! Q(u,ū) = 2ū/(1+|u|²), the map energy and the tension field.

use num_complex::Complex64;

use super::spectral_ops::{gradient_spatial, laplacian_spatial, second_partial_spatial};
use crate::error::{Error, Result};
use crate::spectral::SpatialField;

/// Point of the unit sphere for z ∈ ℂ; z = 0 is the north pole.
pub fn stereographic(z: Complex64) -> [f64; 3] {
    let r2 = z.norm_sqr();
    let d = 1.0 + r2;
    [2.0 * z.re / d, 2.0 * z.im / d, (1.0 - r2) / d]
}

/// Inverse chart; the south pole (0,0,−1) has no preimage.
pub fn inverse_stereographic(p: [f64; 3]) -> Result<Complex64> {
    let d = 1.0 + p[2];
    if d.abs() < 1e-300 {
        return Err(Error::InvalidArgument("south pole is outside the chart".into()));
    }
    Ok(Complex64::new(p[0] / d, p[1] / d))
}

/// A map at one time, with its cached sup norm.
#[derive(Clone, Debug)]
pub struct MapState {
    z: SpatialField,
    sup_norm: f64,
}

impl MapState {
    pub fn new(z: SpatialField) -> Self {
        let sup_norm = z.sup_norm();
        MapState { z, sup_norm }
    }

    pub fn z(&self) -> &SpatialField {
        &self.z
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }
}

/// How Q is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum QForm {
    /// 2ū Σ_{k ≤ order} (−|u|²)^k; needs ‖u‖_∞ < 1.
    Series(usize),
    /// 2ū/(1+|u|²).
    Exact,
}

/// Bound on |Q − Q_series| when ‖u‖_∞ ≤ sup < 1.
pub fn q_remainder_bound(sup: f64, order: usize) -> f64 {
    2.0 * sup.powi(2 * (order as i32 + 1) + 1) / (1.0 - sup * sup)
}

fn series_sum(x: f64, order: usize) -> f64 {
    (0..=order).rev().fold(0.0, |acc, _| 1.0 - x * acc)
}

/// Pointwise Q. For the series form, also returns the remainder bound.
pub fn q_coefficient(u: &[Complex64], form: QForm) -> Result<(Vec<Complex64>, f64)> {
    match form {
        QForm::Exact => Ok((u.iter().map(|v| 2.0 * v.conj() / (1.0 + v.norm_sqr())).collect(), 0.0)),
        QForm::Series(order) => {
            let sup = u.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if sup >= 1.0 || !sup.is_finite() {
                return Err(Error::SupNorm { sup });
            }
            let q = u.iter().map(|v| 2.0 * v.conj() * series_sum(v.norm_sqr(), order)).collect();
            Ok((q, q_remainder_bound(sup, order)))
        }
    }
}

/// Q(a) − Q(a − d) without cancellation.
pub(crate) fn q_difference(a: Complex64, d: Complex64, form: QForm) -> Complex64 {
    let b = a - d;
    match form {
        QForm::Exact => 2.0 * (d.conj() - a.conj() * b.conj() * d) / ((1.0 + a.norm_sqr()) * (1.0 + b.norm_sqr())),
        QForm::Series(order) => {
            let (x, y) = (a.norm_sqr(), b.norm_sqr());
            let dx = (d * (a.conj() + b.conj())).re;
            // (P(x) − P(y)) / (x − y) with P(x) = Σ (−x)^k
            let (mut h, mut yk, mut sign, mut dd) = (1.0, 1.0, -1.0, 0.0);
            for _ in 1..=order {
                dd += sign * h;
                yk *= y;
                h = x * h + yk;
                sign = -sign;
            }
            2.0 * (d.conj() * series_sum(x, order) + b.conj() * dx * dd)
        }
    }
}

/// ½ ∫ |∇z|² / (1+|z|²)² dx.
pub fn energy(z: &MapState) -> f64 {
    let grid = *z.z.grid();
    let grads = gradient_spatial(&z.z);
    let dv = grid.dx().powi(grid.n() as i32);
    let vals = z.z.values();
    let sum: f64 = (0..vals.len())
        .map(|p| {
            let g2: f64 = grads.iter().map(|g| g[p].norm_sqr()).sum();
            g2 / (1.0 + vals[p].norm_sqr()).powi(2)
        })
        .sum();
    0.5 * sum * dv
}

/// Σ_j (∂_j − (2z̄/(1+|z|²)) ∂_j z) ∂_j z, each term built from the
/// covariant derivative along one axis.
pub fn tension(z: &MapState) -> Result<SpatialField> {
    if z.sup_norm >= 1.0 {
        return Err(Error::SupNorm { sup: z.sup_norm });
    }
    let grid = *z.z.grid();
    let grads = gradient_spatial(&z.z);
    let vals = z.z.values();
    let mut out = vec![Complex64::new(0.0, 0.0); vals.len()];
    for (j, g) in grads.iter().enumerate() {
        let second = second_partial_spatial(&z.z, j);
        for p in 0..vals.len() {
            let gamma = 2.0 * vals[p].conj() / (1.0 + vals[p].norm_sqr());
            out[p] += second[p] - gamma * g[p] * g[p];
        }
    }
    SpatialField::from_values(grid, out)
}

/// Δz − Q(z,z̄)(∇z)², the same field written through Q.
pub fn tension_q_form(z: &MapState) -> Result<SpatialField> {
    if z.sup_norm >= 1.0 {
        return Err(Error::SupNorm { sup: z.sup_norm });
    }
    let grid = *z.z.grid();
    let grads = gradient_spatial(&z.z);
    let lap = laplacian_spatial(&z.z);
    let (q, _) = q_coefficient(z.z.values(), QForm::Exact)?;
    let out = (0..lap.len())
        .map(|p| {
            let g2: Complex64 = grads.iter().map(|g| g[p] * g[p]).sum();
            lap[p] - q[p] * g2
        })
        .collect();
    SpatialField::from_values(grid, out)
}
