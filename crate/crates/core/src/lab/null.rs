//! The interaction symbol ξ·η, the resonance identity and the bilinear
//! forms B(u,v) = ∇u·∇v, B̃(u,v) = uv and B̂(u,v) = F⁻¹(|û| * |v̂|).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dyadic::cutoff::active;
use crate::error::Result;
use crate::spectral::{aniso_norm, convolve, dot, product_factor, Freq, GridSpec, Spectrum, MAX_DIM};

pub fn null_symbol(xi: &[i64], eta: &[i64]) -> i64 {
    xi.iter().zip(eta).map(|(a, b)| a * b).sum()
}

/// τ₁ + τ₂ − |ξ+η|².
pub fn resonance_defect(xi: &[i64], tau1: i64, eta: &[i64], tau2: i64) -> i64 {
    let s2: i64 = xi.iter().zip(eta).map(|(a, b)| (a + b) * (a + b)).sum();
    tau1 + tau2 - s2
}

/// Right side of the resonance identity, (τ₁−ξ²) + (τ₂−η²) − 2ξ·η.
pub fn resonance_split(xi: &[i64], tau1: i64, eta: &[i64], tau2: i64) -> i64 {
    let x2: i64 = xi.iter().map(|a| a * a).sum();
    let e2: i64 = eta.iter().map(|a| a * a).sum();
    (tau1 - x2) + (tau2 - e2) - 2 * null_symbol(xi, eta)
}

/// B(u,v) = ∇u·∇v: symbol −ξ·η.
pub fn bilinear_b(u: &Spectrum, v: &Spectrum, out: GridSpec) -> Result<Spectrum> {
    let c = product_factor(out.n());
    let raw = convolve(u, v, |x, y| -(dot(x, y) as f64), out)?;
    Ok(raw.scale(Complex64::new(c, 0.0)))
}

/// B̃(u,v) = uv.
pub fn bilinear_tilde(u: &Spectrum, v: &Spectrum, out: GridSpec) -> Result<Spectrum> {
    u.product(v, out)
}

/// B̂(u,v) = F⁻¹(|û| * |v̂|).
pub fn bilinear_bhat(u: &Spectrum, v: &Spectrum, out: GridSpec) -> Result<Spectrum> {
    u.abs().product(&v.abs(), out)
}

/// Smallest dyadic d whose modulation cutoff is nonzero at |m|.
pub fn least_modulation(m: i64) -> u64 {
    let k = active(m.unsigned_abs() as f64).next().expect("some cutoff is active");
    1u64 << k
}

/// sup |ξ·η| over support pairs of u and v whose sum lands where `keep`
/// is true.
pub fn sup_symbol(u: &Spectrum, v: &Spectrum, keep: impl Fn(&Freq) -> bool) -> i64 {
    let mut best = 0;
    for (p, _) in u.modes() {
        for (q, _) in v.modes() {
            let s = dot(&p.xi, &q.xi).abs();
            if s > best && keep(&p.add(q)) {
                best = s;
            }
        }
    }
    best
}

/// Outcome of the exhaustive resonance enumeration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceScan {
    pub pairs: u64,
    /// Largest |(τ₁+τ₂−|ξ+η|²) − ((τ₁−ξ²)+(τ₂−η²)−2ξ·η)| in floating point.
    pub identity_defect: f64,
    /// C = max (|ξ·η| − max(d₁,d₂,d₃)) with each d the least admissible one.
    pub additive: f64,
    /// max |ξ·η| / max(d₁,d₂,d₃).
    pub ratio: f64,
}

/// Enumerate every pair of lattice points with all coordinates in
/// [−half, half] (ξ, η ∈ ℤⁿ, τ₁, τ₂ ∈ ℤ). The least admissible modulation
/// is the binding one, since the bound must hold for every triple.
pub fn resonance_scan(n: usize, half: i64) -> ResonanceScan {
    let side = 2 * half + 1;
    let count = side.pow(n as u32 + 1);
    let pts: Vec<([i64; MAX_DIM], i64)> = (0..count)
        .map(|c| {
            let mut xi = [0i64; MAX_DIM];
            let mut rest = c;
            for x in xi.iter_mut().take(n) {
                *x = rest % side - half;
                rest /= side;
            }
            (xi, rest % side - half)
        })
        .collect();
    let mods: Vec<u64> = pts
        .iter()
        .map(|(xi, t)| {
            let x2: i64 = xi.iter().map(|a| a * a).sum();
            least_modulation(t - x2)
        })
        .collect();
    let mut scan = ResonanceScan { pairs: 0, identity_defect: 0.0, additive: f64::NEG_INFINITY, ratio: 0.0 };
    for (a, (xi, t1)) in pts.iter().enumerate() {
        for (b, (eta, t2)) in pts.iter().enumerate() {
            scan.pairs += 1;
            let (mut sum2, mut x2, mut e2, mut dotf) = (0.0, 0.0, 0.0, 0.0);
            for k in 0..n {
                let (p, q) = (xi[k] as f64, eta[k] as f64);
                sum2 += (p + q) * (p + q);
                x2 += p * p;
                e2 += q * q;
                dotf += p * q;
            }
            let (t1f, t2f) = (*t1 as f64, *t2 as f64);
            let lhs = t1f + t2f - sum2;
            let rhs = (t1f - x2) + (t2f - e2) - 2.0 * dotf;
            scan.identity_defect = scan.identity_defect.max((lhs - rhs).abs());
            let m3 = resonance_defect(&xi[..n], *t1, &eta[..n], *t2);
            let d = mods[a].max(mods[b]).max(least_modulation(m3)) as f64;
            let s = null_symbol(&xi[..n], &eta[..n]).abs() as f64;
            scan.additive = scan.additive.max(s - d);
            scan.ratio = scan.ratio.max(s / d);
        }
    }
    scan
}

/// Annulus test used by r1-type checks: |(ξ,τ)| in the open support of s_k.
pub fn in_cutoff_annulus(p: &Freq, n: usize, k: u32) -> bool {
    crate::dyadic::s(k, aniso_norm(&p.xi[..n], p.tau)) > 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Spectral;

    #[test]
    fn symbol_and_defect_examples() {
        assert_eq!(null_symbol(&[1, 0], &[0, 5]), 0);
        assert_eq!(resonance_defect(&[1, 0], 1, &[0, 5], 25), 0);
        assert_eq!(resonance_defect(&[1, 0], 1, &[1, 0], 1), -2);
        assert_eq!(resonance_split(&[1, 0], 1, &[1, 0], 1), -2);
    }

    #[test]
    fn single_modes_multiply_by_the_symbol() {
        let g = GridSpec::new(2, 16, 64).unwrap();
        let u = Spectrum::from_modes(g, [(Freq::new(&[1, 2], 5), Complex64::new(2.0, 0.0))]).unwrap();
        let v = Spectrum::from_modes(g, [(Freq::new(&[3, -1], 10), Complex64::new(0.0, 1.0))]).unwrap();
        let b = bilinear_b(&u, &v, g).unwrap();
        let want = Complex64::new(0.0, 2.0) * -1.0 * product_factor(2);
        assert!((b.get(&Freq::new(&[4, 1], 15)) - want).norm() < 1e-15);
        let perp = Spectrum::from_modes(g, [(Freq::new(&[2, -1], 5), Complex64::new(1.0, 0.0))]).unwrap();
        assert!(bilinear_b(&u, &perp, g).unwrap().is_empty());
        assert!(bilinear_bhat(&u, &perp, g).unwrap().norm_l2() > 0.0);
    }

    #[test]
    fn small_scan_is_exact() {
        let s = resonance_scan(1, 2);
        assert_eq!(s.pairs, 625);
        assert_eq!(s.identity_defect, 0.0);
        assert!(s.ratio <= 3.0);
    }
}
