use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use smlab::lab::estimates::{run_family, SweepConfig};
use smlab::lab::measure::random_density;
use smlab::lab::null::{resonance_split, sup_symbol};
use smlab::lab::{
    bilinear_b, bilinear_bhat, measure_convolve, null_symbol, resonance_defect, resonance_scan, restricted_l2,
    ParaboloidMeasure, Region, SectorDecomposition, Sheet,
};
use smlab::regression::RegressionConstants;
use smlab::sample::Family;
use smlab::spectral::{
    forward_transform, inverse_transform, plane_wave_mode, Freq, GridSpec, Spectral, Spectrum,
};

/// Spectrum of the free wave Σ f(ξ)√(1+4|ξ|²) e^{i(x·ξ ± t|ξ|²)}.
fn free_wave(m: &ParaboloidMeasure, sheet: Sheet, grid: GridSpec) -> Spectrum {
    let s = sheet.sign();
    Spectrum::from_modes(
        grid,
        m.density().iter().map(|(xi, v)| {
            let x2: i64 = xi[..2].iter().map(|a| a * a).sum();
            let w = (1.0 + 4.0 * x2 as f64).sqrt();
            (Freq { xi: *xi, tau: s * x2 }, v * w)
        }),
    )
    .unwrap()
}

#[test]
fn convolution_matches_the_product_of_free_waves() {
    let grid = GridSpec::new(2, 32, 256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (sa, sb) in [(Sheet::P, Sheet::P), (Sheet::P, Sheet::PBar), (Sheet::PBar, Sheet::PBar)] {
        let a = random_density(2, sa, 2, Family::Annulus, 40, &mut rng).unwrap();
        let b = random_density(2, sb, 1, Family::Cap, 40, &mut rng).unwrap();
        let conv = measure_convolve(&a, &b, grid).unwrap();
        let u = inverse_transform(&free_wave(&a, sa, grid).to_field());
        let v = inverse_transform(&free_wave(&b, sb, grid).to_field());
        let prod = forward_transform(&u.mul(&v).unwrap());
        let mut err = 0.0;
        prod.for_each_mode(|p, w| err += (w * plane_wave_mode(2) - conv.get(p)).norm_sqr());
        let rel = err.sqrt() / conv.norm_l2();
        assert!(rel < 1e-10, "{sa:?} {sb:?}: {rel:e}");
    }
}

#[test]
fn low_times_high_conjugate_stays_below_zero_time_frequency() {
    // i = 0 on P against j = 5 on P̄: τ = |ξ|² − |η|² < 0, far from P
    let grid = GridSpec::new(2, 256, 16384).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..5 {
        let a = random_density(2, Sheet::P, 0, Family::Annulus, 50, &mut rng).unwrap();
        let b = random_density(2, Sheet::PBar, 5, Family::Annulus, 250, &mut rng).unwrap();
        let conv = measure_convolve(&a, &b, grid).unwrap();
        assert!(conv.norm_l2() > 0.0);
        assert!(conv.modes().iter().all(|(p, _)| p.tau < 0));
        for j in 0..=7 {
            for d in [1u64, 2, 4, 16, 64] {
                assert_eq!(restricted_l2(&conv, Region::NearP { j, d }), 0.0);
            }
        }
        assert_eq!(restricted_l2(&conv, Region::All), conv.norm_l2());
    }
}

#[test]
fn orthogonal_rays_have_no_interaction() {
    let grid = GridSpec::new(2, 32, 64).unwrap();
    let one = Complex64::new(1.0, 0.0);
    let u = Spectrum::from_modes(grid, (1..4).map(|k| (Freq::new(&[k, 0], k * k), one))).unwrap();
    let v = Spectrum::from_modes(grid, (1..4).map(|k| (Freq::new(&[0, -k], -k * k), one))).unwrap();
    let out = GridSpec::new(2, 32, 64).unwrap();
    assert_eq!(bilinear_b(&u, &v, out).unwrap().norm_l2(), 0.0);
    assert!(bilinear_bhat(&u, &v, out).unwrap().norm_l2() > 0.0);
}

#[test]
fn exhaustive_resonance_scan() {
    let scan = resonance_scan(2, 4);
    assert_eq!(scan.pairs, 9u64.pow(6));
    assert_eq!(scan.identity_defect, 0.0);
    let c = RegressionConstants::embedded().get("res1").unwrap();
    assert!(scan.additive <= c, "{} > {c}", scan.additive);
}

#[test]
fn perpendicular_sector_counts_do_not_grow() {
    let mut means = Vec::new();
    for alpha in [0.5, 0.25, 0.125] {
        let dec = SectorDecomposition::new(2, alpha).unwrap();
        for l in 0..dec.len() {
            let k = dec.perp[l].len();
            assert!((1..=12).contains(&k), "α = {alpha}, sector {l}: {k}");
            for &m in &dec.perp[l] {
                assert!(dec.are_perpendicular(m, l));
            }
        }
        means.push(dec.perp.iter().map(|p| p.len()).sum::<usize>() as f64 / dec.len() as f64);
    }
    let (lo, hi) = means.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &m| (a.min(m), b.max(m)));
    assert!(hi <= 2.0 * lo, "{means:?}");
}

#[test]
fn sweep_ratios_ignore_input_scale() {
    let base = SweepConfig { samples: 2, seed: 3, ..Default::default() };
    let scaled = SweepConfig { scale: 3.7, ..base };
    for family in ["pp1", "u1", "b2", "be11", "c0", "m9", "y6", "algebra-Z", "mult-W"] {
        let a = run_family(family, &base).unwrap();
        let b = run_family(family, &scaled).unwrap();
        for (x, y) in a.iter().zip(&b) {
            for (r, q) in x.base.iter().chain(&x.fine).zip(y.base.iter().chain(&y.fine)) {
                let tol = 1e-10 * r.ratio.abs().max(1e-300);
                assert!((r.ratio - q.ratio).abs() <= tol, "{}: {} vs {}", x.id, r.ratio, q.ratio);
            }
        }
    }
}

fn small_spectrum() -> impl Strategy<Value = Spectrum> {
    prop::collection::vec((-3i64..=3, -3i64..=3, -6i64..=6, -1.0f64..1.0, -1.0f64..1.0), 1..8).prop_map(|v| {
        let g = GridSpec::new(2, 16, 32).unwrap();
        Spectrum::from_modes(g, v.into_iter().map(|(a, b, t, re, im)| (Freq::new(&[a, b], t), Complex64::new(re, im)))).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn resonance_identity(x in prop::array::uniform3(-50i64..50), y in prop::array::uniform3(-50i64..50), t1 in -5000i64..5000, t2 in -5000i64..5000) {
        prop_assert_eq!(resonance_defect(&x, t1, &y, t2), resonance_split(&x, t1, &y, t2));
        let d: i64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        prop_assert_eq!(null_symbol(&x, &y), d);
    }

    #[test]
    fn symbol_bound_dominates_b(u in small_spectrum(), v in small_spectrum()) {
        let out = GridSpec::new(2, 16, 32).unwrap();
        let b = bilinear_b(&u, &v, out).unwrap().norm_l2();
        let bhat = bilinear_bhat(&u, &v, out).unwrap().norm_l2();
        let sup = sup_symbol(&u, &v, |_| true) as f64;
        prop_assert!(b <= sup * bhat * (1.0 + 1e-12) + 1e-300, "{b} > {sup}·{bhat}");
    }

    #[test]
    fn convolution_is_symmetric(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_density(2, Sheet::P, 1, Family::Annulus, 20, &mut rng).unwrap();
        let b = random_density(2, Sheet::PBar, 2, Family::Shell, 20, &mut rng).unwrap();
        let g = GridSpec::new(2, 32, 128).unwrap();
        let ab = measure_convolve(&a, &b, g).unwrap();
        let ba = measure_convolve(&b, &a, g).unwrap();
        prop_assert!(ab.sub(&ba).unwrap().norm_l2() <= 1e-12 * ab.norm_l2());
    }
}
