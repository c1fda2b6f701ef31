use num_complex::Complex64;
use proptest::prelude::*;

use smlab::dyadic::shell_split;
use smlab::lab::estimates::{judge, Sweep};
use smlab::norms::embed::{embedding_sweep, Embedding};
use smlab::norms::{
    conj_sum_norm, hs_norm, norm, scripty_norm, truncation_refinement, w_norm, xsb_norm, xshalf_p_norm, y_norm,
    z_norm, Family, SpaceTag,
};
use smlab::regression::RegressionConstants;
use smlab::solver::SolverConfig;
use smlab::spectral::{Freq, GridSpec, Spectral, Spectrum};

fn grid() -> GridSpec {
    GridSpec::new(2, 8, 16).unwrap()
}

fn modes() -> impl Strategy<Value = Spectrum> {
    prop::collection::vec((-3i64..=3, -3i64..=3, -7i64..=7, -1.0f64..1.0, -1.0f64..1.0), 1..12).prop_map(|v| {
        Spectrum::from_modes(grid(), v.into_iter().map(|(a, b, t, re, im)| (Freq::new(&[a, b], t), Complex64::new(re, im))))
            .unwrap()
    })
}

fn tags(s: f64) -> Vec<SpaceTag> {
    vec![
        SpaceTag::new(Family::Hs, s),
        SpaceTag::xsb(s, 0.5),
        SpaceTag::xsb(s, -0.5),
        SpaceTag::xshalf(s, true, 1.0),
        SpaceTag::xshalf(s, false, 2.0),
        SpaceTag::new(Family::Y, s),
        SpaceTag::new(Family::ScriptY, s),
        SpaceTag::new(Family::W, s),
        SpaceTag::new(Family::Z, s),
    ]
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + 1e-300
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn norms_are_homogeneous(f in modes(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let c = Complex64::new(re, im);
        for t in tags(1.1) {
            let a = norm(&f, &t).unwrap().total;
            let b = norm(&f.scale(c), &t).unwrap().total;
            prop_assert!(close(b, c.norm() * a, 1e-10), "{t:?}: {b} vs {}", c.norm() * a);
        }
    }

    #[test]
    fn triangle_inequality(f in modes(), g in modes()) {
        let sum = f.add_field(&g).unwrap();
        for t in tags(1.1).into_iter().filter(|t| t.family != Family::W) {
            let lhs = norm(&sum, &t).unwrap().total;
            let rhs = norm(&f, &t).unwrap().total + norm(&g, &t).unwrap().total;
            prop_assert!(lhs <= rhs * (1.0 + 1e-12), "{t:?}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn conjugation_swaps_the_paraboloids(f in modes()) {
        let g = f.conj_field();
        prop_assert!(close(xsb_norm(&f, 1.1, 0.5, true).total, xsb_norm(&g, 1.1, 0.5, false).total, 1e-12));
        prop_assert!(close(xshalf_p_norm(&f, 1.1, true, 1.0, true).total, xshalf_p_norm(&g, 1.1, true, 1.0, false).total, 1e-12));
        for t in tags(1.1) {
            prop_assert_eq!(norm(&g, &t.conj()).unwrap().total, norm(&f, &t).unwrap().total);
        }
        let hs = |h: &Spectrum| hs_norm(h, 1.1).total;
        prop_assert!(conj_sum_norm(&f, hs) <= hs(&f).min(hs(&g)));
    }

    #[test]
    fn larger_s_gives_larger_norms(f in modes()) {
        for (a, b) in tags(0.6).into_iter().zip(tags(1.6)) {
            if a.family == Family::W {
                continue;
            }
            let lo = norm(&f, &a).unwrap().total;
            let hi = norm(&f, &b).unwrap().total;
            prop_assert!(lo <= hi * (1.0 + 1e-12), "{a:?}: {lo} > {hi}");
        }
    }

    #[test]
    fn l1_over_modulations_dominates_sup(f in modes()) {
        for plus in [true, false] {
            let one = xshalf_p_norm(&f, 1.1, plus, 1.0, false).total;
            let two = xshalf_p_norm(&f, 1.1, plus, 2.0, false).total;
            let inf = xshalf_p_norm(&f, 1.1, plus, f64::INFINITY, false).total;
            prop_assert!(inf <= two * (1.0 + 1e-12) && two <= one * (1.0 + 1e-12));
        }
    }

    #[test]
    fn w_is_below_each_pure_split(f in modes()) {
        let (near, far) = shell_split(&f);
        let far_x = xshalf_p_norm(&far, 1.1, false, 1.0, false).total;
        let w = w_norm(&f, 1.1).total;
        prop_assert!(w <= scripty_norm(&near, 1.1).total.hypot(far_x) * (1.0 + 1e-12));
        prop_assert!(w <= xshalf_p_norm(&near, 1.1, false, 1.0, false).total.hypot(far_x) * (1.0 + 1e-12));
    }
}

#[test]
fn far_field_w_norm_is_the_x_norm() {
    // every mode is far from the paraboloid
    let g = GridSpec::new(2, 8, 64).unwrap();
    let f = Spectrum::from_modes(
        g,
        [(Freq::new(&[0, 0], 30), Complex64::new(1.0, 0.0)), (Freq::new(&[1, 0], -28), Complex64::new(0.0, 0.5))],
    )
    .unwrap();
    let (near, far) = shell_split(&f);
    assert_eq!(near.norm_l2(), 0.0);
    assert_eq!(far.norm_l2(), f.norm_l2());
    assert!(close(w_norm(&f, 1.1).total, xshalf_p_norm(&f, 1.1, false, 1.0, false).total, 1e-14));
}

#[test]
fn free_wave_norms() {
    // a single mode on the paraboloid: X^{s,b} weight is the anisotropic bracket alone
    let f = Spectrum::from_modes(grid(), [(Freq::new(&[1, 1], 2), Complex64::new(0.0, 2.0))]).unwrap();
    let want = 2.0 * (1.0f64 + 4.0).sqrt().powf(1.1);
    assert!(close(xsb_norm(&f, 1.1, 0.5, false).total, want, 1e-14));
    assert!(close(xsb_norm(&f, 1.1, -0.5, false).total, want, 1e-14));
    let (near, far) = shell_split(&f);
    assert_eq!(far.norm_l2(), 0.0);
    assert_eq!(near.norm_l2(), f.norm_l2());
    assert!(z_norm(&f, 1.1).total >= y_norm(&f, 1.1).total);
}

fn check(sweep: Sweep, constants: &RegressionConstants) {
    let v = judge(&sweep, constants);
    assert!(v.pass, "{}: {}", sweep.id, v.reason);
}

#[test]
fn embedding_sweeps_stay_below_frozen_constants() {
    let constants = RegressionConstants::embedded();
    let base = GridSpec::new(2, 32, 64).unwrap();
    for e in Embedding::ALL {
        let s = embedding_sweep(e, base, 1.1, 20, 1).unwrap();
        assert!(s.refinement_change() < 0.01, "{}: {}", e.id(), s.refinement_change());
        check(Sweep { id: e.id().into(), base: s.base, fine: s.fine, untestable: Vec::new() }, &constants);
    }
}

#[test]
fn truncation_sweeps_stay_below_frozen_constants() {
    let constants = RegressionConstants::embedded();
    let base = GridSpec::new(2, 32, 64).unwrap();
    let chi = SolverConfig::default().cutoff();
    let (b, f) = truncation_refinement(base, 1.1, &chi, 20, 1).unwrap();
    for id in ["truncation-x", "truncation-y", "truncation-z"] {
        let pick = |rows: &[smlab::report::EstimateReport]| rows.iter().filter(|r| r.id == id).cloned().collect::<Vec<_>>();
        check(Sweep { id: id.into(), base: pick(&b), fine: pick(&f), untestable: Vec::new() }, &constants);
    }
}
