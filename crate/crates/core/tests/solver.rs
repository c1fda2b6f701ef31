use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use smlab::error::Error;
use smlab::solver::linear::random_data;
use smlab::solver::{
    duhamel, energy_drift, far_shell_fraction, find_delta, linear_propagate, linear_solution, picard_solve,
    NonlinearSign, Outcome, SolverConfig,
};
use smlab::spectral::{GridSpec, SpaceTimeField, SpatialField};

fn plane_wave(grid: GridSpec, eps: f64) -> SpatialField {
    SpatialField::from_fn(grid, |x| Complex64::from_polar(eps, x[0]))
}

fn random_unit(grid: GridSpec, seed: u64, s: f64) -> SpatialField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_data(grid, 1, &mut rng);
    let n = g.hs_norm(s);
    g.scale(Complex64::new(1.0 / n, 0.0))
}

#[test]
fn divergence_is_reported_far_past_delta() {
    let grid = GridSpec::new(2, 8, 32).unwrap();
    // the bisection judges convergence at this tolerance
    let cfg = SolverConfig { tol: 1e-14, ..Default::default() };
    let profile = plane_wave(grid, 1.0);
    let delta = find_delta(&profile, grid, &cfg, 1e-6, 1e2, 12).unwrap();
    assert!(delta > 1e-6 && delta < 1e2, "{delta}");
    let norm = profile.hs_norm(cfg.s);
    let at = |a: f64| picard_solve(&profile.scale(Complex64::new(a / norm, 0.0)), grid, &cfg);
    assert!(at(0.5 * delta).unwrap().outcome.converged());
    match at(100.0 * delta) {
        Ok(sol) => assert!(matches!(sol.outcome, Outcome::Diverged { .. }), "{:?}", sol.outcome),
        Err(e) => assert!(matches!(e, Error::SupNorm { .. }), "{e}"),
    }
    let gated = SolverConfig { delta: Some(delta), ..cfg };
    assert!(matches!(
        picard_solve(&profile.scale(Complex64::new(2.0 * delta / norm, 0.0)), grid, &gated),
        Err(Error::Inadmissible(_))
    ));
}

#[test]
fn energy_drift_shrinks_under_refinement() {
    let coarse = GridSpec::new(2, 16, 64).unwrap();
    let fine = coarse.doubled();
    let cfg = SolverConfig::default();
    let fcfg = SolverConfig { series_order: cfg.series_order + 2, ..cfg };
    let drift = |grid: GridSpec, cfg: &SolverConfig| {
        let sol = picard_solve(&plane_wave(grid, 1e-3), grid, cfg).unwrap();
        assert!(sol.outcome.converged());
        energy_drift(&sol.u, cfg)
    };
    let a = drift(coarse, &cfg);
    let b = drift(fine, &fcfg);
    assert!(a.absolute < 1e-6);
    assert!(2.0 * b.relative.unwrap() <= a.relative.unwrap(), "{a:?} {b:?}");
}

#[test]
fn geometric_sign_conserves_energy_better() {
    let grid = GridSpec::new(2, 16, 64).unwrap();
    let u0 = random_unit(grid, 4, 1.1).scale(Complex64::new(0.05, 0.0));
    let run = |sign| {
        let cfg = SolverConfig { sign, ..Default::default() };
        let sol = picard_solve(&u0, grid, &cfg).unwrap();
        assert!(sol.outcome.converged(), "{sign:?}: {:?}", sol.outcome);
        energy_drift(&sol.u, &cfg).relative.unwrap()
    };
    let geometric = run(NonlinearSign::Geometric);
    let printed = run(NonlinearSign::Printed);
    assert!(printed > 10.0 * geometric, "printed {printed:e}, geometric {geometric:e}");
}

#[test]
fn far_shell_excess_falls_with_amplitude() {
    let grid = GridSpec::new(2, 16, 64).unwrap();
    let cfg = SolverConfig::default();
    for profile in [plane_wave(grid, 1.0), random_unit(grid, 2, cfg.s)] {
        let excess: Vec<f64> = [4e-2, 2e-2, 1e-2, 5e-3]
            .iter()
            .map(|&eps| {
                let u0 = profile.scale(Complex64::new(eps, 0.0));
                let sol = picard_solve(&u0, grid, &cfg).unwrap();
                let lin = linear_solution(&u0, grid);
                (far_shell_fraction(&sol.u, &cfg, 4) - far_shell_fraction(&lin, &cfg, 4)).abs()
            })
            .collect();
        assert!(excess.windows(2).all(|w| w[1] <= w[0]), "{excess:?}");
    }
}

#[test]
fn duhamel_starts_from_zero() {
    let grid = GridSpec::new(2, 8, 32).unwrap();
    let f = SpaceTimeField::from_fn(grid, |x, t| Complex64::new((x[0] + 2.0 * t).cos(), x[1].sin() * t));
    let u = duhamel(&f);
    let l0 = (0..grid.k()).find(|&l| grid.time(l) == 0.0).unwrap();
    assert!(u.slice(l0).sup_norm() < 1e-13);
    assert!(u.norm_l2() > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn free_flow_is_unitary(seed in 0u64..10_000, t in -10.0f64..10.0) {
        let grid = GridSpec::new(2, 16, 16).unwrap();
        let g = random_unit(grid, seed, 1.1);
        let u = linear_propagate(&g, t);
        prop_assert!((u.norm_l2() - g.norm_l2()).abs() <= 1e-12 * g.norm_l2());
        prop_assert!((u.hs_norm(1.1) - 1.0).abs() <= 1e-12);
        let back = linear_propagate(&u, -t);
        prop_assert!(back.sub(&g).unwrap().norm_l2() <= 1e-12 * g.norm_l2());
    }
}
