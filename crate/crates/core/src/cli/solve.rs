use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::config::{Profile, RunConfig, SolveCheck};
use super::output::{num, opt_num, Output, Status, Task};
use crate::error::{Error, Result};
use crate::solver::linear::{random_data, rehost};
use crate::solver::{
    energy_drift, energy_series, far_shell_fraction, find_delta, linear_solution, lipschitz_probe, picard_solve,
    EnergyDrift, Outcome, Solution, SolverConfig,
};
use crate::spectral::io::write_field;
use crate::spectral::{forward_transform, GridSpec, SpatialField};

/// Residual allowance as a multiple of the tolerance.
const RESIDUAL_FACTOR: f64 = 10.0;
/// Contraction check: this many iterations, each shrinking by this factor.
const CONTRACTING_ITERATIONS: usize = 5;
const CONTRACTION_FACTOR: f64 = 0.5;
/// Largest relative change of the Lipschitz quotient when η halves.
const LIPSCHITZ_SPREAD: f64 = 0.25;
/// Required drift reduction under refinement.
const ENERGY_REFINEMENT_FACTOR: f64 = 2.0;

/// Data shape: the unit plane wave, or random modes normalized in H^s.
fn profile(cfg: &RunConfig, grid: GridSpec) -> SpatialField {
    let sc = &cfg.solve;
    match sc.profile {
        Profile::PlaneWave => {
            let xi: Vec<f64> = sc.mode.iter().map(|v| *v as f64).collect();
            SpatialField::from_fn(grid, |x| Complex64::from_polar(1.0, x.iter().zip(&xi).map(|(a, b)| a * b).sum()))
        }
        Profile::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let shape = random_data(grid, sc.annulus, &mut rng);
            let norm = shape.hs_norm(cfg.solver.s);
            if norm > 0.0 { shape.scale(Complex64::new(1.0 / norm, 0.0)) } else { shape }
        }
    }
}

fn data(cfg: &RunConfig, grid: GridSpec, eps: f64) -> SpatialField {
    profile(cfg, grid).scale(Complex64::new(eps, 0.0))
}

fn verdict(sol: &Solution, tol: f64) -> (Status, String) {
    match &sol.outcome {
        Outcome::Converged { iterations } if sol.residual <= RESIDUAL_FACTOR * tol => {
            (Status::Pass, format!("converged in {iterations} iterations, residual {:e}", sol.residual))
        }
        Outcome::Converged { iterations } => (
            Status::Fail,
            format!("converged in {iterations} iterations but residual {:e} exceeds {RESIDUAL_FACTOR}·tol", sol.residual),
        ),
        Outcome::MaxIterations => (Status::Fail, format!("no convergence in {} iterations", sol.trace.entries.len())),
        Outcome::Diverged { reason } => (Status::Fail, format!("diverged: {reason}")),
    }
}

fn drift_value(d: &EnergyDrift) -> f64 {
    d.relative.unwrap_or(d.absolute)
}

pub(super) fn run(cfg: &RunConfig, out: &mut Output) -> Result<(Vec<Task>, serde_json::Value)> {
    let grid = cfg.grid.spec()?;
    let sc = &cfg.solve;
    let mut scfg: SolverConfig = cfg.solver;
    let mut delta = None;
    if sc.find_delta {
        let d = find_delta(&profile(cfg, grid), grid, &scfg, 1e-6, 1e2, 16)?;
        scfg.delta = Some(d);
        delta = Some(d);
    }
    let u0 = data(cfg, grid, sc.epsilon);
    let mut tasks = Vec::new();
    let sol = match picard_solve(&u0, grid, &scfg) {
        Ok(s) => s,
        Err(e @ (Error::Inadmissible(_) | Error::SupNorm { .. })) => {
            tasks.push(Task::new("solve", Status::Fail, e.to_string()));
            return Ok((tasks, json!({ "delta": delta, "error": e.to_string() })));
        }
        Err(e) => return Err(e),
    };
    let (status, detail) = verdict(&sol, scfg.tol);
    tasks.push(Task::new("solve", status, detail));

    let rows: Vec<Vec<String>> = sol
        .trace
        .entries
        .iter()
        .map(|e| vec![e.iteration.to_string(), num(e.difference), opt_num(e.ratio), num(e.nonlinearity)])
        .collect();
    out.write_csv("trace.csv", &["iteration", "difference", "ratio", "nonlinearity"], &rows)?;
    let diffs: Vec<(f64, f64)> = sol.trace.entries.iter().map(|e| (e.iteration as f64, e.difference)).collect();
    out.write_plot("trace.dat", ["iteration", "difference"], &diffs)?;

    let diverged = matches!(sol.outcome, Outcome::Diverged { .. });
    let mut drift = None;
    if !diverged {
        out.write_plot("energy.dat", ["t", "energy"], &energy_series(&sol.u, scfg.t_horizon))?;
        let mut buf = Vec::new();
        write_field(&forward_transform(&sol.u), &mut buf)?;
        out.write_bytes("solution.field", &buf)?;
        let d = energy_drift(&sol.u, &scfg);
        tasks.push(Task::new(
            "energy-drift",
            Status::from_pass(d.absolute < sc.energy_tolerance),
            format!("absolute {:e}, relative {}", d.absolute, opt_num(d.relative)),
        ));
        drift = Some(d);
    }

    let mut checks = serde_json::Map::new();
    for check in &sc.checks {
        let task = match check {
            SolveCheck::Contraction => {
                let run = sol.trace.contracting_run(CONTRACTION_FACTOR);
                let ok = run >= CONTRACTING_ITERATIONS && sol.residual <= RESIDUAL_FACTOR * scfg.tol;
                checks.insert("contracting_iterations".into(), json!(run));
                Task::new(
                    "contraction",
                    Status::from_pass(ok),
                    format!("{run} iterations with ratio ≤ {CONTRACTION_FACTOR}, residual {:e}", sol.residual),
                )
            }
            SolveCheck::Lipschitz => {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x4c69);
                let direction = random_data(grid, sc.annulus, &mut rng);
                let probe = lipschitz_probe(&u0, &direction, grid, &scfg, &sc.lipschitz_etas)?;
                out.write_plot("lipschitz.dat", ["eta", "quotient"], &probe)?;
                let spread = probe.windows(2).map(|w| (w[1].1 / w[0].1 - 1.0).abs()).fold(0.0, f64::max);
                checks.insert("lipschitz".into(), json!(probe));
                Task::new(
                    "lipschitz",
                    Status::from_pass(spread.is_finite() && spread <= LIPSCHITZ_SPREAD),
                    format!("quotients {:?}, largest change {spread:e}", probe.iter().map(|p| p.1).collect::<Vec<_>>()),
                )
            }
            SolveCheck::EnergyRefinement => {
                let fine = grid.doubled();
                let fcfg = SolverConfig { series_order: scfg.series_order + 2, delta: None, ..scfg };
                let u0f = match sc.profile {
                    Profile::PlaneWave => data(cfg, fine, sc.epsilon),
                    Profile::Random => SpatialField::from_spectrum(fine, rehost(&u0, fine))?,
                };
                let fsol = picard_solve(&u0f, fine, &fcfg)?;
                let coarse = drift.map(|d| drift_value(&d)).unwrap_or(f64::NAN);
                let refined = drift_value(&energy_drift(&fsol.u, &fcfg));
                let ok = fsol.outcome.converged()
                    && (refined == 0.0 && coarse == 0.0 || refined * ENERGY_REFINEMENT_FACTOR <= coarse);
                checks.insert("energy_refinement".into(), json!({ "coarse": coarse, "refined": refined }));
                Task::new(
                    "energy-refinement",
                    Status::from_pass(ok),
                    format!("drift {coarse:e} → {refined:e} on {}×{} with series order {}", fine.m(), fine.k(), fcfg.series_order),
                )
            }
            SolveCheck::FarShell => {
                let excess = |eps: f64| -> Result<f64> {
                    let d = data(cfg, grid, eps);
                    let s = picard_solve(&d, grid, &scfg)?;
                    let lin = linear_solution(&d, grid);
                    Ok(far_shell_fraction(&s.u, &scfg, sc.far_threshold) - far_shell_fraction(&lin, &scfg, sc.far_threshold))
                };
                let (a, b) = (excess(sc.epsilon)?.abs(), excess(sc.epsilon / 2.0)?.abs());
                checks.insert("far_shell_excess".into(), json!([a, b]));
                Task::new(
                    "far-shell",
                    Status::from_pass(b <= a),
                    format!("|excess over the free solution| {a:e} at ε, {b:e} at ε/2"),
                )
            }
        };
        tasks.push(task);
    }
    let details = json!({
        "outcome": sol.outcome,
        "residual": sol.residual,
        "data_norm": sol.data_norm,
        "delta": delta,
        "energy_drift": drift,
        "trace": sol.trace,
        "checks": checks,
    });
    Ok((tasks, details))
}
