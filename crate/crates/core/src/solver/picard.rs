//! The truncated problem i u_t − Δu = χ(t) N(u), N(u) = σ Q(u,ū)(∇u)², solved
//! by Picard iteration around the free solution.
//!
//! Iterate differences δ_k = u_k − u_{k−1} are propagated directly,
//! δ_{k+1} = D(χ (N(u_k) − N(u_k − δ_k))), with the difference of N expanded
//! algebraically so that it keeps full relative precision however small
//! δ_k gets.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::geometry::{energy, q_coefficient, q_difference, MapState, QForm};
use super::spectral_ops::{
    apply_cutoff, coefficients, duhamel_coefficients, from_coefficients, gradient_from_coefficients, l2_hs,
    linear_coefficients, sup_hs,
};
use crate::dyadic::TimeCutoff;
use crate::error::{Error, Result};
use crate::norms::w_norm;
use crate::spectral::{forward_transform, modulation, GridSpec, SpaceTimeField, SpatialField, Spectral};

/// Sign σ in front of Q(u,ū)(∇u)².
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NonlinearSign {
    /// σ = −1: the equation of the tension field, which conserves energy.
    #[default]
    Geometric,
    /// σ = +1.
    Printed,
}

impl NonlinearSign {
    pub fn factor(self) -> f64 {
        match self {
            NonlinearSign::Geometric => -1.0,
            NonlinearSign::Printed => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub s: f64,
    /// χ = 1 on |t| ≤ t_horizon.
    pub t_horizon: f64,
    /// Width of the smooth ramp of χ beyond the horizon.
    pub ramp: f64,
    pub k_max: usize,
    pub tol: f64,
    pub series_order: usize,
    /// Evaluate Q exactly instead of by its series.
    pub exact_q: bool,
    pub sign: NonlinearSign,
    /// Smallness threshold on ‖u₀‖_{H^s}; unchecked when absent.
    pub delta: Option<f64>,
    /// Record the W^s norm of χN(u_k) in the trace (costly).
    pub trace_w_norm: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            s: 1.1,
            t_horizon: 1.0,
            ramp: 1.0,
            k_max: 30,
            tol: 1e-40,
            series_order: 3,
            exact_q: false,
            sign: NonlinearSign::Geometric,
            delta: None,
            trace_w_norm: false,
        }
    }
}

impl SolverConfig {
    pub fn cutoff(&self) -> TimeCutoff {
        TimeCutoff { plateau: self.t_horizon, ramp: self.ramp }
    }

    pub fn q_form(&self) -> QForm {
        if self.exact_q {
            QForm::Exact
        } else {
            QForm::Series(self.series_order)
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.s > n as f64 / 2.0) {
            return Err(Error::Config(format!("s = {} must exceed n/2 = {}", self.s, n as f64 / 2.0)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config("tol must be positive".into()));
        }
        if self.series_order < 1 {
            return Err(Error::Config("series_order must be at least 1".into()));
        }
        if self.k_max < 1 {
            return Err(Error::Config("k_max must be at least 1".into()));
        }
        if !(self.t_horizon > 0.0 && self.ramp >= 0.0 && self.t_horizon + self.ramp < std::f64::consts::PI) {
            return Err(Error::Config("cutoff must be supported inside one period (t_horizon + ramp < π)".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    /// sup_t ‖u_k − u_{k−1}‖_{H^s}.
    pub difference: f64,
    /// Ratio to the previous difference.
    pub ratio: Option<f64>,
    /// sup_t ‖χ N(u_{k−1})‖_{H^{s−1}}, or its W^s norm when requested.
    pub nonlinearity: f64,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub entries: Vec<TraceEntry>,
}

impl IterationTrace {
    pub fn differences(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.difference).collect()
    }

    /// Number of leading iterations whose difference shrank by at least `factor`.
    pub fn contracting_run(&self, factor: f64) -> usize {
        self.entries.iter().skip(1).take_while(|e| e.ratio.is_some_and(|r| r <= factor)).count()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Outcome {
    Converged { iterations: usize },
    MaxIterations,
    Diverged { reason: String },
}

impl Outcome {
    pub fn converged(&self) -> bool {
        matches!(self, Outcome::Converged { .. })
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub u: SpaceTimeField,
    pub trace: IterationTrace,
    pub outcome: Outcome,
    /// ‖i u_t − Δu − χN(u)‖ in L²_t H^{s−2}_x.
    pub residual: f64,
    pub data_norm: f64,
}

struct Nonlinear<'a> {
    grid: GridSpec,
    cfg: &'a SolverConfig,
    chi: TimeCutoff,
}

impl Nonlinear<'_> {
    /// Spatial coefficients of χ N(u), given u's coefficients.
    fn full(&self, c: &[Complex64]) -> Result<Vec<Complex64>> {
        let u = from_coefficients(self.grid, c.to_vec());
        let grads = gradient_from_coefficients(self.grid, c);
        let (q, _) = q_coefficient(u.values(), self.cfg.q_form())?;
        let sigma = self.cfg.sign.factor();
        let mut out: Vec<Complex64> = (0..q.len())
            .into_par_iter()
            .map(|p| {
                let g2: Complex64 = grads.iter().map(|g| g[p] * g[p]).sum();
                sigma * q[p] * g2
            })
            .collect();
        apply_cutoff(&self.grid, &mut out, &self.chi);
        Ok(coefficients(&SpaceTimeField::from_values(self.grid, out)?))
    }

    /// Spatial coefficients of χ (N(a) − N(a − d)).
    fn difference(&self, a: &[Complex64], d: &[Complex64]) -> Result<Vec<Complex64>> {
        let ua = from_coefficients(self.grid, a.to_vec());
        let ud = from_coefficients(self.grid, d.to_vec());
        let ga = gradient_from_coefficients(self.grid, a);
        let gd = gradient_from_coefficients(self.grid, d);
        let form = self.cfg.q_form();
        let (av, dv) = (ua.values(), ud.values());
        let b: Vec<Complex64> = av.iter().zip(dv).map(|(x, y)| x - y).collect();
        let (qb, _) = q_coefficient(&b, form)?;
        let sigma = self.cfg.sign.factor();
        let mut out: Vec<Complex64> = (0..av.len())
            .into_par_iter()
            .map(|p| {
                let g_a: Complex64 = ga.iter().map(|g| g[p] * g[p]).sum();
                let dg: Complex64 = ga.iter().zip(&gd).map(|(x, y)| y[p] * (2.0 * x[p] - y[p])).sum();
                sigma * (q_difference(av[p], dv[p], form) * g_a + qb[p] * dg)
            })
            .collect();
        apply_cutoff(&self.grid, &mut out, &self.chi);
        Ok(coefficients(&SpaceTimeField::from_values(self.grid, out)?))
    }

    fn size(&self, f: &[Complex64]) -> f64 {
        if self.cfg.trace_w_norm {
            let field = forward_transform(&from_coefficients(self.grid, f.to_vec()));
            w_norm(&field, self.cfg.s).total
        } else {
            sup_hs(&self.grid, f, self.cfg.s - 1.0)
        }
    }
}

/// χ N(u) in physical space.
pub fn nonlinearity(u: &SpaceTimeField, cfg: &SolverConfig) -> Result<SpaceTimeField> {
    let grid = *u.grid();
    let nl = Nonlinear { grid, cfg, chi: cfg.cutoff() };
    Ok(from_coefficients(grid, nl.full(&coefficients(u))?))
}

fn sup_abs(grid: GridSpec, c: &[Complex64]) -> f64 {
    from_coefficients(grid, c.to_vec()).values().iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Picard iteration for data u₀ on the space-time grid `grid`.
pub fn picard_solve(u0: &SpatialField, grid: GridSpec, cfg: &SolverConfig) -> Result<Solution> {
    cfg.validate(grid.n())?;
    if u0.grid().n() != grid.n() || u0.grid().m() != grid.m() {
        return Err(Error::Mismatch("initial data and solver grid differ in space".into()));
    }
    let data_norm = u0.hs_norm(cfg.s);
    if let Some(delta) = cfg.delta {
        if data_norm >= delta {
            return Err(Error::Inadmissible(format!("‖u₀‖_H^s = {data_norm:e} is not below δ = {delta:e}")));
        }
    }
    let nl = Nonlinear { grid, cfg, chi: cfg.cutoff() };
    let mut u = linear_coefficients(u0, grid);
    let mut trace = IterationTrace::default();
    let mut outcome = Outcome::MaxIterations;
    let mut last_delta: Option<Vec<Complex64>> = None;
    let mut growing = 0usize;
    for k in 1..=cfg.k_max {
        let start = Instant::now();
        if sup_abs(grid, &u) >= 1.0 {
            outcome = Outcome::Diverged { reason: format!("sup norm reached 1 before iteration {k}") };
            break;
        }
        let forcing = match &last_delta {
            None => nl.full(&u)?,
            Some(d) => nl.difference(&u, d)?,
        };
        let delta = duhamel_coefficients(grid, &forcing);
        let diff = sup_hs(&grid, &delta, cfg.s);
        let ratio = trace.entries.last().map(|e: &TraceEntry| if e.difference > 0.0 { diff / e.difference } else { 0.0 });
        for (a, b) in u.iter_mut().zip(&delta) {
            *a += b;
        }
        trace.entries.push(TraceEntry {
            iteration: k,
            difference: diff,
            ratio,
            nonlinearity: nl.size(&forcing),
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        });
        last_delta = Some(delta);
        if !diff.is_finite() {
            outcome = Outcome::Diverged { reason: format!("non-finite difference at iteration {k}") };
            break;
        }
        if diff < cfg.tol {
            outcome = Outcome::Converged { iterations: k };
            break;
        }
        growing = if ratio.is_some_and(|r| r >= 1.0) { growing + 1 } else { 0 };
        if growing >= 3 {
            outcome = Outcome::Diverged { reason: format!("differences grew for 3 consecutive iterations (k = {k})") };
            break;
        }
    }
    // i u_t − Δu − χN(u_K) = χ(N(u_{K−1}) − N(u_K)) since u_K solves the
    // equation with forcing χN(u_{K−1}) exactly.
    let residual = match (&outcome, &last_delta) {
        (Outcome::Diverged { .. }, _) | (_, None) => f64::NAN,
        (_, Some(d)) => l2_hs(&grid, &nl.difference(&u, d)?, cfg.s - 2.0),
    };
    Ok(Solution { u: from_coefficients(grid, u), trace, outcome, residual, data_norm })
}

/// Energy at each sample time with |t| ≤ horizon, in time order.
pub fn energy_series(u: &SpaceTimeField, horizon: f64) -> Vec<(f64, f64)> {
    let grid = *u.grid();
    let mut out: Vec<(f64, f64)> = (0..grid.k())
        .filter(|&l| grid.time(l).abs() <= horizon + 1e-12)
        .map(|l| (grid.time(l), energy(&MapState::new(u.slice(l)))))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyDrift {
    /// max_t |E(t) − E(0)| / E(0); absent when E(0) = 0.
    pub relative: Option<f64>,
    pub absolute: f64,
}

/// Drift of the map energy over the window where χ = 1.
pub fn energy_drift(u: &SpaceTimeField, cfg: &SolverConfig) -> EnergyDrift {
    let series = energy_series(u, cfg.t_horizon);
    let e0 = series.iter().find(|(t, _)| *t == 0.0).map(|p| p.1).unwrap_or(0.0);
    let absolute = series.iter().map(|(_, e)| (e - e0).abs()).fold(0.0, f64::max);
    let relative = (e0 > 0.0).then(|| absolute / e0);
    EnergyDrift { relative, absolute }
}

/// Fraction of the ℓ² mass of χu with |τ − |ξ|²| > threshold.
pub fn far_shell_fraction(u: &SpaceTimeField, cfg: &SolverConfig, threshold: i64) -> f64 {
    let chi = cfg.cutoff();
    let f = forward_transform(&u.mul_time(|t| chi.value(t)));
    let (mut far, mut total) = (0.0, 0.0);
    f.for_each_mode(|p, v| {
        total += v.norm_sqr();
        if modulation(p, false).abs() > threshold {
            far += v.norm_sqr();
        }
    });
    if total == 0.0 {
        0.0
    } else {
        far / total
    }
}

/// Largest amplitude of `profile` (normalized in H^s) for which the
/// iteration converges, by bisection in log scale between lo and hi.
pub fn find_delta(profile: &SpatialField, grid: GridSpec, cfg: &SolverConfig, lo: f64, hi: f64, steps: usize) -> Result<f64> {
    let norm = profile.hs_norm(cfg.s);
    if norm == 0.0 {
        return Err(Error::InvalidArgument("zero profile".into()));
    }
    let cfg = SolverConfig { delta: None, tol: cfg.tol.max(1e-14), ..*cfg };
    let ok = |a: f64| -> Result<bool> {
        let u0 = profile.scale(Complex64::new(a / norm, 0.0));
        match picard_solve(&u0, grid, &cfg) {
            Ok(s) => Ok(s.outcome.converged()),
            Err(Error::SupNorm { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    };
    if !ok(lo)? {
        return Err(Error::Inadmissible(format!("no convergence even at ‖u₀‖ = {lo:e}")));
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    if ok(hi)? {
        return Ok(hi);
    }
    for _ in 0..steps {
        let m = 0.5 * (a + b);
        if ok(m.exp())? {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(a.exp())
}

/// ‖S(u₀ + η p̂) − S(u₀)‖ / η with p̂ = p/‖p‖_{H^s}, distance in sup_t H^s.
pub fn lipschitz_probe(
    u0: &SpatialField,
    direction: &SpatialField,
    grid: GridSpec,
    cfg: &SolverConfig,
    etas: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let base = picard_solve(u0, grid, cfg)?;
    if !base.outcome.converged() {
        return Err(Error::Inadmissible(format!("base solve did not converge: {:?}", base.outcome)));
    }
    let pn = direction.hs_norm(cfg.s);
    let cb = coefficients(&base.u);
    etas.iter()
        .map(|&eta| {
            let v0 = u0.add(&direction.scale(Complex64::new(eta / pn, 0.0)))?;
            let sol = picard_solve(&v0, grid, cfg)?;
            if !sol.outcome.converged() {
                return Err(Error::Inadmissible(format!("perturbed solve did not converge: {:?}", sol.outcome)));
            }
            let c = coefficients(&sol.u);
            let d: Vec<Complex64> = c.iter().zip(&cb).map(|(a, b)| a - b).collect();
            Ok((eta, sup_hs(&grid, &d, cfg.s) / eta))
        })
        .collect()
}
