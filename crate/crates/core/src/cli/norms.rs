use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::config::{NormName, RunConfig};
use super::output::{histogram, num, Output, Status, Task};
use super::verify::{freeze_and_judge, report_rows, REPORT_HEADER};
use crate::error::Result;
use crate::lab::estimates::Sweep;
use crate::norms::embed::{embedding_sweep, random_localized, Embedding};
use crate::norms::{norm, truncation_refinement, NormBreakdown, SpaceTag};
use crate::spectral::{GridSpec, Spectrum};
use crate::solver::SolverConfig;

/// Relative tolerance of the homogeneity check ‖2f‖ = 2‖f‖.
const SCALING_TOL: f64 = 1e-12;

fn tag(name: NormName, cfg: &RunConfig) -> SpaceTag {
    let c = &cfg.norms;
    let t = match name {
        NormName::Hs => SpaceTag::new(crate::norms::Family::Hs, c.s),
        NormName::Xsb => SpaceTag::xsb(c.s, c.b),
        NormName::XPlus => SpaceTag::xshalf(c.s, true, c.p),
        NormName::XMinus => SpaceTag::xshalf(c.s, false, c.p),
        NormName::Y => SpaceTag::new(crate::norms::Family::Y, c.s),
        NormName::Scripty => SpaceTag::new(crate::norms::Family::ScriptY, c.s),
        NormName::W => SpaceTag::new(crate::norms::Family::W, c.s),
        NormName::Z => SpaceTag::new(crate::norms::Family::Z, c.s),
    };
    if c.conjugate {
        t.conj()
    } else {
        t
    }
}

struct Row {
    sample: String,
    norm: NormName,
    b: NormBreakdown,
    doubled: f64,
}

pub(super) fn run(cfg: &RunConfig, freeze: bool, out: &mut Output) -> Result<(Vec<Task>, serde_json::Value)> {
    let grid = cfg.grid.spec()?;
    let c = &cfg.norms;
    let mut fields: Vec<(String, Spectrum)> = vec![("zero".into(), Spectrum::empty(grid))];
    for k in 0..c.samples {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(1_000_003).wrapping_add(k as u64));
        let (f, loc) = random_localized(grid, &mut rng)?;
        fields.push((format!("{k}:{}:i={}", loc.family.name(), loc.i), f));
    }
    let jobs: Vec<(usize, NormName)> =
        (0..fields.len()).flat_map(|f| c.norms.iter().map(move |n| (f, *n))).collect();
    let rows: Vec<Result<Row>> = jobs
        .par_iter()
        .map(|&(fi, name)| {
            let (label, f) = &fields[fi];
            let t = tag(name, cfg);
            let b = norm(f, &t)?;
            let doubled = norm(&f.scale(Complex64::new(2.0, 0.0)), &t)?.total;
            Ok(Row { sample: label.clone(), norm: name, b, doubled })
        })
        .collect();
    let rows: Vec<Row> = rows.into_iter().collect::<Result<_>>()?;

    let mut tasks = Vec::new();
    let zero_ok = rows.iter().filter(|r| r.sample == "zero").all(|r| r.b.total == 0.0 && r.doubled == 0.0);
    tasks.push(Task::new("zero-field", Status::from_pass(zero_ok), "every norm of the zero field is 0"));
    let worst_scaling = rows
        .iter()
        .filter(|r| r.b.total > 0.0)
        .map(|r| (r.doubled - 2.0 * r.b.total).abs() / (2.0 * r.b.total))
        .fold(0.0, f64::max);
    tasks.push(Task::new(
        "scaling",
        Status::from_pass(worst_scaling <= SCALING_TOL),
        format!("max |‖2f‖ − 2‖f‖| / 2‖f‖ = {worst_scaling:e}"),
    ));

    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.sample.clone(),
                r.norm.name().into(),
                num(r.b.total),
                num(r.doubled),
                r.b.upper_bound.to_string(),
            ]
        })
        .collect();
    out.write_csv("norms.csv", &["sample", "norm", "total", "total_of_2f", "upper_bound"], &table)?;
    let mut parts = Vec::new();
    for r in &rows {
        for (k, v) in &r.b.contributions {
            parts.push(vec![r.sample.clone(), r.norm.name().into(), k.to_string(), num(*v)]);
        }
    }
    out.write_csv("breakdown.csv", &["sample", "norm", "key", "contribution"], &parts)?;

    let mut sweeps = Vec::new();
    let base = GridSpec::new(grid.n(), c.sweep_grid[0], c.sweep_grid[1])?;
    if c.embedding_samples > 0 {
        let found: Vec<Result<Sweep>> = Embedding::ALL
            .par_iter()
            .map(|e| {
                let s = embedding_sweep(*e, base, c.s, c.embedding_samples, cfg.seed)?;
                Ok(Sweep { id: e.id().into(), base: s.base, fine: s.fine, untestable: Vec::new() })
            })
            .collect();
        for s in found {
            sweeps.push(s?);
        }
    }
    if c.truncation_samples > 0 {
        let chi = SolverConfig { s: c.s, ..cfg.solver }.cutoff();
        let (b, f) = truncation_refinement(base, c.s, &chi, c.truncation_samples, cfg.seed)?;
        for id in ["truncation-x", "truncation-y", "truncation-z"] {
            sweeps.push(Sweep {
                id: id.into(),
                base: b.iter().filter(|r| r.id == id).cloned().collect(),
                fine: f.iter().filter(|r| r.id == id).cloned().collect(),
                untestable: Vec::new(),
            });
        }
    }
    let verdicts = freeze_and_judge(cfg, &sweeps, freeze, out)?;
    for (s, v) in sweeps.iter().zip(&verdicts) {
        out.write_csv(&format!("sweeps/{}.csv", s.id), &REPORT_HEADER, &report_rows(s))?;
        let ratios: Vec<f64> = s.base.iter().chain(&s.fine).map(|r| r.ratio).collect();
        out.write_plot(&format!("sweeps/{}-histogram.dat", s.id), ["ratio", "count"], &histogram(&ratios, c.histogram_bins))?;
        tasks.push(Task::new(s.id.clone(), Status::from_pass(v.pass), v.reason.clone()));
    }
    Ok((tasks, json!({ "sweeps": verdicts })))
}
