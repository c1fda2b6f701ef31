use std::io::BufReader;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::config::{FieldKind, RunConfig};
use super::output::{num, Output, Status, Task};
use crate::dyadic::{annulus_project, modulation_project, modulation_values, reconstruction_errors, Reconstruction};
use crate::error::{Error, Result};
use crate::norms::embed::random_localized;
use crate::sample::dense_noise;
use crate::spectral::io::read_field;
use crate::spectral::{Freq, FrequencyField, GridSpec, Spectral};

fn field(cfg: &RunConfig, grid: GridSpec, k: usize) -> Result<FrequencyField> {
    let d = &cfg.decompose;
    if let Some(path) = &d.input {
        let file = std::fs::File::open(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        return read_field(BufReader::new(file));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(1_000_003).wrapping_add(k as u64));
    Ok(match d.field {
        FieldKind::Noise => dense_noise(grid, &mut rng),
        FieldKind::PlaneWave => {
            let tau: i64 = d.mode.iter().map(|v| v * v).sum();
            let at = Freq::new(&d.mode, tau);
            if !grid.contains(&at) {
                return Err(Error::Config(format!("plane wave {:?} is outside the grid", d.mode)));
            }
            FrequencyField::single_mode(grid, at, Complex64::new(1.0, 0.0))?
        }
        FieldKind::Localized => random_localized(grid, &mut rng)?.0.to_field(),
    })
}

/// (i, d, ξ, mass) for every nonzero piece column.
fn piece_rows(f: &FrequencyField, conjugate: bool) -> Result<Vec<(u32, u64, Vec<i64>, f64)>> {
    let grid = *f.grid();
    let n = grid.n();
    let mut rows = Vec::new();
    for i in 0..=grid.i_cover() {
        let a = annulus_project(f, i)?;
        for d in modulation_values(i) {
            let p = modulation_project(&a, d, conjugate)?;
            for col in p.field.columns() {
                let mass: f64 = col.entries.iter().map(|(_, v)| v.norm_sqr()).sum::<f64>().sqrt();
                if mass > 0.0 {
                    rows.push((i, d, col.xi[..n].to_vec(), mass));
                }
            }
        }
    }
    Ok(rows)
}

pub(super) fn run(cfg: &RunConfig, out: &mut Output) -> Result<(Vec<Task>, serde_json::Value)> {
    let grid = cfg.grid.spec()?;
    let d = &cfg.decompose;
    let samples = if d.input.is_some() { 1 } else { d.samples };
    let results: Vec<Result<(Vec<(u32, u64, Vec<i64>, f64)>, Reconstruction)>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let f = field(cfg, grid, k)?;
            if f.grid().n() != grid.n() {
                return Err(Error::Config(format!("input field has n = {}, [grid] has n = {}", f.grid().n(), grid.n())));
            }
            Ok((piece_rows(&f, d.conjugate)?, reconstruction_errors(&f)?))
        })
        .collect();
    let n = grid.n();
    let mut header = vec!["sample".to_string(), "i".into(), "d".into()];
    header.extend((1..=n).map(|a| format!("xi{a}")));
    header.push("l2".into());
    let mut pieces = Vec::new();
    let mut recon = Vec::new();
    let mut tasks = Vec::new();
    let mut worst: f64 = 0.0;
    for (k, r) in results.into_iter().enumerate() {
        let (rows, rc) = r?;
        for (i, dd, xi, m) in rows {
            let mut row = vec![k.to_string(), i.to_string(), dd.to_string()];
            row.extend(xi.iter().map(|v| v.to_string()));
            row.push(num(m));
            pieces.push(row);
        }
        recon.push(vec![
            k.to_string(),
            num(rc.annulus),
            num(rc.modulation),
            num(rc.cube),
            num(rc.shell),
            num(rc.refined),
        ]);
        let w = rc.worst();
        worst = worst.max(w);
        tasks.push(Task::new(
            format!("reconstruct-{k}"),
            Status::from_pass(w <= d.tolerance),
            format!("worst relative error {w:e} (tolerance {:e})", d.tolerance),
        ));
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    out.write_csv("pieces.csv", &header, &pieces)?;
    out.write_csv("reconstruction.csv", &["sample", "annulus", "modulation", "cube", "shell", "refined"], &recon)?;
    Ok((tasks, json!({ "samples": samples, "worst_reconstruction_error": worst })))
}
