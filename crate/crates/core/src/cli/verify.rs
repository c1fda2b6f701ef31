use serde_json::json;

use super::config::RunConfig;
use super::output::{num, opt_num, Output, Status, Task};
use crate::error::Result;
use crate::lab::estimates::{info, judge, null_suppression, run_family, Bound, Sweep, SweepConfig, Verdict, RESONANCE_HALF};
use crate::lab::null::resonance_scan;
use crate::report::EstimateReport;

pub(super) const REPORT_HEADER: [&str; 14] =
    ["grid", "id", "i", "j", "k", "d1", "d2", "d3", "signs", "note", "lhs", "rhs", "ratio", "sample"];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn report_row(grid: &str, r: &EstimateReport) -> Vec<String> {
    let c = &r.config;
    vec![
        grid.into(),
        r.id.clone(),
        opt(c.i),
        opt(c.j),
        opt(c.k),
        opt(c.d1),
        opt(c.d2),
        opt(c.d3),
        c.signs.clone(),
        c.note.clone(),
        num(r.lhs),
        num(r.rhs),
        num(r.ratio),
        format!("{}#{}", r.sample, r.seed),
    ]
}

pub(super) fn report_rows(s: &Sweep) -> Vec<Vec<String>> {
    s.base.iter().map(|r| report_row("base", r)).chain(s.fine.iter().map(|r| report_row("fine", r))).collect()
}

/// Judge every sweep, first freezing measured constants into the output
/// directory when asked.
pub(super) fn freeze_and_judge(cfg: &RunConfig, sweeps: &[Sweep], freeze: bool, out: &mut Output) -> Result<Vec<Verdict>> {
    let mut constants = cfg.constants()?;
    if freeze {
        for s in sweeps {
            let exact = matches!(info(&s.id).map(|e| e.bound), Some(Bound::Exact(_)));
            if !exact && !s.base.is_empty() {
                constants.freeze(&s.id, s.max_base().max(s.max_fine()));
            }
        }
        out.write_bytes("regression_constants.toml", constants.to_toml().as_bytes())?;
    }
    Ok(sweeps.iter().map(|s| judge(s, &constants)).collect())
}

pub(super) fn run(cfg: &RunConfig, freeze: bool, out: &mut Output) -> Result<(Vec<Task>, serde_json::Value)> {
    let ids = cfg.verify.resolved_ids()?;
    let v = &cfg.verify;
    let sc = SweepConfig { samples: v.samples, seed: cfg.seed, s: v.s, scale: v.scale, cap: v.cap };
    let mut families: Vec<&str> = Vec::new();
    for id in &ids {
        let f = info(id).expect("resolved").family;
        if !families.contains(&f) {
            families.push(f);
        }
    }
    let mut sweeps = Vec::new();
    let mut extra_tasks = Vec::new();
    for fam in families {
        let found = if fam == "null" {
            let ns = null_suppression(&sc)?;
            let monotone = ns.suppression.windows(2).all(|w| w[1].1 < w[0].1);
            let listed: Vec<String> = ns.suppression.iter().map(|(a, w)| format!("α={a}: {w:.4}")).collect();
            extra_tasks.push(Task::new(
                "null-monotone",
                Status::from_pass(monotone),
                format!("worst normalized ratio per α: {}", listed.join(", ")),
            ));
            vec![ns.sweep]
        } else {
            run_family(fam, &sc)?
        };
        if fam == "res1" {
            let scan = resonance_scan(2, RESONANCE_HALF);
            extra_tasks.push(Task::new(
                "res1-identity",
                Status::from_pass(scan.identity_defect == 0.0),
                format!("{} pairs, largest identity defect {:e}", scan.pairs, scan.identity_defect),
            ));
        }
        sweeps.extend(found.into_iter().filter(|s| ids.contains(&s.id.as_str())));
    }
    let verdicts = freeze_and_judge(cfg, &sweeps, freeze, out)?;

    let mut tasks = Vec::new();
    let mut summary = Vec::new();
    for (s, vd) in sweeps.iter().zip(&verdicts) {
        out.write_csv(&format!("estimates/{}.csv", s.id), &REPORT_HEADER, &report_rows(s))?;
        let status = Status::from_pass(vd.pass);
        summary.push(vec![
            s.id.clone(),
            status.label().into(),
            num(vd.max_base),
            num(vd.max_fine),
            num(vd.change),
            opt_num(vd.constant),
            vd.reason.clone(),
        ]);
        tasks.push(Task::new(s.id.clone(), status, vd.reason.clone()));
        for u in &s.untestable {
            summary.push(vec![
                s.id.clone(),
                Status::Untestable.label().into(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                u.clone(),
            ]);
            tasks.push(Task::new(format!("{}: {u}", s.id), Status::Untestable, "hypothesis not realizable on the lab grids"));
        }
    }
    for t in extra_tasks {
        summary.push(vec![
            t.name.clone(),
            t.status.label().into(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            t.detail.clone(),
        ]);
        tasks.push(t);
    }
    out.write_csv("summary.csv", &["id", "status", "max_base", "max_fine", "change", "constant", "detail"], &summary)?;
    Ok((tasks, json!({ "verdicts": verdicts })))
}
