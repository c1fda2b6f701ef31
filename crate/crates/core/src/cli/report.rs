use serde::Serialize;
use serde_json::json;

use super::config::RunConfig;
use super::output::{Manifest, Output, Status, Task};
use crate::error::{Error, Result};

/// Acceptance criteria: (number, name, whether it needs a solver run).
pub const CRITERIA: [(u8, &str, bool); 8] = [
    (1, "reconstruction", false),
    (2, "paraboloid-interaction", false),
    (3, "null-structure", false),
    (4, "bilinear", false),
    (5, "algebra", false),
    (6, "solver", true),
    (7, "energy", true),
    (8, "linear", false),
];

/// Criterion a task contributes to, if any.
pub fn criterion_of(command: &str, task: &str) -> Option<u8> {
    let id = task.split(':').next().unwrap_or(task);
    match command {
        "decompose" if task.starts_with("reconstruct-") => Some(1),
        "verify" => match id {
            "ge" | "ge1" | "ge2" | "ge3" => Some(2),
            "null" | "null-monotone" | "res1-identity" => Some(3),
            "be11" | "be22" | "b1" | "b2" | "b10" | "y1" | "y2" | "m9" | "c0" | "res1" | "r1" | "y6" => Some(4),
            "algebra-Z" | "algebra-ZZbar" | "y4" | "mult-W" => Some(5),
            "le" => Some(8),
            _ => None,
        },
        "solve" => match id {
            "solve" | "contraction" | "lipschitz" => Some(6),
            "energy-drift" | "energy-refinement" => Some(7),
            _ => None,
        },
        _ => None,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionSummary {
    pub criterion: u8,
    pub name: String,
    pub status: Status,
    pub tasks: usize,
    pub detail: String,
}

pub(super) fn run(cfg: &RunConfig, out: &mut Output) -> Result<(Vec<Task>, serde_json::Value)> {
    let inputs = &cfg.report.inputs;
    if inputs.is_empty() {
        return Err(Error::Config("report.inputs is empty".into()));
    }
    let mut manifests = Vec::new();
    let mut missing = Vec::new();
    for dir in inputs {
        match Manifest::load(dir) {
            Ok(m) => manifests.push(m),
            Err(e) => missing.push(format!("{}: {e}", dir.display())),
        }
    }
    let mut grouped: Vec<Vec<(String, &Task)>> = vec![Vec::new(); CRITERIA.len()];
    let mut others: Vec<(String, &Task)> = Vec::new();
    for m in &manifests {
        for t in &m.tasks {
            match criterion_of(&m.command, &t.name) {
                Some(c) => grouped[c as usize - 1].push((m.command.clone(), t)),
                None => others.push((m.command.clone(), t)),
            }
        }
    }
    let mut summary = Vec::new();
    let mut tasks = Vec::new();
    for ((num, name, needs_solver), group) in CRITERIA.iter().zip(&grouped) {
        let failed: Vec<&str> =
            group.iter().filter(|(_, t)| t.status == Status::Fail).map(|(_, t)| t.name.as_str()).collect();
        let untestable = group.iter().filter(|(_, t)| t.status == Status::Untestable).count();
        let (status, detail) = if group.is_empty() && *needs_solver {
            (Status::Skipped, "no solver output among the inputs".to_string())
        } else if group.is_empty() {
            (Status::Skipped, "no input covers this criterion".to_string())
        } else if !failed.is_empty() {
            (Status::Fail, format!("failing: {}", failed.join(", ")))
        } else if group.iter().all(|(_, t)| t.status == Status::Untestable) {
            (Status::Untestable, format!("{untestable} configurations untestable"))
        } else {
            (Status::Pass, format!("{} tasks, {untestable} untestable configurations reported", group.len()))
        };
        tasks.push(Task::new(format!("criterion-{num}-{name}"), status, detail.clone()));
        summary.push(CriterionSummary { criterion: *num, name: name.to_string(), status, tasks: group.len(), detail });
    }
    for (cmd, t) in &others {
        if t.status == Status::Fail {
            tasks.push(Task::new(format!("{cmd}/{}", t.name), Status::Fail, t.detail.clone()));
        }
    }
    for m in &missing {
        tasks.push(Task::new(format!("input {m}"), Status::Fail, "missing or unreadable manifest"));
    }
    let rows: Vec<Vec<String>> = summary
        .iter()
        .map(|c| vec![c.criterion.to_string(), c.name.clone(), c.status.label().into(), c.tasks.to_string(), c.detail.clone()])
        .collect();
    out.write_csv("acceptance.csv", &["criterion", "name", "status", "tasks", "detail"], &rows)?;
    let mut all = Vec::new();
    for m in &manifests {
        for t in &m.tasks {
            all.push(vec![m.command.clone(), t.name.clone(), t.status.label().into(), t.detail.clone()]);
        }
    }
    out.write_csv("tasks.csv", &["command", "task", "status", "detail"], &all)?;
    Ok((tasks, json!({ "criteria": summary, "missing": missing })))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn task_mapping() {
        assert_eq!(criterion_of("verify", "ge2"), Some(2));
        assert_eq!(criterion_of("verify", "c0: i=3"), Some(4));
        assert_eq!(criterion_of("solve", "lipschitz"), Some(6));
        assert_eq!(criterion_of("solve", "far-shell"), None);
        assert_eq!(criterion_of("decompose", "reconstruct-3"), Some(1));
        assert_eq!(criterion_of("norms", "embed-x-z"), None);
    }
}
