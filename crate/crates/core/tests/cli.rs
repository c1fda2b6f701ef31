use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn smlab(dir: &Path, args: &[&str], config: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_smlab"));
    cmd.env_remove("SMLAB_OUT").current_dir(dir).args(args).args(["--jobs", "1"]);
    if let Some(text) = config {
        let path = dir.join("run.toml");
        fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn task<'a>(m: &'a Value, name: &str) -> &'a Value {
    m["tasks"].as_array().unwrap().iter().find(|t| t["name"] == name).unwrap_or_else(|| panic!("no task {name}"))
}

const SMALL_GRID: &str = "[grid]\nn = 2\nm = 16\nk = 32\n";

const QUICK_NORMS: &str = "[grid]\nn = 2\nm = 16\nk = 32\n[norms]\nsamples = 2\nembedding_samples = 0\ntruncation_samples = 0\n";

const SOLVE: &str = "[grid]\nn = 2\nm = 16\nk = 64\n[solve]\nepsilon = 1e-3\n";

#[test]
fn decompose_writes_tables_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = smlab(dir.path(), &["decompose", "--out", "d"], Some(SMALL_GRID));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let d = dir.path().join("d");
    let m = manifest(&d);
    assert_eq!(m["command"], "decompose");
    assert_eq!(m["seed"], 1);
    assert_eq!(task(&m, "reconstruct-0")["status"], "PASS");
    let files: Vec<&str> = m["files"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    let mut unique = files.clone();
    unique.sort();
    unique.dedup();
    assert_eq!(unique.len(), files.len());
    for f in &files {
        assert!(d.join(f).is_file(), "{f}");
    }
    assert!(files.contains(&"pieces.csv") && files.contains(&"reconstruction.csv"));
    let pieces = fs::read_to_string(d.join("pieces.csv")).unwrap();
    assert!(pieces.starts_with("sample,i,d,xi1,xi2,l2\n"));
}

#[test]
fn plane_wave_lives_in_the_lowest_modulation_shell() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{SMALL_GRID}[decompose]\nfield = \"plane-wave\"\nmode = [2, 1]\n");
    let out = smlab(dir.path(), &["decompose", "--out", "d"], Some(&cfg));
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(dir.path().join("d/pieces.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert!(!rows.is_empty());
    let mass = |r: &csv::StringRecord| r[5].parse::<f64>().unwrap().powi(2);
    let total: f64 = rows.iter().map(mass).sum();
    let low: f64 = rows.iter().filter(|r| &r[2] == "1").map(mass).sum();
    assert!(low > 0.99 * total, "{low} of {total}");
    assert!(rows.iter().all(|r| &r[3] == "2" && &r[4] == "1"));
}

#[test]
fn same_seed_gives_identical_tables() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a", "b"] {
        let out = smlab(dir.path(), &["norms", "--seed", "7", "--out", name], Some(QUICK_NORMS));
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["norms.csv", "breakdown.csv"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
    let m = manifest(&dir.path().join("a"));
    assert_eq!(m["seed"], 7);
    assert_eq!(task(&m, "zero-field")["status"], "PASS");
    assert_eq!(task(&m, "scaling")["status"], "PASS");
    let norms = fs::read_to_string(dir.path().join("a/norms.csv")).unwrap();
    assert!(norms.lines().any(|l| l.starts_with("zero,hs,0e0,0e0,")));

    let out = smlab(dir.path(), &["norms", "--seed", "8", "--out", "c"], Some(QUICK_NORMS));
    assert_eq!(out.status.code(), Some(0));
    assert_ne!(fs::read(dir.path().join("a/norms.csv")).unwrap(), fs::read(dir.path().join("c/norms.csv")).unwrap());
}

#[test]
fn solve_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a", "b"] {
        let out = smlab(dir.path(), &["solve", "--out", name], Some(SOLVE));
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["trace.csv", "trace.dat", "energy.dat", "solution.field"] {
        assert_eq!(fs::read(dir.path().join("a").join(f)).unwrap(), fs::read(dir.path().join("b").join(f)).unwrap(), "{f}");
    }
    let m = manifest(&dir.path().join("a"));
    assert_eq!(task(&m, "solve")["status"], "PASS");
    assert_eq!(task(&m, "energy-drift")["status"], "PASS");
}

#[test]
fn zero_data_converges_at_once() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[grid]\nn = 2\nm = 8\nk = 32\n[solve]\nepsilon = 0.0\n";
    let out = smlab(dir.path(), &["solve", "--out", "z"], Some(cfg));
    assert_eq!(out.status.code(), Some(0));
    let m = manifest(&dir.path().join("z"));
    assert_eq!(m["details"]["outcome"]["Converged"]["iterations"], 1);
}

#[test]
fn large_data_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[grid]\nn = 2\nm = 8\nk = 32\n[solve]\nepsilon = 1.5\n";
    let out = smlab(dir.path(), &["solve", "--out", "big"], Some(cfg));
    assert_eq!(out.status.code(), Some(1));
    let m = manifest(&dir.path().join("big"));
    assert_eq!(task(&m, "solve")["status"], "FAIL");
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL"));
}

#[test]
fn configuration_errors_exit_two_without_output() {
    let dir = tempfile::tempdir().unwrap();
    for (args, cfg) in [
        (&["decompose", "--out", "x"][..], Some("[grid]\nn = 2\nbogus = 1\n")),
        (&["decompose", "--out", "x"][..], Some("not toml = = 1")),
        (&["verify", "--out", "x"][..], Some("[verify]\nids = []\n")),
        (&["verify", "--out", "x"][..], Some("[verify]\nids = [\"nope\"]\n")),
        (&["decompose", "--out", "x"][..], Some("[grid]\nn = 2\nm = 7\nk = 32\n")),
        (&["solve", "--out", "x"][..], Some("[solve]\nmode = [40, 0]\n")),
        (&["decompose", "--out", "x"][..], Some("[decompose]\nfield = \"plane-wave\"\nmode = [9, 9]\n")),
        (&["report", "--out", "x"][..], None),
        (&["frobnicate"][..], None),
    ] {
        let out = smlab(dir.path(), args, cfg);
        assert_eq!(out.status.code(), Some(2), "{args:?} {cfg:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!dir.path().join("x").exists());
    }
    let out = smlab(dir.path(), &["decompose", "--config", "missing.toml"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_directory_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("out = \"from-config\"\n{SMALL_GRID}");
    let run = |env: Option<&str>, flag: Option<&str>| {
        fs::write(dir.path().join("run.toml"), &cfg).unwrap();
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_smlab"));
        cmd.env_remove("SMLAB_OUT").current_dir(dir.path()).args(["decompose", "--config", "run.toml"]);
        if let Some(e) = env {
            cmd.env("SMLAB_OUT", e);
        }
        if let Some(f) = flag {
            cmd.args(["--out", f]);
        }
        assert_eq!(cmd.output().unwrap().status.code(), Some(0));
    };
    run(None, None);
    assert!(dir.path().join("from-config/manifest.json").is_file());
    run(Some("from-env"), None);
    assert!(dir.path().join("from-env/manifest.json").is_file());
    run(Some("from-env-2"), Some("from-flag"));
    assert!(dir.path().join("from-flag/manifest.json").is_file());
    assert!(!dir.path().join("from-env-2").exists());
}

#[test]
fn verify_reports_per_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[verify]\nids = [\"b2\", \"be22\"]\nsamples = 3\n";
    let out = smlab(dir.path(), &["verify", "--out", "v"], Some(cfg));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = dir.path().join("v");
    let m = manifest(&v);
    assert_eq!(task(&m, "b2")["status"], "PASS");
    assert_eq!(task(&m, "be22")["status"], "PASS");
    assert!(m["tasks"].as_array().unwrap().iter().any(|t| t["status"] == "UNTESTABLE-AT-SCALE"));
    let summary = fs::read_to_string(v.join("summary.csv")).unwrap();
    assert!(summary.starts_with("id,status,max_base,max_fine,change,constant,detail\n"));
    assert!(v.join("estimates/b2.csv").is_file());
}

#[test]
fn report_merges_runs() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(smlab(dir.path(), &["decompose", "--out", "d"], Some(SMALL_GRID)).status.code(), Some(0));
    let cfg = "[report]\ninputs = [\"d\"]\n";
    let out = smlab(dir.path(), &["report", "--out", "r"], Some(cfg));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(dir.path().join("r/acceptance.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 8);
    assert_eq!(&rows[0][2], "PASS");
    for r in &rows[1..] {
        assert_eq!(&r[2], "SKIPPED", "{r:?}");
    }
    assert!(rows[5][4].contains("no solver output"));

    let cfg = "[report]\ninputs = [\"d\", \"gone\"]\n";
    let out = smlab(dir.path(), &["report", "--out", "r2"], Some(cfg));
    assert_eq!(out.status.code(), Some(1));
    assert!(dir.path().join("r2/acceptance.csv").is_file());

    let big = "[grid]\nn = 2\nm = 8\nk = 32\n[solve]\nepsilon = 1.5\n";
    assert_eq!(smlab(dir.path(), &["solve", "--out", "s"], Some(big)).status.code(), Some(1));
    let cfg = "[report]\ninputs = [\"d\", \"s\"]\n";
    assert_eq!(smlab(dir.path(), &["report", "--out", "r3"], Some(cfg)).status.code(), Some(1));
    let text = fs::read_to_string(dir.path().join("r3/acceptance.csv")).unwrap();
    assert!(text.lines().any(|l| l.starts_with("6,") && l.contains("FAIL")));
}
