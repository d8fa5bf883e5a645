use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sparse_prior::cli::SEED_ENV;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparse-prior"))
        .args(args)
        .arg("--out")
        .arg(dir.join("out"))
        .env_remove(SEED_ENV)
        .output()
        .expect("binary runs")
}

fn written(out: &Output, ext: &str) -> PathBuf {
    let stdout = String::from_utf8_lossy(&out.stdout);
    stdout
        .lines()
        .filter_map(|l| l.strip_prefix("wrote "))
        .map(PathBuf::from)
        .find(|p| p.extension().is_some_and(|e| e == ext))
        .unwrap_or_else(|| panic!("no .{ext} in {stdout}"))
}

fn config_file(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn sweep_m_writes_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_file(dir.path(), "c.toml", "trials = 2\nm_values = [40, 80]\n");
    let out = run(dir.path(), &["sweep-m", "--config", &cfg, "--algos", "niht"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(written(&out, "csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("sweep_var,algorithm,value"));
    assert!(lines[1].starts_with("m,niht,40,"));
    assert!(lines[2].starts_with("m,niht,80,"));
}

#[test]
fn convergence_has_a_row_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_file(dir.path(), "c.toml", "trials = 2\nmax_iters = 50\n");
    let out = run(
        dir.path(),
        &["convergence", "--config", &cfg, "--algos", "niht,ka-niht,rka-niht"],
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(written(&out, "csv")).unwrap();
    assert_eq!(csv.lines().count(), 151);
    assert!(csv.lines().skip(1).all(|l| l.starts_with("iteration,")));
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep-noise", "--trials", "3", "--seed", "11", "--algos", "rka-niht,lw-omp"];
    let a = run(dir.path(), &args);
    let b = run(dir.path(), &args);
    let (pa, pb) = (written(&a, "csv"), written(&b, "csv"));
    assert_ne!(pa, pb);
    assert_eq!(fs::read(pa).unwrap(), fs::read(pb).unwrap());
}

#[test]
fn summary_records_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_file(dir.path(), "c.json", r#"{"trials": 2, "m": 50, "beta": 0.3}"#);
    let out = run(dir.path(), &["single", "--config", &cfg, "--seed", "5", "--algos", "omp"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(written(&out, "json")).unwrap()).unwrap();
    assert_eq!(json["experiment"], "single");
    assert_eq!(json["master_seed"], 5);
    assert_eq!(json["config"]["m"], 50);
    assert_eq!(json["config"]["beta"], 0.3);
    assert_eq!(json["config"]["trials"], 2);
    assert_eq!(json["config"]["algorithms"], serde_json::json!(["omp"]));
}

#[test]
fn environment_seed_sits_below_file_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_sparse-prior");
    let seed_of = |extra: &[&str]| {
        let out = Command::new(bin)
            .args(["single", "--trials", "1", "--algos", "omp", "--out"])
            .arg(dir.path().join("out"))
            .args(extra)
            .env(SEED_ENV, "77")
            .output()
            .unwrap();
        String::from_utf8_lossy(&out.stdout).lines().next().unwrap_or("").to_owned()
    };
    assert_eq!(seed_of(&[]), "seed 77");
    let cfg = config_file(dir.path(), "s.toml", "seed = 3\n");
    assert_eq!(seed_of(&["--config", &cfg]), "seed 3");
    assert_eq!(seed_of(&["--config", &cfg, "--seed", "9"]), "seed 9");
}

#[test]
fn bad_config_exits_one_and_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_file(dir.path(), "c.toml", "c = 1.5\n");
    let out = run(dir.path(), &["single", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("c"));

    let cfg = config_file(dir.path(), "d.toml", "trials = \"many\"\n");
    let out = run(dir.path(), &["single", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trials"));

    let out = run(dir.path(), &["single", "--algos", "lasso"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unwritable_output_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sparse-prior"))
        .args(["single", "--trials", "1", "--algos", "omp", "--out"])
        .arg(blocker.join("sub"))
        .env_remove(SEED_ENV)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn all_runs_failing_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    // Dense signals with two measurements leave OMP no valid run.
    let cfg = config_file(
        dir.path(),
        "c.toml",
        "n = 20\nm = 2\nm_values = [2]\ngroup_sizes = [20]\ngroup_probs = [0.9]\ntrials = 3\nalgorithms = [\"omp\"]\n",
    );
    let out = run(dir.path(), &["single", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}
