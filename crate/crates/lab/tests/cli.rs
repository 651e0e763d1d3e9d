use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use tempfile::TempDir;

fn run(dir: &Path, args: &[&str], config: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_h3wave"));
    cmd.args(args);
    if let Some(text) = config {
        let path = dir.join("run.cfg");
        fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn out_arg(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const MINIMAL: &str = "\
# small bump on a coarse grid
grid.r_max = 20
grid.n = 1024
time.dt = 2e-3
time.horizon = 4
data.kind = bump
data.amplitude = 1
data.support = 2
";

#[test]
fn minimal_evolve_is_fast_and_reproducible() {
    let tmp = TempDir::new().unwrap();
    let a = out_arg(tmp.path(), "a");
    let b = out_arg(tmp.path(), "b");
    let start = Instant::now();
    let first = run(tmp.path(), &["evolve", "--out", &a], Some(MINIMAL));
    assert!(start.elapsed().as_secs_f64() < 10.0);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let second = run(tmp.path(), &["evolve", "--out", &b], Some(MINIMAL));
    assert_eq!(second.status.code(), Some(0));

    let csv_a = fs::read(tmp.path().join("a/diagnostics.csv")).unwrap();
    let csv_b = fs::read(tmp.path().join("b/diagnostics.csv")).unwrap();
    assert_eq!(csv_a, csv_b);
    let header = String::from_utf8_lossy(&csv_a).lines().next().unwrap().to_string();
    assert_eq!(header, "t,E_total,E_kinetic,E_gradient,E_potential,L4_partial,M_t");

    let summary = fs::read_to_string(tmp.path().join("a/summary.jsonl")).unwrap();
    for line in summary.lines() {
        serde_json::from_str::<serde_json::Value>(line).unwrap();
    }
    assert!(summary.contains("\"command\":\"evolve\""));
}

#[test]
fn guard_violation_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = format!("{MINIMAL}time.horizon = 30\n").replace("time.horizon = 4\n", "");
    let o = run(tmp.path(), &["evolve", "--out", &out_arg(tmp.path(), "o")], Some(&cfg));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("time.horizon"));
}

#[test]
fn malformed_configs_name_the_key() {
    let tmp = TempDir::new().unwrap();
    for (text, key) in [
        ("grid.bogus = 1\n", "grid.bogus"),
        ("grid.n = many\n", "grid.n"),
        ("grid.r_max = -3\n", "grid.r_max"),
        ("data.kind = square\n", "data.kind"),
        ("sweep.s0 = 1/16, 1/32\n", "sweep.s0"),
    ] {
        let o = run(tmp.path(), &["sweep", "--out", &out_arg(tmp.path(), "o")], Some(text));
        assert_eq!(o.status.code(), Some(2), "{text}");
        assert!(stderr(&o).contains(key), "{text}: {}", stderr(&o));
    }
}

#[test]
fn non_finite_evolution_is_a_numerical_abort() {
    let tmp = TempDir::new().unwrap();
    let cfg = "grid.r_max = 20\ngrid.n = 256\ntime.horizon = 2\ndata.kind = bump\ndata.amplitude = 1e200\ndata.support = 2\n";
    let o = run(tmp.path(), &["evolve", "--out", &out_arg(tmp.path(), "o")], Some(cfg));
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn threshold_prints_the_exact_ratio() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["threshold", "--out", &out_arg(tmp.path(), "o")], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("182/201"));
}

#[test]
fn seed_flag_overrides_the_config() {
    let tmp = TempDir::new().unwrap();
    let cfg = "grid.r_max = 20\ngrid.n = 512\ntime.dt = 5e-3\ntime.horizon = 1\ndata.kind = power_law\ndata.s = 0.9\ndata.seed = 1\ndata.support = 4\n";
    let read = |name: &str, seed: &str| {
        let out = out_arg(tmp.path(), name);
        let o = run(tmp.path(), &["evolve", "--out", &out, "--seed", seed], Some(cfg));
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        fs::read(tmp.path().join(name).join("diagnostics.csv")).unwrap()
    };
    let one = read("one", "1");
    let two = read("two", "2");
    let again = read("again", "2");
    assert_ne!(one, two);
    assert_eq!(two, again);
    let summary = fs::read_to_string(tmp.path().join("two/summary.jsonl")).unwrap();
    assert!(summary.contains("\"seed\":2"));
}

#[test]
fn sweep_of_zero_data_reports_without_fitting() {
    let tmp = TempDir::new().unwrap();
    let cfg = "\
grid.r_max = 20
grid.n = 256
time.dt = 1e-2
time.horizon = 1
data.kind = bump
data.amplitude = 0
data.support = 2
sweep.s0 = 2^-2, 2^-3, 2^-4, 2^-5
sweep.s = 0.95
";
    let o = run(tmp.path(), &["sweep", "--out", &out_arg(tmp.path(), "o"), "--workers", "2"], Some(cfg));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let fits = fs::read_to_string(tmp.path().join("o/fits.csv")).unwrap();
    let mut lines = fits.lines();
    assert_eq!(
        lines.next().unwrap(),
        "s,quantity,slope,residual,slope_error,points,predicted,tolerance,status"
    );
    for line in lines {
        assert!(line.contains("degenerate"), "{line}");
    }
}

#[test]
fn inadmissible_triples_are_skipped_with_a_reason() {
    let tmp = TempDir::new().unwrap();
    let cfg = "\
grid.r_max = 20
grid.n = 256
time.dt = 1e-2
strichartz.horizon = 2
strichartz.radius = 2
strichartz.scales = 1
strichartz.s = 0.9
strichartz.support = 3
strichartz.triples = 4,4,0.5; 2,2
";
    let o = run(tmp.path(), &["strichartz", "--out", &out_arg(tmp.path(), "o")], Some(cfg));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let table = fs::read_to_string(tmp.path().join("o/strichartz_max.csv")).unwrap();
    let rows: Vec<&str> = table.lines().collect();
    assert_eq!(rows[0], "p,q,gamma,max_ratio,min_ratio,status");
    assert!(rows[1].starts_with("4,4,0.5,") && rows[1].ends_with(",ok"));
    assert!(rows[2].starts_with("2,2,") && rows[2].contains("skipped:"));
}
