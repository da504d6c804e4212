use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn nonlocal(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonlocal"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn kernel_check_flags_unit_frequencies() {
    let tmp = TempDir::new().unwrap();
    write(
        tmp.path(),
        "k.toml",
        "[operator]\npreset = \"derivative\"\nn = 1\n[kernel]\ns = 0.5\nbudget = 4\n",
    );
    let out = nonlocal(tmp.path(), &["kernel-check", "--config", "k.toml", "--out", "o"]);
    assert_eq!(out.status.code(), Some(0));
    let line = stdout(&out);
    assert!(line.starts_with("PASS kernel-check: violating frequencies:"), "{line}");
    let listed: Vec<&str> = line.trim().rsplit(':').next().unwrap().split_whitespace().collect();
    assert!(listed.contains(&"1") && listed.contains(&"-1"), "{line}");
    let csv = std::fs::read_to_string(tmp.path().join("o/kernel-check.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "m1,mode_norm,rank,bessel,bessel_error,status"));
    assert_eq!(data_rows(&csv).len(), 8);
}

#[test]
fn linf_counterexample_gap() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "c.toml", "[sweep]\neps_list = [0.01]\n");
    let out = nonlocal(tmp.path(), &["counterexample-linf", "--config", "c.toml", "--out", "o"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(tmp.path().join("o/counterexample-linf.csv")).unwrap();
    let rows = data_rows(&csv);
    let gap: f64 = rows[0][1].parse().unwrap();
    assert!(gap >= 0.30685, "{gap}");
}

#[test]
fn empty_eps_list_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "bad.toml", "[sweep]\neps_list = []\n");
    let out = nonlocal(tmp.path(), &["localize", "--config", "bad.toml", "--out", "o"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eps_list is empty"));
    assert!(!tmp.path().join("o/localize.csv").exists());
}

#[test]
fn config_and_usage_errors_exit_two() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "typo.toml", "[sweep]\nepsilon = [0.1]\n");
    assert_eq!(nonlocal(tmp.path(), &["localize", "--config", "typo.toml"]).status.code(), Some(2));
    write(tmp.path(), "op.toml", "[operator]\npreset = \"curl\"\nn = 2\n");
    assert_eq!(nonlocal(tmp.path(), &["kernel-check", "--config", "op.toml"]).status.code(), Some(2));
    assert_eq!(nonlocal(tmp.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(nonlocal(tmp.path(), &["localize", "--config", "missing.toml"]).status.code(), Some(2));
}

#[test]
fn csv_is_independent_of_thread_count() {
    let tmp = TempDir::new().unwrap();
    write(
        tmp.path(),
        "l.toml",
        "[operator]\npreset = \"gradient\"\nn = 2\n[field]\ngrid = 32\nbandwidth = 3\n[sweep]\neps_list = [0.1, 0.05, 0.025, 0.0125]\n",
    );
    for cmd in ["localize", "gauss-green"] {
        nonlocal(tmp.path(), &[cmd, "--config", "l.toml", "--out", "one", "--threads", "1", "--seed", "9"]);
        nonlocal(tmp.path(), &[cmd, "--config", "l.toml", "--out", "four", "--threads", "4", "--seed", "9"]);
        let a = std::fs::read(tmp.path().join(format!("one/{cmd}.csv"))).unwrap();
        let b = std::fs::read(tmp.path().join(format!("four/{cmd}.csv"))).unwrap();
        assert_eq!(a, b, "{cmd}");
    }
    nonlocal(tmp.path(), &["localize", "--config", "l.toml", "--out", "other", "--seed", "10"]);
    let a = std::fs::read(tmp.path().join("one/localize.csv")).unwrap();
    let c = std::fs::read(tmp.path().join("other/localize.csv")).unwrap();
    assert_ne!(a, c);
}

#[test]
fn metadata_block_and_number_format() {
    let tmp = TempDir::new().unwrap();
    let out = nonlocal(tmp.path(), &["multiplier", "--out", "o"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("positivity certificate on grid"));
    let csv = std::fs::read_to_string(tmp.path().join("o/multiplier.csv")).unwrap();
    assert!(csv.starts_with("# nonlocal multiplier"));
    assert!(csv.contains("# tolerance.multiplier_tail = 1e-14"));
    assert!(csv.contains("# quadrature.radial"));
    assert!(csv.contains("# config | [weight]"));
    let rows = data_rows(&csv);
    assert_eq!(rows[0], ["0.0000000000000000e0", "1.0000000000000000e0", "0.0000000000000000e0"]);
    // 17 significant digits
    assert!(rows.iter().all(|r| r[1].split('e').next().unwrap().trim_start_matches('-').len() == 18));
}

#[test]
fn custom_operator_file() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "grad2.txt", "# gradient in the plane\nn = 2\ndim_v = 1\ndim_w = 2\nA1 = 1 0\nA2 = 0 1\n");
    write(tmp.path(), "w.toml", "[operator]\nfile = \"grad2.txt\"\n[kernel]\ns = 0.3\nbudget = 2\n");
    let out = nonlocal(tmp.path(), &["kernel-check", "--config", "w.toml", "--out", "o"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("kernels coincide"), "{}", stdout(&out));
}

#[test]
fn failed_witness_exits_one() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "w.toml", "[kernel]\ns = 0.51\nmode = [1]\nvector = [1.0]\n");
    let out = nonlocal(tmp.path(), &["witness", "--config", "w.toml", "--out", "o"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("FAIL witness: not a kernel witness"));
    let out = nonlocal(tmp.path(), &["witness", "--out", "o"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn measure_subcommands() {
    let tmp = TempDir::new().unwrap();
    let out = nonlocal(tmp.path(), &["area", "--out", "o"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let csv = std::fs::read_to_string(tmp.path().join("o/area.csv")).unwrap();
    let gap: f64 = data_rows(&csv)[0][2].parse().unwrap();
    assert!((gap - (3.0 - (1.04f64).sqrt() - 1.8)).abs() < 1e-10);
    write(tmp.path(), "a.toml", "[area]\nscenario = \"dirac-spherical\"\n");
    assert_eq!(nonlocal(tmp.path(), &["area", "--config", "a.toml", "--out", "o"]).status.code(), Some(0));
    let out = nonlocal(tmp.path(), &["atomic-demo", "--out", "o"]);
    assert_eq!(out.status.code(), Some(0));
    let out = nonlocal(tmp.path(), &["gauss-green", "--out", "o"]);
    assert_eq!(out.status.code(), Some(0));
    write(tmp.path(), "probe.toml", "[atomic]\ns = 1.0\nprobes = [[0.0, 0.0]]\n");
    assert_eq!(nonlocal(tmp.path(), &["atomic-demo", "--config", "probe.toml"]).status.code(), Some(2));
}

#[test]
fn bessel_tables() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(nonlocal(tmp.path(), &["bessel", "--out", "o"]).status.code(), Some(0));
    let out = nonlocal(tmp.path(), &["zeros", "--out", "o"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(tmp.path().join("o/zeros.csv")).unwrap();
    let first: f64 = data_rows(&csv)[0][1].parse().unwrap();
    // J_{1/2} vanishes at multiples of pi
    assert!((first - std::f64::consts::PI).abs() < 1e-10);
}
