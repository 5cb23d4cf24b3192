use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn jwdiscord(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jwdiscord"))
        .args(args)
        .current_dir(dir)
        .env_remove("JWDISCORD_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn meta(path: &Path) -> Value {
    let mut name = path.file_name().unwrap().to_os_string();
    name.push(".meta.json");
    serde_json::from_str(&std::fs::read_to_string(path.with_file_name(name)).unwrap()).unwrap()
}

#[test]
fn spectrum_of_three_sites() {
    let dir = tempfile::tempdir().unwrap();
    ok(&jwdiscord(&["spectrum", "--n", "3", "--output", "s.csv"], dir.path()));
    let text = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let lines = data_lines(&text);
    assert_eq!(lines[0], "k,wavenumber,energy");
    let e: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for (got, want) in e.iter().zip([r, 0.0, -r]) {
        assert!((got - want).abs() < 1e-11);
    }
}

#[test]
fn discord_matrix_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    ok(&jwdiscord(&["discord-matrix", "--n", "17", "--j0", "9", "--b", "0", "--output", "q.csv"], dir.path()));
    let path = dir.path().join("q.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    let mut head = text.lines();
    assert!(head.next().unwrap().starts_with("# jwdiscord "));
    assert!(head.next().unwrap().starts_with("# config_sha256 "));
    assert_eq!(head.next().unwrap(), "# seed 1");
    let lines = data_lines(&text);
    assert_eq!(lines[0], "n,m,Q");
    assert_eq!(lines.len(), 1 + 17 * 17);
    for l in &lines[1..] {
        let f: Vec<&str> = l.split(',').collect();
        let (n, m, q): (usize, usize, f64) = (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap());
        if n != m && n % 2 == 1 && m % 2 == 1 {
            assert!((q - 9.11052189158e-3).abs() < 1e-13, "{l}");
        } else {
            assert!(q.abs() < 1e-10, "{l}");
        }
    }
    let m = meta(&path);
    assert_eq!(m["config"]["j0"], 9);
    assert_eq!(m["header"]["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(m["results"]["cluster"].as_array().unwrap().len(), 9);
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep-noise", "--n", "11", "--j0", "6", "--eps", "0,0.2", "--n-real", "3", "--seed", "4"];
    for name in ["a.csv", "b.csv"] {
        let mut a = args.to_vec();
        a.extend(["--output", name]);
        ok(&jwdiscord(&a, dir.path()));
    }
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    let lines = data_lines(&text);
    assert_eq!(lines[0], "epsilon,order,cl_max,cl_min,z_max,z_min,n_realizations");
    assert_eq!(lines.len(), 1 + 2 * 2);
    assert!(lines[1].starts_with("0.00000000000e0,1,"));
    assert!(lines[4].starts_with("2.00000000000e-1,2,"));
    assert!(lines[4].ends_with(",3"));
}

#[test]
fn sweep_b_reports_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f1b.csv");
    ok(&jwdiscord(
        &["sweep-b", "--n", "17", "--j0", "9", "--b-max", "0.96", "--points", "97", "--output", "f1b.csv"],
        dir.path(),
    ));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines = data_lines(&text);
    assert_eq!(lines[0], "b,cl_max,cl_min,z_max,z_min");
    assert_eq!(lines.len(), 1 + 97);
    let b_cl = meta(&out)["results"]["b_cl"].as_f64().unwrap();
    assert!((b_cl - 0.533).abs() < 0.005, "b_cl = {b_cl}");
}

#[test]
fn flags_beat_config_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.cfg"), "# test\nn = 9\nseed = 5\nformat = json\n").unwrap();
    ok(&jwdiscord(&["spectrum", "--config", "run.cfg", "--n", "4", "--output", "s.json"], dir.path()));
    let out = dir.path().join("s.json");
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["header"]["seed"], 5);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 4);
    assert_eq!(meta(&out)["config"]["n"], 4);
}

#[test]
fn default_output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_jwdiscord"))
        .args(["spectrum", "--n", "5"])
        .current_dir(dir.path())
        .env("JWDISCORD_OUTPUT_DIR", "results")
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("results/spectrum.csv").exists());
    assert!(dir.path().join("results/spectrum.csv.meta.json").exists());
}

#[test]
fn errors_are_one_json_line_and_leave_nothing() {
    let dir = tempfile::tempdir().unwrap();
    for (args, kind, code) in [
        (vec!["sweep-b", "--n", "17", "--output", "x.csv"], "config", 2),
        (vec!["discord-matrix", "--n", "17", "--j0", "17", "--output", "x.csv"], "computation", 1),
        (vec!["verify", "--n", "13", "--output", "x.csv"], "computation", 1),
    ] {
        let out = jwdiscord(&args, dir.path());
        assert_eq!(out.status.code(), Some(code), "{args:?}");
        let stderr = String::from_utf8(out.stderr).unwrap();
        assert_eq!(stderr.trim_end().lines().count(), 1, "{stderr}");
        let v: Value = serde_json::from_str(stderr.trim()).unwrap();
        assert_eq!(v["error"], kind);
        assert!(!v["message"].as_str().unwrap().is_empty());
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn verify_passes_on_small_chain() {
    let dir = tempfile::tempdir().unwrap();
    let out = jwdiscord(&["verify", "--n", "4", "--output", "v.csv"], dir.path());
    ok(&out);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().count() > 10);
    assert!(stdout.lines().all(|l| l.starts_with("PASS ")));
    assert_eq!(meta(&dir.path().join("v.csv"))["results"]["failed"], 0);
}
