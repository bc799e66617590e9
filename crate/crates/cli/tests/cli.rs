use std::fs;
use std::process::{Command, Output};

fn willmore(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_willmore"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn clifford_default_run_passes_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("clifford.obj");
    let csv = dir.path().join("residuals.csv");
    let o = willmore(&[
        "clifford",
        "--n",
        "128",
        "--ny",
        "32",
        "--out-mesh",
        obj.to_str().unwrap(),
        "--out-csv",
        csv.to_str().unwrap(),
    ]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.starts_with("W = 19.7392088021787"));
    assert!(text.contains("order check (N = 128 vs 256)"));
    assert!(text.trim_end().ends_with("PASS"));

    let obj = fs::read_to_string(obj).unwrap();
    let vertices = obj.lines().filter(|l| l.starts_with("v ")).count();
    let faces: Vec<&str> = obj.lines().filter(|l| l.starts_with("f ")).collect();
    assert_eq!(vertices, 128 * 32);
    assert_eq!(faces.len(), 128 * 32);
    for f in &faces {
        let idx: Vec<usize> = f[2..].split(' ').map(|s| s.parse().unwrap()).collect();
        assert_eq!(idx.len(), 4);
        assert!(idx.iter().all(|&i| (1..=vertices).contains(&i)));
    }

    let csv = fs::read_to_string(csv).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "x,p,u,quartic_residual,el_residual,schrodinger_residual"
    );
    assert_eq!(lines.count(), 128);
}

#[test]
fn tight_tolerances_fail_with_code_two() {
    let o = willmore(&["clifford", "--n", "64", "--tol-scale", "1e-12"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).trim_end().ends_with("FAIL"));
}

#[test]
fn unwritable_output_is_an_io_failure() {
    let o = willmore(&[
        "clifford",
        "--n",
        "64",
        "--out-csv",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn zero_datum_gives_a_zero_series() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("zero.csv");
    let o = willmore(&[
        "flow",
        "--initial",
        "zero",
        "--n",
        "32",
        "--t-final",
        "0.001",
        "--out-csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(csv).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "t,W,closure_integral,dirac_residual"
    );
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[1], "0");
    }
}

#[test]
fn coarse_step_is_an_instability() {
    let o = willmore(&["flow", "--n", "64", "--dt", "0.05", "--t-final", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("instability") && err.contains("suggested dt"));
}

#[test]
fn flow_reads_a_csv_datum() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.csv");
    let mut text = String::from("x,v\n");
    for j in 0..32 {
        let x = 2.0 * std::f64::consts::PI * j as f64 / 32.0;
        text.push_str(&format!("{x},{}\n", 0.5 * x.sin()));
    }
    fs::write(&path, text).unwrap();
    let o = willmore(&[
        "flow",
        "--initial",
        path.to_str().unwrap(),
        "--t-final",
        "0.01",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("N = 32"));
}

#[test]
fn revolve_reports_obstruction_and_energy() {
    let o = willmore(&["revolve", "--alpha", "-0.03125", "--n", "256"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.contains("monodromy: elliptic"));
    assert!(text.contains("verdict: no torus (delta0 > 0)"));

    let o = willmore(&["revolve", "--alpha", "1", "--n", "256"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.contains("W > 2pi^2: ok"));
    assert!(text.contains("elliptic closed form"));
}

#[test]
fn revolve_without_oscillation_is_a_clean_error() {
    let o = willmore(&["revolve", "--alpha", "-0.5"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("no positive bump"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn bound_scan_reports_root_and_endpoint() {
    let o = willmore(&["bound-scan", "--alpha-count", "5", "--n", "256"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.contains("root of 2E = F: k^2 = 0.826114"));
    assert!(text.contains("f(1) = 1\n"));
    assert!(text.contains("verdict: W > 2pi^2 for all 5 scanned alpha"));
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "alpha-count = 3\nn = 128\n").unwrap();
    let o = willmore(&[
        "bound-scan",
        "--config",
        cfg.to_str().unwrap(),
        "--alpha-count",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("for all 2 scanned alpha"));

    fs::write(&cfg, "colour = blue\n").unwrap();
    let o = willmore(&["bound-scan", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mesh_command_exports_both_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let torus = dir.path().join("torus.obj");
    let o = willmore(&[
        "mesh",
        "--n",
        "32",
        "--ny",
        "16",
        "--out-mesh",
        torus.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = fs::read_to_string(torus).unwrap();
    assert_eq!(
        text.lines().filter(|l| l.starts_with("v ")).count(),
        32 * 16
    );
    assert_eq!(
        text.lines().filter(|l| l.starts_with("f ")).count(),
        32 * 16
    );

    let patch = dir.path().join("minimal.obj");
    let o = willmore(&[
        "mesh",
        "--fixture",
        "minimal",
        "--n",
        "9",
        "--ny",
        "5",
        "--out-mesh",
        patch.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = fs::read_to_string(patch).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 8 * 4);
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(willmore(&["bogus"]).status.code(), Some(2));
    assert_eq!(willmore(&["clifford", "--n", "15"]).status.code(), Some(2));
    assert_eq!(willmore(&["revolve"]).status.code(), Some(2));
    let o = willmore(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("bound-scan"));
}
