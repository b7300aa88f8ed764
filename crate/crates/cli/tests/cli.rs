use std::path::Path;
use std::process::{Command, Output};

fn hstn(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hstn"))
        .args(args)
        .current_dir(dir)
        .env_remove("HSTN_WORKERS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn single_point_exact_only_writes_header_and_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("one.csv");
    let o = hstn(
        &["--snr", "30:30:1", "--schemes", "MPC", "--modes", "fully3d", "--analytic-only", "--out", out.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(
        lines[0],
        "snr_db,scheme,mode,op_exact,op_asymptotic,op_sim,sim_stderr,n_trials,hit_mass,gamma_th1,gamma_th2"
    );
    assert!(lines[1].starts_with("30,MPC,fully3d,"));
}

#[test]
fn full_grid_has_216_rows_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = hstn(&["--analytic-only", "--asymptotic", "--out", "grid.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    assert_eq!(text.lines().count(), 217);
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("diversity UC"), "{stderr}");
    assert!(stderr.contains("ordering exact MPC/fully3d <= NC/fully3d: ok"), "{stderr}");
}

#[test]
fn same_seed_gives_identical_bytes_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--snr", "10:30:10", "--trials", "5000", "--seed", "9"];
    let mut outputs = Vec::new();
    for (name, workers) in [("a.csv", "1"), ("b.csv", "1"), ("c.csv", "8")] {
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--out", name]);
        let o = Command::new(env!("CARGO_BIN_EXE_hstn"))
            .args(&full)
            .current_dir(dir.path())
            .env("HSTN_WORKERS", workers)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(std::fs::read(dir.path().join(name)).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn validation_failures_exit_3_with_key() {
    let dir = tempfile::tempdir().unwrap();
    for (text, key) in [
        ("[satellite]\nm_su = 2.5\n", "satellite.m_su"),
        ("[fleet]\nH = 120\nR = 100\n", "fleet.H"),
        ("[fleet]\nheigth = 80\n", "heigth"),
    ] {
        let cfg = write(dir.path(), "bad.toml", text);
        let o = hstn(&["--config", &cfg, "--analytic-only"], dir.path());
        assert_eq!(o.status.code(), Some(3));
        let stderr = String::from_utf8_lossy(&o.stderr);
        assert!(stderr.contains(key), "{stderr}");
    }
    let o = hstn(&["--snr", "0:10"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let o = hstn(&["--schemes", "XYZ"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let o = hstn(&["--no-such-flag"], dir.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn missing_config_file_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = hstn(&["--config", "absent.toml"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unwritable_output_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = hstn(&["--analytic-only", "--snr", "0:0:1", "--out", "no/such/dir/x.csv"], dir.path());
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn dumped_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "in.toml", "[cache]\nlambda = 0.7\n[sim]\nseed = 4\n");
    let first = hstn(&["--config", &cfg, "--dump-config"], dir.path());
    assert_eq!(first.status.code(), Some(0));
    let dumped = write(dir.path(), "dumped.toml", &String::from_utf8(first.stdout.clone()).unwrap());
    let second = hstn(&["--config", &dumped, "--dump-config"], dir.path());
    assert_eq!(first.stdout, second.stdout);
    assert!(String::from_utf8_lossy(&first.stdout).contains("lambda = 0.7"));
}
