use std::path::Path;
use std::process::{Command, Output};

fn droplet(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_droplet"))
        .args(args)
        .env("DROPLET_OUT_DIR", out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn enumerate_counts_configurations() {
    let dir = tempfile::tempdir().unwrap();
    let o = droplet(&["enumerate", "--L", "3", "--n", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("configurations: 35"), "{text}");
    assert!(text.contains("sector k=1: 5"));
    let csv = std::fs::read_to_string(dir.path().join("sectors.csv")).unwrap();
    assert_eq!(csv, "k,size\n1,5\n2,20\n3,10\n");
}

#[test]
fn manifest_digests_cover_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = droplet(
        &["spectrum", "--L", "2", "--n", "2", "--realizations", "2"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = manifest(dir.path());
    let files = m["files"].as_array().unwrap();
    let names: Vec<&str> = files.iter().map(|f| f["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["spectrum.csv", "band_edges.csv"]);
    for f in files {
        let body = std::fs::read(dir.path().join(f["name"].as_str().unwrap())).unwrap();
        use sha2::Digest;
        assert_eq!(
            f["sha256"].as_str().unwrap(),
            hex::encode(sha2::Sha256::digest(&body))
        );
    }
    assert_eq!(m["command"], "spectrum");
    assert_eq!(m["plan"]["L"], 2);
    assert!(m["started"].as_str().is_some() && m["finished"].as_str().is_some());
}

#[test]
fn xxz_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = droplet(
        &[
            "xxz-check",
            "--L",
            "2",
            "--n",
            "2",
            "--g",
            "2",
            "--realizations",
            "5",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("xxz_check.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn ct_verify_rejects_inadmissible_energy() {
    let dir = tempfile::tempdir().unwrap();
    let o = droplet(
        &["ct-verify", "--g", "3", "--energy", "1", "--n", "3"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("4g - E > 12 e^mu_T"), "{}", stderr(&o));
}

#[test]
fn ct_verify_admissible_holds() {
    let dir = tempfile::tempdir().unwrap();
    let o = droplet(
        &[
            "ct-verify",
            "--g",
            "4",
            "--mu-T",
            "0.1",
            "--energy",
            "0",
            "--L",
            "3",
            "--n",
            "3",
            "--lambda",
            "5",
            "--realizations",
            "3",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("C_T = 0.7304738008"));
}

#[test]
fn bounds_report_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = droplet(
        &[
            "bounds-report",
            "--g",
            "4",
            "--L",
            "2",
            "--n",
            "3",
            "--window",
            "0,2",
            "--energy",
            "0",
            "--realizations",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("bounds_report.csv")).unwrap();
    for check in [
        "threshold",
        "block_norm",
        "semigroup",
        "dynamical",
        "perturbative",
        "resolvent_expansion",
    ] {
        assert!(csv.contains(check), "missing {check}");
    }
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        droplet(&["spectrum", "--bogus"], dir.path()).status.code(),
        Some(1)
    );
    assert_eq!(droplet(&["nonsense"], dir.path()).status.code(), Some(1));
    assert_eq!(
        droplet(&["enumerate", "--n", "0"], dir.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        droplet(&["spectrum", "--g", "0.5"], dir.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(droplet(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn config_file_and_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("plan.toml");
    std::fs::write(&cfg, "L = 3\nn = 3\n").unwrap();
    let o = droplet(
        &["enumerate", "--config", cfg.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("configurations: 35"));
    let o = droplet(
        &["enumerate", "--config", cfg.to_str().unwrap(), "--n", "2"],
        dir.path(),
    );
    assert!(stdout(&o).contains("configurations: 21"));
    std::fs::write(&cfg, "L = 3\nlamda = 2.0\n").unwrap();
    let o = droplet(
        &["enumerate", "--config", cfg.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("lamda"), "{}", stderr(&o));
}

#[test]
fn out_dir_flag_beats_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let o = droplet(
        &["enumerate", "--out-dir", flag_dir.path().to_str().unwrap()],
        env_dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(flag_dir.path().join("sectors.csv").exists());
    assert!(!env_dir.path().join("sectors.csv").exists());
}

#[test]
fn mc_run_reproducible_bodies() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = [
        "mc-run",
        "--g",
        "8",
        "--L",
        "3",
        "--n",
        "2",
        "--lambda",
        "1",
        "--window",
        "0,18.5",
        "--realizations",
        "6",
        "--seed",
        "77",
    ];
    for d in [&a, &b] {
        let o = droplet(&args, d.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for name in ["decay.csv", "mc_summary.csv", "lambda_sweep.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        assert_eq!(
            x,
            std::fs::read(b.path().join(name)).unwrap(),
            "{name} differs"
        );
    }
    assert_eq!(manifest(a.path())["digest"], manifest(b.path())["digest"]);
    let head = std::fs::read_to_string(a.path().join("decay.csv")).unwrap();
    assert!(head.starts_with("separation,mean,stderr,count\n"));
    let sweep = std::fs::read_to_string(a.path().join("lambda_sweep.csv")).unwrap();
    let lambdas: Vec<f64> = sweep
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(lambdas.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn mc_run_rejects_window_above_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let o = droplet(&["mc-run", "--g", "2", "--window", "0,5"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("E(g, mu_T)"));
}
