use std::path::Path;
use std::process::{Command, Output};

fn robinlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robinlab")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn ball_examples() {
    let dir = tempfile::tempdir().unwrap();
    let o = robinlab(&["ball", "--kappa", "0", "--dim", "2", "--radius", "1", "--alpha", "-1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "0.000000000000");

    let o = robinlab(&["ball", "--kappa", "0", "--dim", "2", "--radius", "1", "--alpha", "0"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 3.38996).abs() < 1e-5);

    let o = robinlab(&["ball", "--kappa", "0", "--dim", "2", "--radius", "1", "--alpha", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_flags_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(robinlab(&["ball", "--kappa", "zero"], dir.path()).status.code(), Some(2));
    assert_eq!(robinlab(&["verify", "--suite", "nope"], dir.path()).status.code(), Some(2));
    assert_eq!(robinlab(&["verify", "--suite", "hmono", "--config", "missing.cfg"], dir.path()).status.code(), Some(2));
    assert_eq!(robinlab(&["fem", "--mesh", "missing.mesh"], dir.path()).status.code(), Some(2));
    assert_eq!(robinlab(&["ball", "--kappa", "0", "--dim", "1", "--radius", "1", "--alpha", "0"], dir.path()).status.code(), Some(2));
    assert_eq!(robinlab(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn ball_json_record_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["ball", "--kappa", "-1", "--dim", "3", "--radius", "0.7", "--alpha", "-0.3", "--json", "a.json"];
    assert_eq!(robinlab(&args, dir.path()).status.code(), Some(0));
    let first = std::fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(robinlab(&args, dir.path()).status.code(), Some(0));
    assert_eq!(first, std::fs::read(dir.path().join("a.json")).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(v["inputs"]["dim"], 3);
    assert!(v["residual"].as_f64().unwrap().abs() < 1e-8);
    assert!(v["solver_stats"]["evaluations"].as_u64().unwrap() > 0);
}

#[test]
fn steklov_command() {
    let dir = tempfile::tempdir().unwrap();
    let o = robinlab(&["steklov", "--kappa", "-1", "--dim", "2", "--radius", "1", "--cross-check"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let vals: Vec<f64> = stdout(&o).lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(vals.len(), 2);
    assert!((vals[0] - 1.0 / 1f64.sinh()).abs() < 1e-10);
    assert!((vals[0] - vals[1]).abs() < 1e-8);
}

#[test]
fn verify_hmono_default_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = robinlab(&["verify", "--suite", "hmono", "--config", "default", "--json", "h.json"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 failed"));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("h.json")).unwrap()).unwrap();
    assert_eq!(v["suite"], "hmono");
    assert!(!v["checks"].as_array().unwrap().is_empty());
}

#[test]
fn verify_ball_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    for suite in ["prop21", "prop22", "compare"] {
        let o = robinlab(&["verify", "--suite", suite, "--config", "default"], dir.path());
        assert_eq!(o.status.code(), Some(0), "{suite}: {}", stdout(&o));
    }
}

#[test]
fn verify_domain_suites_from_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.cfg"),
        "# coarse meshes keep this quick\nfamily=perturbed\nkappa=-1\nradius=0.8\neps=0.15\nmode_k=2\nmesh_h=0.12\nalpha_min=-0.4\nalpha_max=0\nalpha_steps=2\n",
    )
    .unwrap();
    for suite in ["chain", "shapeopt"] {
        let o = robinlab(&["verify", "--suite", suite, "--config", "run.cfg"], dir.path());
        assert_eq!(o.status.code(), Some(0), "{suite}: {}", stdout(&o));
        assert!(stdout(&o).contains("2 passed"), "{}", stdout(&o));
    }
}

#[test]
fn sweep_rows_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(robinlab(&["sweep", "--config", "alpha_grid", "--out", "a.csv"], dir.path()).status.code(), Some(0));
    assert_eq!(robinlab(&["sweep", "--config", "alpha_grid", "--out", "b.csv"], dir.path()).status.code(), Some(0));
    let a = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read_to_string(dir.path().join("b.csv")).unwrap());
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "kappa,dim,radius,alpha,lambda1,lambda2,sigma1,source,residual");
    // two curvatures, one dimension, one radius, five alphas
    assert_eq!(lines.len(), 1 + 10);
    assert!(lines.iter().skip(1).all(|l| l.split(',').count() == 9 && l.contains(",radial,")));
}

#[test]
fn mesh_then_fem() {
    let dir = tempfile::tempdir().unwrap();
    let o = robinlab(&["mesh", "--shape", "disk", "--h", "0.04", "--out", "disk.mesh"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let o = robinlab(&["fem", "--mesh", "disk.mesh", "--alpha", "0", "--k", "2", "--json", "f.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let vals: Vec<f64> = stdout(&o).lines().map(|l| l.parse().unwrap()).collect();
    assert!(vals[0].abs() < 1e-9);
    assert!((vals[1] - 3.39).abs() < 5e-3);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("f.json")).unwrap()).unwrap();
    assert_eq!(v["problem"], "robin");
    assert_eq!(v["result"]["eigenvalues"].as_array().unwrap().len(), 2);
    let o = robinlab(&["fem", "--mesh", "disk.mesh", "--steklov", "--k", "1"], dir.path());
    let s: f64 = stdout(&o).trim().parse().unwrap();
    assert!((s - 1.0).abs() < 1e-3);
    let o = robinlab(&["fem", "--mesh", "disk.mesh", "--alpha", "0.5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
