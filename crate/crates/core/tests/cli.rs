use std::process::{Command, Output};

fn radmhd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radmhd")).args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn run_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("smooth");
    let out = radmhd(&[
        "run",
        "--preset",
        "smooth-novac",
        "--override",
        "grid.n=64",
        "--override",
        "time.t_end=0.05",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["status"], "Completed");
    for key in ["t_final", "T_detected", "alpha_star", "T_bound", "C0", "E0", "C_envelope", "residuals"] {
        assert!(json.get(key).is_some(), "{key} missing");
    }
    for key in ["energy", "flux", "vacuum"] {
        assert!(json["residuals"].get(key).is_some(), "residuals.{key} missing");
    }
    let csv = std::fs::read_to_string(out_dir.join("run.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,energy,dissipation_cum,flux_vacuum,R_front,a_boundary,div_l2,div_lower_bound,moment_lhs,moment_rhs,max_gradu,dt"
    );
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 12);
    assert_eq!(first[0], "0.0");
    let saved: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("run.json")).unwrap()).unwrap();
    assert_eq!(saved, json);
}

#[test]
fn blowup_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = radmhd(&["run", "--preset", "disk-blowup", "--override", "grid.n=256", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["status"], "BlowupDetected");
    assert!(json["T_detected"].as_f64().unwrap() <= json["T_bound"].as_f64().unwrap());
}

#[test]
fn bounds_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cyl.cfg");
    std::fs::write(
        &cfg,
        "# reference inputs\ngeometry = \"cylinder3d\"\nphysics.mu = 1.0\nbounds.c0 = 1.0\nbounds.e0 = 1.0\nbounds.alpha = 1.5\n",
    )
    .unwrap();
    let out = radmhd(&["bounds", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    let t = json["T_bound"].as_f64().unwrap();
    assert!((t / (2.0 * 1_108.922_925_088_707_4) - 1.0).abs() < 1e-12, "{t}");
    assert_eq!(json["geometry"], "cylinder3d");
}

#[test]
fn bounds_from_sampled_data() {
    let out = radmhd(&["bounds", "--preset", "disk-blowup", "--override", "grid.n=256"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert!(json["C0"].as_f64().unwrap() > 0.0);
    assert!((json["alpha_star"].as_f64().unwrap() - 1.1108).abs() < 1e-3);
}

#[test]
fn mms_table() {
    let out = radmhd(&["mms", "--preset", "mms", "--n", "32,64", "--override", "time.t_end=0.05"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0]["order"].is_null());
    assert!(rows[1]["order"].as_array().unwrap().iter().all(|o| o.as_f64().unwrap() > 1.5));
}

#[test]
fn picard_subcommand() {
    let out = radmhd(&["picard", "--preset", "smooth-novac", "--override", "grid.n=64"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["report"]["converged"], true);
    assert!(json["contraction_ratio"].as_f64().unwrap() < 1.0);
}

#[test]
fn errors_exit_with_one() {
    let out = radmhd(&["run", "--preset", "nope"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    let out = radmhd(&["bounds", "--preset", "smooth-novac", "--override", "grid.n"]);
    assert_eq!(out.status.code(), Some(1));
    let out = radmhd(&["run"]);
    assert_eq!(out.status.code(), Some(1));
}
