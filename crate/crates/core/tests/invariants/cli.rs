use eigensteer::cli::{run, EXIT_FAILURE, EXIT_IO, EXIT_OK, EXIT_USAGE};

fn call(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut full = vec!["eigensteer"];
    full.extend_from_slice(args);
    let code = run(full, &mut out);
    (code, String::from_utf8(out).unwrap())
}

#[test]
fn gallery_lists_four_problems() {
    let (code, text) = call(&["gallery"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("id,"));
    assert_eq!(lines.len(), 5);
}

#[test]
fn constants_json_keys() {
    let (code, text) = call(&["constants", "--problem", "dirichlet-x2", "--T", "0.5"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["Gamma0", "RT", "logRT", "T1", "Tf", "GammaJ", "M", "D"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["T"].as_f64().unwrap(), 0.5);
}

#[test]
fn steer_succeeds_and_is_deterministic() {
    let args = [
        "steer",
        "--problem",
        "dirichlet-x2",
        "--j",
        "1",
        "--u0",
        "eigen+eps:2:1e-3",
        "--T",
        "1",
    ];
    let (code, first) = call(&args);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert!(v["final_error"].as_f64().unwrap() <= 1e-8);
    let (_, second) = call(&args);
    assert_eq!(first, second);
}

#[test]
fn steer_writes_report_and_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let traj = dir.path().join("t.csv");
    let (code, _) = call(&[
        "steer",
        "--u0",
        "eigen+eps:2:1e-3",
        "--report",
        report.to_str().unwrap(),
        "--traj",
        traj.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["problem"], "dirichlet-x2");
    let header = std::fs::read_to_string(traj)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string();
    assert!(header.starts_with("t,") && header.ends_with(",deviation,p"), "{header}");
}

#[test]
fn simulate_csv_shape() {
    let (code, text) = call(&[
        "simulate",
        "--nsim",
        "3",
        "--p0",
        "1",
        "--samples",
        "4",
        "--u0",
        "1,0,0",
    ]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,u_1,u_2,u_3,norm,p");
    assert_eq!(lines.len(), 6);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 6));
}

#[test]
fn cost_table_rows() {
    let (code, text) = call(&["cost", "--nctrl", "4", "--tgrid", "0.1,1"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "T,empirical_cost,bound,log_bound,condition");
    assert_eq!(lines.len(), 3);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "problem = neumann-x2\nT = 0.3\n").unwrap();
    let (code, text) = call(&["constants", "--config", path.to_str().unwrap(), "--T", "0.7"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["problem"], "neumann-x2");
    assert_eq!(v["T"].as_f64().unwrap(), 0.7);
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["steer", "--bogus"]).0, EXIT_USAGE);
    assert_eq!(call(&["steer", "--T", "-1"]).0, EXIT_USAGE);
    assert_eq!(call(&[]).0, EXIT_USAGE);
    assert_eq!(call(&["steer", "--config", "/nonexistent/run.cfg"]).0, EXIT_IO);
    let (code, text) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("steer"));
    assert_eq!(call(&["--version"]).0, EXIT_OK);
}

#[test]
fn verify_single_problem_and_gallery() {
    let (code, text) = call(&["verify", "--problem", "dirichlet-x2"]);
    assert_eq!(code, EXIT_OK, "{text}");
    assert!(text.lines().last().unwrap().ends_with("0 failed"));
    // The claimed variable-coefficient gap fails at k = 1.
    let (code, text) = call(&["verify"]);
    assert_eq!(code, EXIT_FAILURE);
    let failures: Vec<&str> = text.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(failures.len(), 1, "{failures:?}");
    assert!(failures[0].contains("varcoeff-x"));
}
