use std::path::Path;
use std::process::{Command, Output};

fn covsep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covsep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn reproduce_paper_defaults() {
    let o = covsep(&["reproduce-paper"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    for needle in [
        "E[XY]",
        "E[X]E[Y]",
        "Schmidt coefficients",
        "QuantumSeparation",
        "uncorrelated-dependent",
        "result: PASS",
    ] {
        assert!(text.contains(needle), "missing {needle}:\n{text}");
    }
}

#[test]
fn reproduce_paper_json() {
    let o = covsep(&["reproduce-paper", "--output", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["bell_counterexample"]["verdict"], "QuantumSeparation");
    assert!(
        v["bell_counterexample"]["quantum_cov"]
            .as_f64()
            .unwrap()
            .abs()
            <= 1e-12
    );
    assert_eq!(v["three_value"]["classification"], "uncorrelated-dependent");
    assert!(o.stderr.is_empty());
}

#[test]
fn altered_counterexample_exits_one() {
    use covsep::cli::{cmd_reproduce_paper, Command as Cmd, RunConfig, EXIT_FAILURE};
    use covsep::Observable2;
    let q = Observable2::from_real([[3.0, 1.0], [1.0, 1.0]]).unwrap();
    // off-diagonal of R swapped onto the diagonal
    let r = Observable2::from_real([[1.0, 3.0], [3.0, 1.0]]).unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cmd_reproduce_paper(
        &RunConfig::new(Cmd::ReproducePaper),
        &q,
        &r,
        &mut out,
        &mut err,
    )
    .unwrap();
    assert_eq!(code, EXIT_FAILURE);
    let err = String::from_utf8(err).unwrap();
    assert!(err.contains("quantum covariance"), "{err}");
}

#[test]
fn verify_theorem1_runs_and_is_reproducible() {
    let o = covsep(&["verify-theorem1", "--trials", "1"]);
    assert_eq!(code(&o), 0);
    let a = covsep(&[
        "verify-theorem1",
        "--trials",
        "5000",
        "--seed",
        "9",
        "--output",
        "json",
    ]);
    let b = covsep(&[
        "verify-theorem1",
        "--trials",
        "5000",
        "--seed",
        "9",
        "--output",
        "json",
    ]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["failure_count"], 0);
    assert_eq!(v["trials"], 5000);
}

#[test]
fn analyze_classifies_files() {
    let dir = tempfile::tempdir().unwrap();
    let three = write(
        dir.path(),
        "three.json",
        &serde_json::to_string(&covsep::classical::three_value_counterexample()).unwrap(),
    );
    let product = write(
        dir.path(),
        "product.json",
        r#"{"x_values":[0,1,2],"y_values":[-1,1],"probs":[[0.125,0.125],[0.25,0.25],[0.125,0.125]]}"#,
    );
    let correlated = write(
        dir.path(),
        "corr.json",
        r#"{"x_values":[1,-1],"y_values":[1,-1],"probs":[[0.5,0],[0,0.5]]}"#,
    );
    // zero covariance on a two-valued pair: classified independent, never uncorrelated-dependent
    let binary_zero = write(
        dir.path(),
        "binary.json",
        r#"{"x_values":[2,7],"y_values":[-3,0.5],"probs":[[0.12,0.18],[0.28,0.42]]}"#,
    );
    for (path, want) in [
        (&three, "uncorrelated-dependent"),
        (&product, "independent"),
        (&correlated, "correlated"),
        (&binary_zero, "independent"),
    ] {
        let o = covsep(&["analyze", path, "--output", "json"]);
        assert_eq!(code(&o), 0, "{path}");
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["classification"], want, "{path}");
    }
    let o = covsep(&["analyze", &binary_zero]);
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .contains("forces independence"));
}

#[test]
fn analyze_input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let malformed = write(dir.path(), "bad.json", "{not json");
    let unnormalized = write(
        dir.path(),
        "sum.json",
        r#"{"x_values":[0,1],"y_values":[0,1],"probs":[[0.5,0.5],[0.5,0.5]]}"#,
    );
    let o = covsep(&["analyze", &malformed]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
    let o = covsep(&["analyze", &unnormalized]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8(o.stderr).unwrap().contains("sum to 1"));
    let o = covsep(&["analyze", "/nonexistent/table.json"]);
    assert_eq!(code(&o), 2);
    let o = covsep(&["analyze"]);
    assert_eq!(code(&o), 2);
    let o = covsep(&["verify-theorem1", "--trials", "0"]);
    assert_eq!(code(&o), 2);
    let o = covsep(&["verify-theorem1", "--tol", "-1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn search_emits_json_lines() {
    let o = covsep(&[
        "search", "--trials", "10", "--seed", "3", "--output", "json",
    ]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 10);
    for line in lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["separable"], false);
        assert_eq!(v["verdict"], "QuantumSeparation");
    }
    let again = covsep(&[
        "search", "--trials", "10", "--seed", "3", "--output", "json",
    ]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn sample_defaults_and_small_runs() {
    let o = covsep(&["sample", "--trials", "1"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .contains("insufficient"));

    let dir = tempfile::tempdir().unwrap();
    let product = write(
        dir.path(),
        "product.json",
        r#"{"x_values":[0,1],"y_values":[0,3],"probs":[[0.06,0.24],[0.14,0.56]]}"#,
    );
    let o = covsep(&[
        "sample", &product, "--trials", "1000000", "--seed", "5", "--output", "json",
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["check"]["within_5_sigma"], true);
    let again = covsep(&[
        "sample", &product, "--trials", "1000000", "--seed", "5", "--output", "json",
    ]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn help_goes_to_stdout() {
    let o = covsep(&["--help"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for cmd in [
        "reproduce-paper",
        "verify-theorem1",
        "analyze",
        "search",
        "sample",
    ] {
        assert!(text.contains(cmd));
    }
}
