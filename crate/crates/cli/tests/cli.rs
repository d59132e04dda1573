use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn probverif() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_probverif"));
    cmd.env_remove("PROBVERIF_SEED").env_remove("RUST_LOG");
    cmd
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

/// Writes `f(x) = x_0 + bias` over a 2-D standard normal input.
fn affine_problem(dir: &Path, name: &str, bias: f64, eta: f64) -> PathBuf {
    let model = json!({"layers": [{"weights": [[1.0, 0.0]], "bias": [bias]}]});
    let model_name = format!("{name}.model.json");
    fs::write(dir.join(&model_name), model.to_string()).unwrap();
    let problem = json!({
        "model": model_name,
        "mean": [0.0, 0.0],
        "cov_diag": [1.0, 1.0],
        "eta": eta,
        "truncation_z": 3.0,
    });
    let path = dir.join(format!("{name}.json"));
    fs::write(&path, problem.to_string()).unwrap();
    path
}

/// Two-class classifier whose logits are `(x_0, -x_0)`.
fn classifier(dir: &Path) -> PathBuf {
    let model = json!({"layers": [
        {"weights": [[1.0, 0.0], [-1.0, 0.0]], "bias": [0.0, 0.0]},
        {"weights": [[1.0, -1.0], [-1.0, 1.0]], "bias": [0.0, 0.0]},
    ]});
    let path = dir.join("classifier.json");
    fs::write(&path, model.to_string()).unwrap();
    path
}

#[test]
fn affine_true_instance_exits_zero_without_splits() {
    let dir = TempDir::new().unwrap();
    let p = affine_problem(dir.path(), "easy", 5.0, 0.9);
    let out = run(probverif().arg("verify").arg(&p));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["verdict"], "TRUE");
    assert_eq!(report["splits"], 0);
    assert!(report["P_lower"].as_f64().unwrap() >= 0.9);
}

#[test]
fn affine_false_instance_exits_one() {
    let dir = TempDir::new().unwrap();
    let p = affine_problem(dir.path(), "hard", -5.0, 0.9);
    let out = run(probverif()
        .arg("verify")
        .arg(&p)
        .args(["--strategy", "babsr-prob"]));
    assert_eq!(code(&out), 1);
    let report = stdout_json(&out);
    assert_eq!(report["verdict"], "FALSE");
    assert!(report["P_upper"].as_f64().unwrap() < 0.9);
}

#[test]
fn report_fields_and_output_file() {
    let dir = TempDir::new().unwrap();
    let p = affine_problem(dir.path(), "easy", 5.0, 0.9);
    let saved = dir.path().join("report.json");
    let out = run(probverif()
        .arg("verify")
        .arg(&p)
        .arg("--output")
        .arg(&saved)
        .args(["--seed", "7"]));
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    for key in [
        "verdict",
        "P_lower",
        "P_upper",
        "confidence",
        "splits",
        "branches_final",
        "wall_time",
        "seed",
        "strategy",
        "eta",
        "delta",
        "n_samples",
    ] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    assert_eq!(report["seed"], 7);
    let from_file: Value = serde_json::from_str(&fs::read_to_string(&saved).unwrap()).unwrap();
    assert_eq!(from_file, report);
}

#[test]
fn seed_comes_from_environment() {
    let dir = TempDir::new().unwrap();
    let p = affine_problem(dir.path(), "easy", 5.0, 0.9);
    let out = run(probverif()
        .arg("verify")
        .arg(&p)
        .env("PROBVERIF_SEED", "42"));
    assert_eq!(stdout_json(&out)["seed"], 42);
}

#[test]
fn eta_override_flips_verdict() {
    let dir = TempDir::new().unwrap();
    // P = Phi(0.5) ~ 0.69.
    let p = affine_problem(dir.path(), "mid", 0.5, 0.5);
    assert_eq!(code(&run(probverif().arg("verify").arg(&p))), 0);
    assert_eq!(
        code(&run(probverif()
            .arg("verify")
            .arg(&p)
            .args(["--eta", "0.9"]))),
        1
    );
}

#[test]
fn bad_inputs_exit_three() {
    let dir = TempDir::new().unwrap();
    let junk = dir.path().join("junk.json");
    fs::write(&junk, "{ not json").unwrap();
    let out = run(probverif().arg("verify").arg(&junk));
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    assert_eq!(
        code(&run(probverif()
            .arg("verify")
            .arg(dir.path().join("missing.json")))),
        3
    );

    let p = affine_problem(dir.path(), "easy", 5.0, 0.9);
    assert_eq!(
        code(&run(probverif()
            .arg("verify")
            .arg(&p)
            .arg("--no-such-flag"))),
        3
    );
    assert_eq!(
        code(&run(probverif()
            .arg("verify")
            .arg(&p)
            .args(["--samples", "0"]))),
        3
    );
    assert_eq!(
        code(&run(probverif()
            .arg("verify")
            .arg(&p)
            .args(["--eta", "1.5"]))),
        3
    );
    assert_eq!(code(&run(probverif().arg("--help"))), 0);
}

#[test]
fn oracle_subcommand_reports_probability() {
    let dir = TempDir::new().unwrap();
    let p = affine_problem(dir.path(), "mid", 0.5, 0.5);
    let out = run(probverif()
        .arg("oracle")
        .arg(&p)
        .args(["--samples", "200000"]));
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    // Phi(0.5)
    let expected = 0.6914624612740131;
    let got = report["P"].as_f64().unwrap();
    assert!(
        (got - expected).abs() < 5.0 * report["std_error"].as_f64().unwrap(),
        "{got}"
    );
}

#[test]
fn make_problem_refuses_misclassified_center() {
    let dir = TempDir::new().unwrap();
    let model = classifier(dir.path());
    let out = run(probverif()
        .arg("make-problem")
        .arg("--model")
        .arg(&model)
        .args([
            "--x0=-1,0",
            "--target",
            "0",
            "--attack",
            "1",
            "--sigma",
            "0.1",
            "-o",
        ])
        .arg(dir.path().join("p.json")));
    assert_eq!(code(&out), 3);
    assert!(!dir.path().join("p.json").exists());
}

#[test]
fn make_problem_with_tiny_noise_verifies() {
    let dir = TempDir::new().unwrap();
    let model = classifier(dir.path());
    let problem = dir.path().join("p.json");
    let out = run(probverif()
        .arg("make-problem")
        .arg("--model")
        .arg(&model)
        .args([
            "--x0", "1,0", "--target", "0", "--attack", "1", "--sigma", "1e-6", "-o",
        ])
        .arg(&problem));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(probverif().arg("verify").arg(&problem));
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["verdict"], "TRUE");
}

#[test]
fn toy_corpus_is_loadable() {
    let dir = TempDir::new().unwrap();
    let out = run(probverif()
        .arg("toy-corpus")
        .arg("-o")
        .arg(dir.path())
        .args(["--count", "2"]));
    assert_eq!(code(&out), 0);
    let out = run(probverif()
        .arg("oracle")
        .arg(dir.path().join("toy_01.json"))
        .args(["--samples", "10000"]));
    assert!(matches!(code(&out), 0 | 1));
}

#[test]
fn bench_aggregates_match_rows() {
    let dir = TempDir::new().unwrap();
    let corpus = dir.path().join("corpus");
    fs::create_dir(&corpus).unwrap();
    affine_problem(&corpus, "a_true", 5.0, 0.9);
    affine_problem(&corpus, "b_false", -5.0, 0.9);
    let csv_path = dir.path().join("rows.csv");
    let json_path = dir.path().join("bench.json");
    let out = run(probverif()
        .arg("bench")
        .arg(&corpus)
        .arg("--csv")
        .arg(&csv_path)
        .arg("--json")
        .arg(&json_path));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let header = fs::read_to_string(&csv_path)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string();
    assert_eq!(
        header,
        "instance,strategy,verdict,P_lower,P_upper,confidence,splits,time_s"
    );

    let bench: Value = serde_json::from_str(&fs::read_to_string(&json_path).unwrap()).unwrap();
    let rows = bench["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    let summary = bench["summary"].as_array().unwrap();
    assert_eq!(summary.len(), 3);
    let rate = |name: &str| {
        summary.iter().find(|s| s["strategy"] == name).unwrap()["success_rate"]
            .as_f64()
            .unwrap()
    };
    for s in summary {
        let name = s["strategy"].as_str().unwrap();
        let mine: Vec<&Value> = rows.iter().filter(|r| r["strategy"] == name).collect();
        let decided = mine.iter().filter(|r| r["verdict"] != "TIMEOUT").count();
        assert_eq!(s["instances"], mine.len());
        assert_eq!(s["decided"], decided);
        assert_eq!(
            s["success_rate"].as_f64().unwrap(),
            decided as f64 / mine.len() as f64
        );
        let splits: f64 = mine.iter().map(|r| r["splits"].as_f64().unwrap()).sum();
        assert_eq!(
            s["avg_splits"].as_f64().unwrap(),
            splits / mine.len() as f64
        );
    }
    assert_eq!(rate("ordered"), 1.0);
    assert_eq!(rate("babsr-prob"), 1.0);
    assert!(rate("no-split") <= rate("ordered"));
    for r in rows {
        let expected = if r["instance"] == "a_true" {
            "TRUE"
        } else {
            "FALSE"
        };
        assert_eq!(r["verdict"], expected);
    }
}
