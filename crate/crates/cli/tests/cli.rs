use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lizkit::radon::SinogramGrid;
use lizkit::solver::{mnorm_of_model, Model};
use tempfile::TempDir;

fn lizkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lizkit")).args(args).env_remove("LIZKIT_SEED").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn error_kind(out: &Output) -> String {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().last().unwrap_or_default();
    let v: serde_json::Value = serde_json::from_str(line).unwrap_or_else(|_| panic!("not JSON: {stderr}"));
    v["error"].as_str().unwrap().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn periodic_data(dir: &TempDir) -> PathBuf {
    let path = dir.path().join("d.csv");
    let mut text = String::from("t,y\n");
    for i in 0..12 {
        let t = (i as f64 + 0.3) / 12.0;
        let y = (2.0 * std::f64::consts::PI * t).sin() + 0.2 * (6.0 * std::f64::consts::PI * t).cos();
        text.push_str(&format!("{t},{y}\n"));
    }
    std::fs::write(&path, text).unwrap();
    path
}

fn ridge_data(dir: &TempDir) -> PathBuf {
    let path = dir.path().join("r.csv");
    let mut text = String::from("x0,x1,y\n");
    for i in 0..9 {
        let (a, b) = ((i % 3) as f64 - 1.0, (i / 3) as f64 - 1.0 + 0.1 * i as f64);
        text.push_str(&format!("{a},{b},{}\n", (a - 0.5 * b).abs() + 0.2 * b));
    }
    std::fs::write(&path, text).unwrap();
    path
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn read_model(path: &Path) -> Model {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn fit_writes_model_diagnostics_and_residuals() {
    let dir = TempDir::new().unwrap();
    let data = periodic_data(&dir);
    let out = dir.path().join("m.json");
    let run = lizkit(&["fit", "--family", "periodic", "--alpha", "2", "--period", "1", "--lambda", "1e-3", "--data", s(&data), "--out", s(&out)]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let model = read_model(&out);
    assert_eq!(model.family_name(), "periodic");
    assert!(model.n_atoms() <= 11);
    let (header, rows) = read_csv(&dir.path().join("m.diagnostics.csv"));
    assert_eq!(header, ["iter", "lambda", "objective", "gap", "n_atoms", "certificate"]);
    assert!(rows.last().unwrap()[3] < 1e-5);
    let (header, rows) = read_csv(&dir.path().join("m.residuals.csv"));
    assert_eq!(header, ["t", "y", "fitted", "residual"]);
    assert_eq!(rows.len(), 12);
}

#[test]
fn missing_data_is_input_not_found() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m.json");
    let missing = dir.path().join("nope.csv");
    let run = lizkit(&["fit", "--family", "periodic", "--alpha", "2", "--lambda", "1e-3", "--data", s(&missing), "--out", s(&out)]);
    assert_eq!(code(&run), 1);
    assert_eq!(error_kind(&run), "InputNotFound");
    assert!(!out.exists());
}

#[test]
fn usage_errors_exit_one_with_json() {
    let run = lizkit(&["fit", "--no-such-flag"]);
    assert_eq!(code(&run), 1);
    assert_eq!(error_kind(&run), "UsageError");
    let dir = TempDir::new().unwrap();
    let data = periodic_data(&dir);
    let run = lizkit(&["fit", "--family", "periodic", "--lambda", "1e-3", "--data", s(&data), "--out", s(&dir.path().join("m.json"))]);
    assert_eq!(code(&run), 1);
    assert_eq!(error_kind(&run), "UsageError");
}

#[test]
fn lambda_ladder_gives_nondecreasing_mnorm() {
    let dir = TempDir::new().unwrap();
    let data = periodic_data(&dir);
    let out = dir.path().join("ladder.json");
    let run = lizkit(&["fit", "--family", "periodic", "--alpha", "2", "--lambda", "1e-1,1e-2,1e-3", "--data", s(&data), "--out", s(&out)]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let norms: Vec<f64> = (0..3)
        .map(|i| mnorm_of_model(&read_model(&dir.path().join(format!("ladder.lambda{i}.json")))).unwrap())
        .collect();
    assert!(norms.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9)), "{norms:?}");
    assert!(dir.path().join("ladder.lambda2.diagnostics.csv").exists());
}

#[test]
fn offset_only_model_evaluates_to_a_constant() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("c.json");
    std::fs::write(&model, r#"{"family":"periodic","params":{"alpha":2.0,"period":1.0,"truncation":64},"offset":0.75,"atoms":[]}"#).unwrap();
    let out = dir.path().join("f.csv");
    let run = lizkit(&["eval", "--model", s(&model), "--grid", "0:0.9:10", "--out", s(&out)]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["t", "f"]);
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r[1] == 0.75));
}

#[test]
fn eval_at_training_points_reproduces_fitted_values() {
    let dir = TempDir::new().unwrap();
    let data = ridge_data(&dir);
    let out = dir.path().join("ridge.json");
    let run = lizkit(&["fit", "--family", "ridge", "--m", "2", "--polynomial", "--lambda", "1e-2", "--data", s(&data), "--out", s(&out)]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let values = dir.path().join("values.csv");
    let run = lizkit(&["eval", "--model", s(&out), "--points", s(&data), "--out", s(&values)]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let (_, evaluated) = read_csv(&values);
    let (_, residuals) = read_csv(&dir.path().join("ridge.residuals.csv"));
    for (e, r) in evaluated.iter().zip(&residuals) {
        assert!((e[2] - r[3]).abs() <= 1e-12 * r[3].abs().max(1.0), "{e:?} {r:?}");
        assert!((r[2] - e[2] - r[4]).abs() <= 1e-12 * r[2].abs().max(1.0));
    }
}

#[test]
fn ridge_model_grows_at_most_linearly() {
    let dir = TempDir::new().unwrap();
    let data = ridge_data(&dir);
    let out = dir.path().join("ridge.json");
    let run = lizkit(&["fit", "--family", "ridge", "--m", "2", "--lambda", "1e-2", "--data", s(&data), "--out", s(&out)]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let pts = dir.path().join("far.csv");
    let mut text = String::from("x0,x1\n");
    for r in [10.0, 100.0, 1e3, 1e4] {
        for j in 0..16 {
            let a = 0.2 + j as f64 * std::f64::consts::TAU / 16.0;
            text.push_str(&format!("{},{}\n", r * a.cos(), r * a.sin()));
        }
    }
    std::fs::write(&pts, text).unwrap();
    let values = dir.path().join("far_values.csv");
    assert_eq!(code(&lizkit(&["eval", "--model", s(&out), "--points", s(&pts), "--out", s(&values)])), 0);
    let (_, rows) = read_csv(&values);
    let ratio: Vec<f64> = rows.iter().map(|r| r[2].abs() / (1.0 + r[0].hypot(r[1]))).collect();
    let c = ratio[..32].iter().fold(0.0f64, |m, v| m.max(*v));
    assert!(ratio[32..].iter().all(|v| *v <= 1.5 * c), "C = {c}, {ratio:?}");
}

#[test]
fn family_conflict_is_schema_mismatch() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("c.json");
    std::fs::write(&model, r#"{"family":"periodic","params":{"alpha":2.0,"period":1.0,"truncation":64},"offset":0.0,"atoms":[[1.0,0.5]]}"#).unwrap();
    let run = lizkit(&["eval", "--model", s(&model), "--family", "ridge", "--grid", "0:1:3"]);
    assert_eq!(code(&run), 1);
    assert_eq!(error_kind(&run), "SchemaMismatch");
    let run = lizkit(&["eval", "--model", s(&model), "--grid", "0:1:3", "--grid", "0:1:3"]);
    assert_eq!(error_kind(&run), "SchemaMismatch");
    std::fs::write(&model, r#"{"family":"periodic","params":{"alpha":2.0},"atoms":[]}"#).unwrap();
    let run = lizkit(&["eval", "--model", s(&model), "--grid", "0:1:3"]);
    assert_eq!(error_kind(&run), "SchemaMismatch");
}

#[test]
fn verify_only_runs_the_selected_group() {
    let run = lizkit(&["verify", "--only", "slice"]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8(run.stdout).unwrap();
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("check,measured,tolerance,pass"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.starts_with("slice.") && r.ends_with(",true")));
}

#[test]
fn tightened_tolerance_fails_with_the_measured_error() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("report.csv");
    let run = lizkit(&["verify", "--only", "isotropy", "--tolerance-scale", "1e-6", "--out", s(&report)]);
    assert_eq!(code(&run), 2);
    let text = std::fs::read_to_string(&report).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "isotropy.column_spread");
    let measured: f64 = row[1].parse().unwrap();
    let tolerance: f64 = row[2].parse().unwrap();
    assert!(measured > tolerance && measured > 0.0);
    assert_eq!(row[3], "false");
}

#[test]
fn unknown_check_group_is_a_usage_error() {
    let run = lizkit(&["verify", "--only", "nonsense"]);
    assert_eq!(code(&run), 1);
    assert_eq!(error_kind(&run), "UsageError");
}

#[test]
fn same_seed_gives_identical_outputs() {
    let dir = TempDir::new().unwrap();
    let data = ridge_data(&dir);
    let mut outputs = Vec::new();
    for name in ["a.json", "b.json"] {
        let out = dir.path().join(name);
        let run = Command::new(env!("CARGO_BIN_EXE_lizkit"))
            .args(["fit", "--family", "ridge", "--lambda", "1e-2", "--data", s(&data), "--out", s(&out)])
            .env("LIZKIT_SEED", "42")
            .output()
            .unwrap();
        assert_eq!(code(&run), 0);
        let stem = name.trim_end_matches(".json");
        outputs.push(
            [format!("{stem}.json"), format!("{stem}.diagnostics.csv"), format!("{stem}.residuals.csv")]
                .map(|f| std::fs::read(dir.path().join(f)).unwrap()),
        );
    }
    assert_eq!(outputs[0], outputs[1]);
    let run = Command::new(env!("CARGO_BIN_EXE_lizkit"))
        .args(["fit", "--family", "ridge", "--lambda", "1e-2", "--data", s(&data), "--out", s(&dir.path().join("c.json"))])
        .env("LIZKIT_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(code(&run), 1);
    assert_eq!(error_kind(&run), "UsageError");
}

#[test]
fn radon_check_reports_and_dumps_the_sinogram() {
    let dir = TempDir::new().unwrap();
    let sino = dir.path().join("g.bin");
    let run = lizkit(&["radon-check", "--side", "64", "--spacing", "0.2", "--directions", "30", "--dump-sinogram", s(&sino)]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert!(stdout.contains("radon.slice,") && stdout.contains("radon.inversion,"));
    let g = SinogramGrid::read(&sino).unwrap();
    assert_eq!(g.spec().n_dir, 30);
    assert!(g.max_abs() > 2.0);
}

#[test]
fn growth_check_emits_the_ratio_table() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("growth.csv");
    let run = lizkit(&["growth-check", "--alpha", "3.5", "--d", "2", "--k", "1,1", "--out", s(&out)]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["norm_x", "ratio", "bound_C"]);
    assert_eq!(rows.len(), 21 * 8);
    assert!(rows.iter().all(|r| r[1] <= r[2]));
    let run = lizkit(&["growth-check", "--alpha", "3.5", "--d", "2", "--k", "1"]);
    assert_eq!(code(&run), 1);
}

#[test]
fn interpolation_mode_fits_the_data() {
    let dir = TempDir::new().unwrap();
    let data = periodic_data(&dir);
    let out = dir.path().join("i.json");
    let run = lizkit(&["fit", "--family", "periodic", "--alpha", "2", "--interpolate", "--data", s(&data), "--out", s(&out)]);
    assert_ne!(code(&run), 1, "{}", String::from_utf8_lossy(&run.stderr));
    let (_, rows) = read_csv(&dir.path().join("i.residuals.csv"));
    assert!(rows.iter().all(|r| r[3].abs() <= 1e-8));
}
