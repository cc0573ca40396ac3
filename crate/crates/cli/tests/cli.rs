use std::path::Path;
use std::process::{Command, Output};

fn groenewold(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_groenewold")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_spec(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn gaussian_spectrum_csv() {
    let o = groenewold(&["spectrum", "--family", "gaussian", "--s", "1", "--n-max", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "n,eigenvalue,method\n0,1,closed_form\n1,0,closed_form\n2,0,closed_form\n");

    let o = groenewold(&["spectrum", "--family", "gaussian", "--s", "3", "--n-max", "2"]);
    assert_eq!(stdout(&o), "n,eigenvalue,method\n0,0.5,closed_form\n1,0.25,closed_form\n2,0.125,closed_form\n");

    let o = groenewold(&["spectrum", "--family", "gaussian", "--beta", "1", "--gamma", "0.5", "--n-max", "1"]);
    assert_eq!(stdout(&o), "n,eigenvalue,method\n0,1.33333333333,closed_form\n1,-0.444444444444,closed_form\n");
}

#[test]
fn uniform_spectrum_csv() {
    let o = groenewold(&["spectrum", "--family", "uniform", "--s", "2", "--n-max", "0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "n,eigenvalue,method\n0,0.864664716763,quadrature\n");
}

#[test]
fn spectrum_json_has_bounds() {
    let o = groenewold(&["spectrum", "--family", "gaussian", "--s", "0.5", "--n-max", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["method"], "closed_form");
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 4);
    assert!(v["min_bound"].as_f64().unwrap() < 0.0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(groenewold(&["spectrum", "--s", "1"]).status.code(), Some(2));
    assert_eq!(groenewold(&["spectrum", "--family", "gaussian", "--s", "-1"]).status.code(), Some(2));
    assert_eq!(groenewold(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(groenewold(&["verify", "--only", "bogus"]).status.code(), Some(2));
    assert_eq!(groenewold(&["--help"]).status.code(), Some(0));
}

#[test]
fn sweep_is_deterministic_across_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.csv");
    let base = ["sweep", "--family", "uniform", "--s-min", "0.5", "--s-max", "5", "--steps", "6", "--n-max", "200"];
    let serial = groenewold(&base);
    assert!(serial.status.success());
    let mut args = base.to_vec();
    args.extend(["--jobs", "4", "--out", out.to_str().unwrap()]);
    assert!(groenewold(&args).status.success());
    assert_eq!(std::fs::read(&out).unwrap(), serial.stdout);

    let text = stdout(&serial);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("uncertainty_over_hbar,min_bound,max_bound,family"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 6);
    assert!(rows[0].starts_with("0.125,"));
    assert!(rows.iter().all(|r| r.ends_with(",uniform")));
}

#[test]
fn quantize_gaussian_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "g.json", r#"{"type":"gaussian","beta":2,"gamma":1}"#);
    let o = groenewold(&["quantize", "--density-spec", &spec, "--n-max", "5"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["dim"], 6);
    assert_eq!(v["s"], 2.0);
    let eig: Vec<f64> = serde_json::from_value(v["eigenvalues"].clone()).unwrap();
    assert!((eig[0] - 2.0 / 3.0).abs() < 1e-12);
    assert!(eig.windows(2).all(|w| w[0] >= w[1]));

    let pure = write_spec(dir.path(), "p.json", r#"{"type":"gaussian","beta":1,"gamma":1}"#);
    let o = groenewold(&["quantize", "--density-spec", &pure, "--n-max", "8"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let entries: Vec<f64> = serde_json::from_value(v["entries"].clone()).unwrap();
    for n in 0..9 {
        let want = if n == 0 { 1.0 } else { 0.0 };
        assert!((entries[n * 9 + n] - want).abs() < 1e-10);
    }
}

#[test]
fn gaussian_sweep_crosses_at_half() {
    let o = groenewold(&["sweep", "--family", "gaussian", "--s-min", "0.5", "--s-max", "1.5", "--steps", "3"]);
    assert_eq!(
        stdout(&o),
        "uncertainty_over_hbar,min_bound,max_bound,family\n\
         0.25,-0.444444444444,1.33333333333,gaussian\n\
         0.5,0,1,gaussian\n\
         0.75,0,0.8,gaussian\n"
    );
}

#[test]
fn quantize_square_has_negative_eigenvalue() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "b.json", r#"{"type":"uniform_box","q_half_width":1,"p_half_width":1}"#);
    let o = groenewold(&["quantize", "--density-spec", &spec]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["s"].is_null());
    let eig: Vec<f64> = serde_json::from_value(v["eigenvalues"].clone()).unwrap();
    assert_eq!(eig.len(), 17);
    assert!(*eig.last().unwrap() < -1e-4);
}

#[test]
fn misnormalised_spec_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "bad.json", r#"{"type":"gaussian","beta":1,"gamma":1,"scale":1.2}"#);
    assert_eq!(groenewold(&["quantize", "--density-spec", &spec]).status.code(), Some(4));
    let broken = write_spec(dir.path(), "broken.json", "{");
    assert_eq!(groenewold(&["quantize", "--density-spec", &broken]).status.code(), Some(2));
}

#[test]
fn verify_passes_and_filters() {
    let o = groenewold(&["verify", "--only", "kernel"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.contains(" PASS ")).count(), 4);
    assert!(text.lines().all(|l| !l.starts_with("special")));
}

#[test]
fn verify_catches_sign_mutation() {
    let clean = groenewold(&["verify", "--only", "quantizer,spectra"]);
    assert!(clean.status.success());
    let mutated = groenewold(&["verify", "--only", "quantizer,spectra", "--mutate", "displacement-sign"]);
    assert_eq!(mutated.status.code(), Some(1));
    assert!(stdout(&mutated).contains("FAIL"));
}
