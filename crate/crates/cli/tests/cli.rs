use std::process::{Command, Output};

use serde_json::Value;

fn igk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_igk"))
        .args(args)
        .env_remove("IGK_TOL_PROFILE")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = igk(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let value: Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    validate(&value);
    value
}

fn validate(value: &Value) {
    let text = igk_cli::schema::for_command(value.get("command").and_then(Value::as_str)).expect("known report");
    let schema: Value = serde_json::from_str(text).expect("schema parses");
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(value).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

fn numbers(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn densities(report: &Value) -> Vec<f64> {
    report["points"][0]["density"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["p"].as_f64().unwrap())
        .collect()
}

fn probabilities(report: &Value) -> Vec<f64> {
    report["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["probability"].as_f64().unwrap())
        .collect()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
}

#[test]
fn binomial_family_show() {
    let r = json(&["family", "show", "--family", "binomial:2", "--theta", "0"]);
    assert!(close(&densities(&r), &[0.25, 0.5, 0.25], 1e-15));
    assert_eq!(r["dim"], 1);
    assert!(close(&numbers(&r["points"][0]["eta"]), &[1.0], 1e-15));
}

#[test]
fn categorical_family_show_is_uniform() {
    let r = json(&["family", "show", "--family", "categorical:3", "--theta", "0,0"]);
    let third = 1.0 / 3.0;
    assert!(close(&densities(&r), &[third; 3], 1e-15));
}

#[test]
fn several_points_and_real_line_families() {
    let r = json(&[
        "family", "show", "--family", "normal", "--theta", "0,-0.5", "--theta", "1,-0.5",
    ]);
    assert_eq!(r["points"].as_array().unwrap().len(), 2);
    assert_eq!(r["sample_space"]["kind"], "real_line");
    assert!(close(&numbers(&r["points"][1]["eta"]), &[1.0, 2.0], 1e-10));
}

#[test]
fn family_from_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("coin.json");
    std::fs::write(
        &path,
        r#"{"name": "coin", "kind": "finite", "n": 1, "points": [0, 1], "C": "0", "F": ["x"], "psi": "ln(1 + exp(theta1))"}"#,
    )
    .unwrap();
    let r = json(&["family", "show", "--spec", path.to_str().unwrap(), "--theta", "0"]);
    assert_eq!(r["family"], "coin");
    assert!(close(&densities(&r), &[0.5, 0.5], 1e-15));
    let r = json(&["geometry", "show", "--spec", path.to_str().unwrap(), "--theta", "0"]);
    assert!((r["points"][0]["metric"][0][0].as_f64().unwrap() - 0.25).abs() < 1e-7);
}

#[test]
fn bad_expression_in_spec_reports_its_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("coin.json");
    std::fs::write(
        &path,
        r#"{"kind": "finite", "n": 1, "points": [0, 1], "C": "0", "F": ["x"], "psi": "ln(1 + * exp(theta1))"}"#,
    )
    .unwrap();
    let out = igk(&["family", "show", "--spec", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("column") && stderr.contains("psi"), "{stderr}");
}

#[test]
fn malformed_spec_is_a_positioned_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"name\": \"x\", oops}").unwrap();
    let out = igk(&["family", "show", "--spec", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("column"), "{stderr}");
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["family", "show", "--family", "nope:3"][..],
        &["family", "show"],
        &["family", "show", "--family", "binomial:2", "--theta", "0,1"],
        &["family", "show", "--family", "binomial:2", "--theta", "abc"],
        &["spin", "table", "--n", "2", "--axis", "0,0,0", "--point", "0,0,1"],
        &["spin", "table", "--n", "0", "--axis", "0,0,1", "--point", "0,0,1"],
        &[
            "spin", "table", "--n", "2", "--axis", "0,0,1", "--axis2", "0,1,0", "--m1", "3",
        ],
        &["verify", "--suite", "nonsense"],
        &["bogus"],
    ] {
        let out = igk(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn spin_table_two_device_examples() {
    let half = std::f64::consts::FRAC_PI_2;
    let axis2 = format!("{},{},0", half.cos(), half.sin());
    let r = json(&["spin", "table", "--n", "1", "--axis", "1,0,0", "--axis2", &axis2]);
    assert!(close(&probabilities(&r), &[0.5, 0.5], 1e-12));

    let third = std::f64::consts::FRAC_PI_3;
    let axis2 = format!("{},{},0", third.cos(), third.sin());
    let r = json(&["spin", "table", "--n", "2", "--axis", "1,0,0", "--axis2", &axis2]);
    assert!(close(&probabilities(&r), &[1.0 / 16.0, 6.0 / 16.0, 9.0 / 16.0], 1e-12));
    assert_eq!(r["m1"], 2);
    assert_eq!(r["mode"], "two_device");
}

#[test]
fn spin_table_state_mode() {
    let r = json(&["spin", "table", "--n", "3", "--axis", "0,0,2", "--point", "0,0,1"]);
    assert!(close(&probabilities(&r), &[0.0, 0.0, 0.0, 1.0], 1e-15));
    let lambdas: Vec<f64> = r["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["lambda"].as_f64().unwrap())
        .collect();
    assert!(close(&lambdas, &[-2.0, -2.0 / 3.0, 2.0 / 3.0, 2.0], 1e-12));
}

#[test]
fn spin_qmatrix_is_hermitian() {
    let r = json(&["spin", "qmatrix", "--n", "2", "--axis", "0.3,-1,0.5", "--u0", "1"]);
    let re: Vec<Vec<f64>> = r["re"].as_array().unwrap().iter().map(numbers).collect();
    let im: Vec<Vec<f64>> = r["im"].as_array().unwrap().iter().map(numbers).collect();
    for i in 0..3 {
        for j in 0..3 {
            assert!((re[i][j] - re[j][i]).abs() < 1e-15);
            assert!((im[i][j] + im[j][i]).abs() < 1e-15);
        }
    }
}

#[test]
fn geometry_show_is_flat_for_the_unit_normal() {
    let r = json(&[
        "geometry",
        "show",
        "--family",
        "normal_fixed_sigma",
        "--theta",
        "0.7",
        "--alpha",
        "0.5",
    ]);
    let p = &r["points"][0];
    assert!((p["metric"][0][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(p["christoffel"][0][0][0].as_f64().unwrap().abs() < 1e-9);
    assert!(p["curvature_max_abs"].as_f64().unwrap() < 1e-5);
}

#[test]
fn oscillator_show_reports_the_identity() {
    let r = json(&[
        "oscillator",
        "show",
        "--hbar",
        "0.5",
        "--point",
        "1,-1",
        "--point",
        "0,2",
        "--coeffs",
        "0,1,0,0",
    ]);
    for p in r["points"].as_array().unwrap() {
        assert!(p["residual"].as_f64().unwrap() < 1e-7);
        assert_eq!(p["law"]["kind"], "continuous");
    }
    let r = json(&["oscillator", "show", "--point", "1,1", "--coeffs", "0,0,0,1"]);
    assert!(r["points"][0].get("law").is_none());
}

#[test]
fn verify_spin_passes_and_reports_the_commutator() {
    let r = json(&["verify", "--suite", "spin", "--seed", "7"]);
    assert_eq!(r["pass"], true);
    let commutator = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["id"] == "spin.commutator")
        .expect("commutator check");
    assert!(commutator["residual"].as_f64().unwrap() < 1e-8);
    assert!(r["prng"].as_str().unwrap().contains("ChaCha8"));
}

#[test]
fn verify_is_byte_identical_across_runs() {
    for format in ["json", "csv"] {
        let a = igk(&["verify", "--suite", "all", "--seed", "1", "--format", format]);
        let b = igk(&["verify", "--suite", "all", "--seed", "1", "--format", format]);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn perturbed_q_fails_with_a_named_check() {
    let out = igk(&["verify", "--suite", "spin", "--seed", "7", "--perturb-q", "1e-3"]);
    assert_eq!(out.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    validate(&r);
    assert_eq!(r["pass"], false);
    let failed: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"spin.commutator"), "{failed:?}");
}

#[test]
fn tolerance_profile_from_environment_and_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_igk"))
        .args(["verify", "--suite", "geometry"])
        .env("IGK_TOL_PROFILE", "fd")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["profile"], "fd");

    let out = Command::new(env!("CARGO_BIN_EXE_igk"))
        .args(["verify", "--suite", "geometry", "--profile", "strict"])
        .env("IGK_TOL_PROFILE", "fd")
        .output()
        .unwrap();
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["profile"], "strict");

    let out = Command::new(env!("CARGO_BIN_EXE_igk"))
        .args(["verify", "--suite", "geometry"])
        .env("IGK_TOL_PROFILE", "loose")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_output_uses_seventeen_significant_digits() {
    let out = igk(&[
        "spin", "table", "--n", "2", "--axis", "0,0,1", "--point", "1,0,0", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,lambda,probability"));
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 3);
        for f in &fields[1..] {
            let mantissa = f.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{f}");
            assert!(f.parse::<f64>().is_ok());
        }
    }
}

#[test]
fn verify_csv_has_a_provenance_header() {
    let out = igk(&["verify", "--suite", "oscillator", "--seed", "5", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("# version=1 prng=ChaCha8Rng"), "{first}");
    assert!(first.contains("seed=5"));
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let args = ["family", "show", "--family", "binomial:3", "--theta", "0.2"];
    let stdout = igk(&args).stdout;
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let out = igk(&with_out);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
}

#[test]
fn every_builtin_family_report_matches_its_schema() {
    for name in igk_core::ExponentialFamilySpec::builtin_names() {
        json(&["family", "show", "--family", name]);
        json(&["geometry", "show", "--family", name]);
    }
}
