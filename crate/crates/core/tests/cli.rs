//! End-to-end tests of the `theta-gauss` binary.

use std::path::PathBuf;
use std::process::Command;
use std::sync::OnceLock;

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn validator() -> &'static jsonschema::Validator {
    static V: OnceLock<jsonschema::Validator> = OnceLock::new();
    V.get_or_init(|| {
        let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/result.schema.json");
        let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        jsonschema::validator_for(&schema).unwrap()
    })
}

struct Run {
    code: i32,
    stdout: String,
    json: Value,
}

fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_theta-gauss"))
        .args(args)
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let json: Value = serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("{e}: {stdout}"));
    let errors: Vec<String> = validator()
        .iter_errors(&json)
        .map(|e| e.to_string())
        .collect();
    assert!(
        errors.is_empty(),
        "schema violations {errors:?} in {stdout}"
    );
    Run {
        code: out.status.code().unwrap(),
        stdout,
        json,
    }
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

fn pair(v: &Value) -> (f64, f64) {
    (num(&v[0]), num(&v[1]))
}

#[test]
fn standard_fit_from_flags() {
    let r = run(&["fit", "--mu", "[0]", "--sigma", "[[1]]"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json["command"], "fit");
    assert!((num(&r.json["result"]["B"][0][0]) - 0.159_154_9).abs() < 1e-6);
    assert!(num(&r.json["result"]["u"][0]).abs() < 1e-9);
    assert!(r.json["diagnostics"]["iterations"].as_u64().is_some());
}

#[test]
fn fit_from_sample_data() {
    let r = run(&["fit", "--params", &fixture("sample_data.json")]);
    assert_eq!(r.code, 0);
    assert!((num(&r.json["result"]["u"][0]) - 0.023).abs() < 5e-4);
    assert!((num(&r.json["result"]["B"][0][0]) - 0.0587).abs() < 5e-4);
    assert_eq!(r.json["result"]["target"]["sample_size"], 10);
}

#[test]
fn divisor_point_is_a_numerical_failure() {
    let r = run(&["pmf", "--params", &fixture("divisor_point.json")]);
    assert_eq!(r.code, 3);
    assert_eq!(r.json["error"], "DivisorHit");
}

#[test]
fn non_symmetric_b_is_rejected() {
    let r = run(&["theta", "--params", &fixture("not_symmetric.json")]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json["field"], "B");
    assert!(r.json["message"].as_str().unwrap().contains("symmetric"));
}

#[test]
fn unknown_keys_are_rejected() {
    let r = run(&["theta", "--params", &fixture("unknown_key.json")]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json["field"], "sigma2");
}

#[test]
fn missing_fields_are_input_errors() {
    let r = run(&["theta"]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json["field"], "B");
    let r = run(&["fit", "--mu", "[0]"]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json["field"], "sigma");
    let r = run(&["fit", "--mu", "[0", "--sigma", "[[1]]"]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json["field"], "mu");
    let r = run(&["pmf", "--params", &fixture("real_g2.json")]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json["field"], "points");
    let r = run(&["fit", "--mu", "[0, 0]", "--sigma", "[[1, 2], [2, 1]]"]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json["field"], "sigma");
}

#[test]
fn bad_flags_are_input_errors() {
    let r = run(&["theta", "--params", &fixture("unit.json"), "--tol", "1e-16"]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json["error"], "ToleranceTooTight");
    let r = run(&["sample", "--params", &fixture("complex_g1.json")]);
    assert_eq!(r.code, 2);
    let r = run(&["map", "--params", &fixture("unit.json"), "--d", "0"]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json["field"], "d");
    let r = run(&["frobnicate"]);
    assert_eq!(r.code, 2);
}

#[test]
fn sample_echoes_seed_and_is_deterministic() {
    let args = [
        "sample",
        "--count",
        "1000",
        "--seed",
        "42",
        "--params",
        &fixture("real_g2.json"),
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.code, 0);
    assert_eq!(a.json["inputs_echo"]["seed"], 42);
    assert_eq!(a.json["result"]["samples"].as_array().unwrap().len(), 1000);
    assert_eq!(a.stdout, b.stdout);
    let other = run(&[
        "sample",
        "--count",
        "1000",
        "--seed",
        "43",
        "--params",
        &fixture("real_g2.json"),
    ]);
    assert_ne!(a.json["result"]["samples"], other.json["result"]["samples"]);
}

#[test]
fn every_command_is_deterministic() {
    let unit = fixture("unit.json");
    let g2 = fixture("real_g2.json");
    let cplx = fixture("complex_g1.json");
    let kummer = fixture("kummer.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["theta", "--params", &unit],
        vec!["pmf", "--params", &unit],
        vec!["moments", "--params", &g2, "--d", "3"],
        vec!["entropy", "--params", &cplx],
        vec!["map", "--params", &cplx, "--d", "3"],
        vec!["cubic", "--params", &cplx],
        vec!["kummer", "--params", &kummer],
        vec!["probe", "--params", &kummer, "--trials", "20"],
    ];
    for args in cases {
        let a = run(&args);
        assert_eq!(a.code, 0, "{args:?}: {}", a.stdout);
        assert_eq!(a.stdout, run(&args).stdout, "{args:?}");
    }
}

#[test]
fn floats_round_trip_at_seventeen_digits() {
    let r = run(&["theta", "--params", &fixture("unit.json"), "--tol", "1e-14"]);
    let text = r.stdout.clone();
    assert!(text.contains("\"theta\":[1.08643481121330"), "{text}");
    // Every float is written as d.dddddddddddddddde<exp>, which parses back
    // to the identical double.
    let theta = num(&r.json["result"]["theta"][0]);
    let written = format!("{theta:.16e}");
    assert!(text.contains(&written));
    assert_eq!(written.parse::<f64>().unwrap().to_bits(), theta.to_bits());
    assert!((theta - 1.086_434_811_213_308).abs() < 1e-14);
}

#[test]
fn pmf_values() {
    let r = run(&["pmf", "--params", &fixture("unit.json")]);
    let pmf = &r.json["result"]["pmf"];
    let (p0, i0) = pair(&pmf[0]);
    assert!((p0 - 1.0 / 1.086_434_811_213_308).abs() < 1e-14);
    assert_eq!(i0, 0.0);
    let expected = (-std::f64::consts::PI).exp() / 1.086_434_811_213_308;
    assert!((pair(&pmf[1]).0 - expected).abs() < 1e-15);
}

/// Reference covariance of the genus-three fixture from an independent
/// brute-force sum over the box `|n_i| <= 14`.
const FERMAT_COV: [[(f64, f64); 3]; 3] = [
    [
        (0.083_298_459_642_215_24, 0.0),
        (0.0, 0.0),
        (-0.151_712_966_899_360_04, 0.0),
    ],
    [
        (0.0, 0.0),
        (0.159_154_943_091_895_3, -0.144_270_990_706_824_7),
        (0.159_154_943_091_895_4, -0.144_270_990_706_824_95),
    ],
    [
        (-0.151_712_966_899_360_04, 0.0),
        (0.159_154_943_091_895_4, -0.144_270_990_706_824_95),
        (0.462_580_876_890_615_2, -0.144_270_990_706_824_6),
    ],
];

#[test]
fn genus_three_theta_and_moments() {
    let params = fixture("fermat.json");
    let t = run(&["theta", "--params", &params]);
    assert_eq!(t.code, 0);
    let (re, im) = pair(&t.json["result"]["theta"]);
    assert!((re - 1.301_664_944_288_461_6).abs() < 1e-12);
    assert!((im + 0.539_167_273_589_899_9).abs() < 1e-12);

    let m = run(&["moments", "--params", &params]);
    assert_eq!(m.code, 0);
    let mean = &m.json["result"]["mean"];
    let cov = &m.json["result"]["covariance"];
    for i in 0..3 {
        let (re, im) = pair(&mean[i]);
        assert!(re.hypot(im) < 1e-8);
        for j in 0..3 {
            let (re, im) = pair(&cov[i][j]);
            let (er, ei) = FERMAT_COV[i][j];
            assert!((re - er).hypot(im - ei) < 1e-10, "({i},{j})");
        }
    }
}

#[test]
fn output_flag_writes_the_document() {
    let dir = std::env::temp_dir().join(format!("theta-gauss-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.json");
    let status = Command::new(env!("CARGO_BIN_EXE_theta-gauss"))
        .args([
            "entropy",
            "--params",
            &fixture("unit.json"),
            "--output",
            path.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(validator().is_valid(&doc));
    assert_eq!(doc["command"], "entropy");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_reports_every_check() {
    let r = run(&["verify"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let checks = r.json["result"]["checks"].as_array().unwrap();
    assert!(checks.len() >= 12);
    assert!(checks.iter().all(|c| c["passed"] == true));
    for prefix in [
        "theta.",
        "distribution.",
        "fitting.",
        "sampler.",
        "geometry.",
    ] {
        assert!(
            checks
                .iter()
                .any(|c| c["name"].as_str().unwrap().starts_with(prefix)),
            "{prefix}"
        );
    }
}

#[test]
fn cubic_reports_residuals_only_with_u() {
    let with_u = run(&["cubic", "--params", &fixture("complex_g1.json")]);
    let r = &with_u.json["result"]["residuals"];
    for key in ["r_cubic", "r_quartic", "r_det"] {
        assert!(num(&r[key]) < 1e-8, "{key}");
    }
    let no_u = run(&["cubic", "--params", &fixture("kummer.json")]);
    assert_eq!(no_u.code, 2);
    let dir = std::env::temp_dir().join(format!("theta-gauss-cubic-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("b.json");
    std::fs::write(&path, r#"{"B": [[[1, 0]]]}"#).unwrap();
    let b_only = run(&["cubic", "--params", path.to_str().unwrap()]);
    assert_eq!(b_only.code, 0);
    assert!(b_only.json["result"].get("residuals").is_none());
    let (e1, _) = pair(&b_only.json["result"]["e1"]);
    assert!((e1 - std::f64::consts::PI).abs() < 1e-9);
    std::fs::remove_dir_all(&dir).unwrap();
}
