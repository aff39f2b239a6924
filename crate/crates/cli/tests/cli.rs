use std::path::PathBuf;
use std::process::Command;

use heunc::Mutation;
use heunc_cli::{run, Runtime, EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED};
use serde_json::Value;

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Outcome {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("not JSON ({e}): {}", self.stdout))
    }
}

fn heunc_with(rt: &Runtime, args: &[&str]) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("heunc").chain(args.iter().copied()), rt, &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn heunc(args: &[&str]) -> Outcome {
    heunc_with(&Runtime::default(), args)
}

fn schema() -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas/output.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::draft202012::new(&schema).unwrap()
}

fn assert_valid(v: &Value) {
    let s = schema();
    let errors: Vec<String> = s.iter_errors(v).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "schema errors: {errors:?}");
}

fn cx(v: &Value) -> (f64, f64) {
    (v["re"].as_f64().unwrap(), v["im"].as_f64().unwrap())
}

const GENERIC: [&str; 10] = [
    "--alpha",
    "0.9+0.3i",
    "--beta",
    "0.4-0.2i",
    "--gamma",
    "-0.3+0.6i",
    "--delta",
    "-0.8+0.5i",
    "--eta",
    "0.6-0.1i",
];

fn with_generic<'a>(head: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    head.iter().chain(GENERIC.iter()).chain(tail.iter()).copied().collect()
}

#[test]
fn eval_trivial_equation_is_one() {
    let o = heunc(&[
        "eval", "--alpha", "0", "--beta", "0", "--gamma", "0", "--delta", "0", "--eta", "0", "--z", "0.5",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let v = o.json();
    assert_eq!(cx(&v["results"]["value"]), (1.0, 0.0));
    assert_valid(&v);
}

#[test]
fn eval_at_origin_is_normalised() {
    let o = heunc(&with_generic(&["eval"], &["--z", "0", "--deriv", "1"]));
    assert_eq!(o.code, EXIT_OK);
    let v = o.json();
    assert_eq!(cx(&v["results"]["value"]), (1.0, 0.0));
    assert_eq!(v["results"]["derivative"]["order"], 1);
    assert_valid(&v);
}

#[test]
fn eval_reports_small_ode_residual() {
    let o = heunc(&with_generic(&["eval"], &["--z", "0.4-0.2i", "--deriv", "3"]));
    let v = o.json();
    assert!(v["diagnostics"]["ode_residual"].as_f64().unwrap() < 1e-9);
    assert_valid(&v);
}

#[test]
fn eval_outside_disk_names_the_guard() {
    let o = heunc(&with_generic(&["eval"], &["--z", "1.2"]));
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.stderr.contains("OutOfDisk"), "{}", o.stderr);
    assert!(o.stdout.is_empty());
}

#[test]
fn max_terms_comes_from_flag_then_env_then_default() {
    let env = |v: &str| Runtime {
        max_terms_env: Some(v.to_owned()),
        ..Runtime::default()
    };
    let args = with_generic(&["eval"], &["--z", "0.9"]);
    assert_eq!(heunc(&args).json()["diagnostics"]["max_terms_source"], "default");

    let starved = heunc_with(&env("3"), &args);
    assert_eq!(starved.code, EXIT_USAGE);
    assert!(starved.stderr.contains("NoConvergence"), "{}", starved.stderr);

    let ok = heunc_with(&env("500"), &args);
    assert_eq!(ok.json()["inputs"]["max_terms"], 500);
    assert_eq!(ok.json()["diagnostics"]["max_terms_source"], "env");

    let flagged = heunc_with(&env("3"), &with_generic(&["eval"], &["--z", "0.9", "--max-terms", "400"]));
    assert_eq!(flagged.code, EXIT_OK);
    assert_eq!(flagged.json()["diagnostics"]["max_terms_source"], "flag");

    let bad = heunc_with(&env("lots"), &args);
    assert_eq!(bad.code, EXIT_USAGE);
    assert!(bad.stderr.contains("HEUNC_MAX_TERMS"));
}

#[test]
fn coeffs_order_zero_is_a_single_row() {
    let o = heunc(&with_generic(&["coeffs"], &["--order", "0", "--format", "csv"]));
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(o.stdout, "n,re,im\n0,1.0000000000000000e0,0.0000000000000000e0\n");
}

#[test]
fn coeffs_vanish_at_degree_zero_polynomial_point() {
    let o = heunc(&[
        "coeffs", "--alpha", "1", "--beta", "0", "--gamma", "0", "--delta", "-1", "--eta", "0.5", "--order", "3", "--format", "csv",
    ]);
    let rows: Vec<&str> = o.stdout.lines().collect();
    assert_eq!(rows.len(), 5);
    for row in &rows[2..] {
        let fields: Vec<f64> = row.split(',').skip(1).map(|x| x.parse().unwrap()).collect();
        assert_eq!(fields, [0.0, 0.0], "{row}");
    }
}

#[test]
fn coeffs_first_row_obeys_indicial_relation() {
    let o = heunc(&with_generic(&["coeffs"], &["--order", "2"]));
    let v = o.json();
    assert_valid(&v);
    // μ = ½(α − β − γ + αβ − βγ) − η, computed here by hand
    let (a, b, g, e) = (
        heunc::Complex64::new(0.9, 0.3),
        heunc::Complex64::new(0.4, -0.2),
        heunc::Complex64::new(-0.3, 0.6),
        heunc::Complex64::new(0.6, -0.1),
    );
    let mu = (a - b - g + a * b - b * g) * 0.5 - e;
    let expected = -mu / (b + 1.0);
    let row = &v["results"]["coefficients"][1];
    let got = heunc::Complex64::new(row["re"].as_f64().unwrap(), row["im"].as_f64().unwrap());
    assert!((got - expected).norm() < 1e-14);
}

#[test]
fn coeffs_rejects_negative_integer_beta() {
    let o = heunc(&[
        "coeffs", "--alpha", "1", "--beta", "-2", "--gamma", "0", "--delta", "0", "--eta", "0", "--order", "3",
    ]);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.stderr.contains("InvalidBeta"));
}

#[test]
fn poly_golden_spectrum() {
    let o = heunc(&["poly", "--alpha", "1", "--beta", "0", "--gamma", "0", "--N", "1"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let v = o.json();
    assert_valid(&v);
    let s5 = 5f64.sqrt();
    let roots: Vec<_> = v["results"]["roots"].as_array().unwrap().iter().map(cx).collect();
    assert!((roots[0].0 - (1.0 - s5) / 2.0).abs() < 1e-12 && roots[0].1.abs() < 1e-12);
    assert!((roots[1].0 - (1.0 + s5) / 2.0).abs() < 1e-12 && roots[1].1.abs() < 1e-12);
    let sols = v["results"]["solutions"].as_array().unwrap();
    assert!((cx(&sols[0]["coefficients"][1]).0 - (s5 - 1.0) / 2.0).abs() < 1e-12);
    assert!((cx(&sols[1]["coefficients"][1]).0 + (s5 + 1.0) / 2.0).abs() < 1e-12);
    assert_eq!(cx(&v["diagnostics"]["leading"]), (1.0, 0.0));
}

#[test]
fn poly_degree_zero_and_root_selection() {
    let v = heunc(&["poly", "--alpha", "1", "--beta", "0", "--gamma", "0", "--N", "0"]).json();
    assert_eq!(cx(&v["results"]["roots"][0]), (0.0, 0.0));
    assert_eq!(v["results"]["solutions"][0]["coefficients"].as_array().unwrap().len(), 1);

    let one = heunc(&["poly", "--alpha", "1", "--beta", "0", "--gamma", "0", "--N", "2", "--k", "2"]).json();
    assert_eq!(one["results"]["solutions"].as_array().unwrap().len(), 1);
    assert_eq!(one["results"]["solutions"][0]["k"], 2);
    assert_valid(&one);

    let csv = heunc(&["poly", "--alpha", "1", "--beta", "0", "--gamma", "0", "--N", "1", "--format", "csv"]);
    assert!(csv.stdout.starts_with("k,n,re,im\n"));
    assert_eq!(csv.stdout.lines().count(), 5);
}

#[test]
fn poly_domain_errors_exit_two() {
    let o = heunc(&["poly", "--alpha", "0", "--beta", "0", "--gamma", "0", "--N", "1"]);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.stderr.contains("AlphaZero"));
    let o = heunc(&["poly", "--alpha", "1", "--beta", "0", "--gamma", "0", "--N", "1", "--k", "3"]);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.stderr.contains("RootIndex"));
}

#[test]
fn verify_darboux_example() {
    let o = heunc(&[
        "verify",
        "--identity",
        "darboux",
        "--alpha",
        "1",
        "--beta",
        "0",
        "--gamma",
        "0",
        "--eta",
        "0",
        "--N",
        "0",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let v = o.json();
    assert_valid(&v);
    let r = &v["results"]["reports"][0];
    assert_eq!(r["passed"], true);
    let (re, im) = cx(&r["measured"]);
    assert!((re + 0.5).abs() < 1e-14 && im.abs() < 1e-14);
}

#[test]
fn verify_full_random_suite() {
    let o = heunc(&["verify", "--identity", "all", "--random", "20", "--seed", "42"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let v = o.json();
    assert_valid(&v);
    assert_eq!(v["results"]["total"], 140);
    assert_eq!(v["results"]["failed"], 0);
    let trials: Vec<u64> = v["results"]["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["trial"].as_u64().unwrap())
        .collect();
    assert!(trials.windows(2).all(|w| w[0] <= w[1]), "reports out of trial order");
}

#[test]
fn verify_every_identity_at_higher_order() {
    for id in [
        "basic",
        "four-term",
        "chain",
        "high-ode",
        "darboux",
        "selfadjoint",
        "swap",
        "eigen-shift",
    ] {
        let o = heunc(&["verify", "--identity", id, "--random", "3", "--seed", "7", "--n", "3", "--N", "3"]);
        assert_eq!(o.code, EXIT_OK, "{id}: {}", o.stderr);
        assert_valid(&o.json());
    }
}

#[test]
fn corrupted_constant_exits_one() {
    let rt = Runtime {
        mutation: Mutation::Perturb(1e-3),
        ..Runtime::default()
    };
    let o = heunc_with(&rt, &["verify", "--identity", "all", "--random", "4", "--seed", "42"]);
    assert_eq!(o.code, EXIT_VERIFY_FAILED);
    let v = o.json();
    assert_valid(&v);
    assert_eq!(v["results"]["passed"], 0);
    assert_eq!(v["diagnostics"]["mutated"], true);
}

#[test]
fn verify_usage_errors() {
    assert_eq!(heunc(&["verify", "--identity", "chain", "--alpha", "1"]).code, EXIT_USAGE);
    assert_eq!(heunc(&["verify", "--identity", "all", "--random", "0"]).code, EXIT_USAGE);
    assert_eq!(heunc(&["verify", "--identity", "nope", "--random", "1"]).code, EXIT_USAGE);
    assert_eq!(
        heunc(&["verify", "--identity", "chain", "--random", "1", "--n", "0"]).code,
        EXIT_USAGE
    );
    let both = heunc(&["verify", "--identity", "swap", "--random", "2", "--alpha", "1"]);
    assert_eq!(both.code, EXIT_USAGE);
}

#[test]
fn verify_csv_has_stable_header() {
    let o = heunc(&["verify", "--identity", "swap", "--random", "2", "--format", "csv"]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.starts_with("trial,identity,order,residual,tolerance,passed\n"));
    assert_eq!(o.stdout.lines().count(), 3);
}

#[test]
fn malformed_complex_values_are_usage_errors() {
    for bad in ["1 + 2i", "1+2", "two", "1+2j"] {
        let o = heunc(&[
            "eval", "--alpha", bad, "--beta", "0", "--gamma", "0", "--delta", "0", "--eta", "0", "--z", "0",
        ]);
        assert_eq!(o.code, EXIT_USAGE, "accepted {bad}");
    }
}

#[test]
fn help_and_version_succeed() {
    let o = heunc(&["--help"]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.contains("verify"));
    assert_eq!(heunc(&[]).code, EXIT_USAGE);
}

fn binary(args: &[&str], threads: &str) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_heunc"))
        .args(args)
        .env("RAYON_NUM_THREADS", threads)
        .env_remove("HEUNC_MAX_TERMS")
        .output()
        .unwrap();
    (out.status.code().unwrap(), out.stdout)
}

#[test]
fn binary_output_is_byte_stable_across_runs_and_workers() {
    let args = ["verify", "--identity", "all", "--random", "20", "--seed", "42"];
    let (code, first) = binary(&args, "1");
    assert_eq!(code, 0);
    for threads in ["1", "4", "8"] {
        let (code, again) = binary(&args, threads);
        assert_eq!(code, 0);
        assert_eq!(first, again, "output changed with {threads} workers");
    }
}

#[test]
fn binary_honours_env_and_exit_codes() {
    let out = Command::new(env!("CARGO_BIN_EXE_heunc"))
        .args(with_generic(&["eval"], &["--z", "0.9"]))
        .env("HEUNC_MAX_TERMS", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let (code, _) = binary(&["eval", "--z", "0"], "1");
    assert_eq!(code, 2);
}
