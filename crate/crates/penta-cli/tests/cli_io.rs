//! End-to-end tests of the `penta` binary: output formats, exit codes,
//! environment caps and byte-level determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn penta_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_penta"));
    cmd.args(args)
        .env_remove("PENTA_MAX_CHAIN")
        .env_remove("PENTA_MAX_PRECISION");
    for (key, value) in env {
        cmd.env(key, value);
    }
    cmd.output().expect("binary runs")
}

fn penta(args: &[&str]) -> Output {
    penta_env(args, &[])
}

fn stdout_of(args: &[&str]) -> String {
    let out = penta(args);
    assert!(
        out.status.success(),
        "`penta {}` failed: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 output")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// Conic x0*x2 - x1^2 as a term-record file in a per-test temp path.
fn write_conic(tag: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!(
        "penta_cli_conic_{}_{}.json",
        tag,
        std::process::id()
    ));
    std::fs::write(
        &path,
        r#"[{"exponents": [1, 0, 1], "coefficient": 1},
            {"exponents": [0, 2, 0], "coefficient": -1}]"#,
    )
    .expect("temp file");
    path
}

#[test]
fn nd_prints_published_integer_bounds() {
    let expected = [
        (3, "4"),
        (4, "9"),
        (5, "22"),
        (6, "160"),
        (7, "20376"),
        (8, "11914188890"),
        (9, "8616199237736295920955120"),
        (
            10,
            "192884152577980851363553858004926940342106493833715693762179",
        ),
    ];
    for (d, n) in expected {
        assert_eq!(stdout_of(&["nd", &d.to_string()]), format!("{n}\n"));
    }
}

#[test]
fn r_prints_published_section_dimensions() {
    let expected = [
        (3, "1"),
        (4, "2"),
        (5, "3"),
        (6, "6"),
        (7, "17"),
        (8, "120"),
        (9, "6479"),
        (10, "20707020"),
    ];
    for (d, r) in expected {
        assert_eq!(stdout_of(&["r", &d.to_string()]), format!("{r}\n"));
    }
}

#[test]
fn bound_json_reports_r_and_n() {
    let text = stdout_of(&["bound", "[2,3]", "--json"]);
    let value: serde_json::Value = serde_json::from_str(&text).expect("valid json");
    assert_eq!(value["multidegree"], "(2,3)");
    assert_eq!(value["r"], "2");
    assert_eq!(value["chain_length"], "4");
    assert_eq!(value["n"], "9");
    assert_eq!(value["n_exact"], "9");
}

#[test]
fn bound_csv_quotes_the_multidegree() {
    let text = stdout_of(&["bound", "2,3", "--csv"]);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "multidegree,r,chain_length,n_exact,n,n0_at_r"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("\"(2,3)\","), "row was {row:?}");
}

#[test]
fn mtable_csv_matches_published_cells() {
    let text = stdout_of(&["mtable", "--imax", "8", "--jmax", "3", "--csv"]);
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0], ["i", "j=0", "j=1", "j=2", "j=3"]);
    assert_eq!(rows[4], ["3", "1", "3", "4", "5"]);
    assert_eq!(rows[5], ["4", "3", "8", "13", "19"]);
    assert_eq!(rows[6], ["5", "11", "48", "127", "275"]);
    assert_eq!(rows[7], ["6", "103", "1106", "7051", "33955"]);
    assert_eq!(rows[8], ["7", "6359", "485280", "21029990", "654279500"]);
    assert_eq!(
        rows[9],
        [
            "8",
            "20700541",
            "88819638509",
            "214404499562520",
            "368104651084030885"
        ]
    );
}

#[test]
fn series_rows_start_with_the_known_coefficients() {
    let text = stdout_of(&["series", "--imax", "4", "--order", "7"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m = 1 0 1 1 3");
    assert_eq!(lines[4], "F_3 = 0 0 0 1 3 4 5 6");
    assert_eq!(lines[5], "F_4 = 0 0 0 0 3 8 13 19");
}

#[test]
fn decompose_reports_the_degree_five_basis_row() {
    let text = stdout_of(&["decompose", "--i", "5"]);
    assert_eq!(text, "i = 5\ncoefficients = 0 1 3 4 3 1\nsum = 12\n");
    let json = stdout_of(&["decompose", "--i", "5", "--json"]);
    let value: serde_json::Value = serde_json::from_str(&json).expect("valid json");
    assert_eq!(value["sum"], "12");
    assert_eq!(value["coefficients"][3], "4");
}

#[test]
fn verify_all_passes_and_is_byte_deterministic() {
    let first = penta(&["verify", "--all", "--json"]);
    assert_eq!(exit_code(&first), 0);
    let second = penta(&["verify", "--all", "--json"]);
    assert_eq!(first.stdout, second.stdout);
    let value: serde_json::Value = serde_json::from_slice(&first.stdout).expect("valid json");
    assert_eq!(value["overall"], "VERIFIED");
    let reports = value["reports"].as_array().expect("report list");
    assert!(
        reports.len() >= 7,
        "expected all checks, got {}",
        reports.len()
    );
    for report in reports {
        assert_eq!(report["status"], "VERIFIED", "failing: {report}");
    }
}

#[test]
fn verify_single_check_with_scope_emits_one_csv_row() {
    let text = stdout_of(&["verify", "--check", "bigger_r", "--scope", "3,3,5", "--csv"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "check_id,scope,status,precision_bits");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("bigger_r,"));
    assert!(lines[1].ends_with(",VERIFIED,0"));
}

#[test]
fn verify_rejects_malformed_scopes() {
    for args in [
        ["verify", "--check", "bigger_r", "--scope", "3"].as_slice(),
        ["verify", "--check", "stepwise_n", "--scope", "99"].as_slice(),
        ["verify", "--check", "nosuch"].as_slice(),
        ["verify", "--scope", "3"].as_slice(),
    ] {
        let out = penta(args);
        assert_eq!(exit_code(&out), 2, "args {args:?}");
    }
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        ["nd", "0"].as_slice(),
        ["nd"].as_slice(),
        ["nd", "6", "--json", "--csv"].as_slice(),
        ["bound", "[]"].as_slice(),
        ["bound", "x"].as_slice(),
        ["decompose", "--i", "9"].as_slice(),
        ["series", "--imax", "4", "--order", "4"].as_slice(),
        ["frobnicate"].as_slice(),
    ] {
        let out = penta(args);
        assert_eq!(exit_code(&out), 2, "args {args:?}");
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(exit_code(&penta(&["--help"])), 0);
    assert_eq!(exit_code(&penta(&["--version"])), 0);
    assert_eq!(exit_code(&penta(&["nd", "--help"])), 0);
}

#[test]
fn chain_cap_exhaustion_exits_three() {
    let out = penta(&["chain", "(3,3,3)", "--max-chain", "10"]);
    assert_eq!(exit_code(&out), 3);
    let out = penta_env(&["chain", "(2,3)"], &[("PENTA_MAX_CHAIN", "3")]);
    assert_eq!(exit_code(&out), 3);
    // The flag overrides the environment cap.
    let out = penta_env(
        &["chain", "(2,3)", "--max-chain", "10"],
        &[("PENTA_MAX_CHAIN", "3")],
    );
    assert_eq!(exit_code(&out), 0);
}

#[test]
fn precision_over_the_cap_exits_two() {
    let out = penta(&["verify", "--all", "--precision", "9999"]);
    assert_eq!(exit_code(&out), 2);
    let out = penta_env(
        &["verify", "--check", "lower_bound", "--precision", "9999"],
        &[("PENTA_MAX_PRECISION", "16384")],
    );
    assert_eq!(exit_code(&out), 0);
}

#[test]
fn chain_lists_the_derivation_to_empty() {
    let text = stdout_of(&["chain", "[2,3]"]);
    assert_eq!(
        text,
        "multidegree = (2,3)\nlength = 4\nr = 2\n0: (2,3)\n1: (1,1,2)\n2: (1,1)\n3: ()\n"
    );
}

#[test]
fn resmap_expands_the_conic_over_the_rationals() {
    let path = write_conic("rationals");
    let text = stdout_of(&[
        "resmap",
        "--poly",
        path.to_str().unwrap(),
        "--point",
        "0,0,1",
    ]);
    std::fs::remove_file(&path).ok();
    assert!(text.contains("field = rationals"));
    assert!(text.contains("f_1 = (1)*y0"));
    assert!(text.contains("f_2 = (-1)*y1^2"));
}

#[test]
fn resmap_sampling_is_deterministic_and_lands_on_the_curve() {
    let path = write_conic("sampling");
    let args = [
        "resmap",
        "--poly",
        path.to_str().unwrap(),
        "--point",
        "0,0,1",
        "--field",
        "101",
        "--samples",
        "4",
        "--seed",
        "9",
        "--json",
    ];
    let first = penta(&args);
    assert_eq!(exit_code(&first), 0);
    let second = penta(&args);
    std::fs::remove_file(&path).ok();
    assert_eq!(first.stdout, second.stdout);
    let value: serde_json::Value = serde_json::from_slice(&first.stdout).expect("valid json");
    let samples = value["samples"].as_array().expect("sample list");
    assert_eq!(samples.len(), 4);
    for sample in samples {
        assert_eq!(sample["on_hypersurface"], true, "sample {sample}");
        assert_eq!(sample["tangency_order"], 1);
    }
}

#[test]
fn resmap_with_zero_samples_emits_a_header_only_csv() {
    let path = write_conic("empty");
    let text = stdout_of(&[
        "resmap",
        "--poly",
        path.to_str().unwrap(),
        "--point",
        "0,0,1",
        "--field",
        "101",
        "--samples",
        "0",
        "--csv",
    ]);
    std::fs::remove_file(&path).ok();
    assert_eq!(
        text,
        "sample,direction,tangency_order,residual_chart,residual_ambient,on_hypersurface\n"
    );
}

#[test]
fn resmap_input_errors_exit_two() {
    let path = write_conic("errors");
    let file = path.to_str().unwrap();
    for args in [
        ["resmap", "--poly", file, "--point", "1,1,2"].as_slice(),
        ["resmap", "--poly", file, "--point", "0,0"].as_slice(),
        ["resmap", "--poly", file, "--point", "0,0,0"].as_slice(),
        [
            "resmap", "--poly", file, "--point", "0,0,1", "--field", "91",
        ]
        .as_slice(),
        [
            "resmap",
            "--poly",
            file,
            "--point",
            "0,0,1",
            "--samples",
            "2",
        ]
        .as_slice(),
        ["resmap", "--poly", "/nonexistent.json", "--point", "0,0,1"].as_slice(),
    ] {
        let out = penta(args);
        assert_eq!(exit_code(&out), 2, "args {args:?}");
    }
    std::fs::remove_file(&path).ok();
}

#[test]
fn json_big_integers_are_decimal_strings() {
    let text = stdout_of(&["nd", "10", "--json"]);
    let value: serde_json::Value = serde_json::from_str(&text).expect("valid json");
    let n = value["n"].as_str().expect("n is a string");
    assert_eq!(n.len(), 60);
    assert!(n.chars().all(|c| c.is_ascii_digit()));
    let exact = value["n_exact"].as_str().expect("n_exact is a string");
    assert!(exact.chars().all(|c| c.is_ascii_digit() || c == '/'));
}
