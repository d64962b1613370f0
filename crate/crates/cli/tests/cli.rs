//! End-to-end checks of the batch front end: determinism, exit codes, and the
//! thin-adapter property (CLI output equals direct library calls).

use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_skewlab"))
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

#[test]
fn selftest_is_deterministic_and_green() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("a.json");
    let out2 = dir.path().join("b.json");
    for out in [&out1, &out2] {
        let status = bin()
            .args(["selftest", "--p", "3", "--seed", "7", "--out"])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success(), "selftest exited nonzero");
    }
    let a = fs::read_to_string(&out1).unwrap();
    let b = fs::read_to_string(&out2).unwrap();
    assert_eq!(a, b, "identical job + seed must give byte-identical output");
    assert!(a.contains("\"failures\": 0"));
}

#[test]
fn decompose_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.json");
    write(
        &input,
        r#"{"version":1,"data":{"p":2,"prec":6,"window":[0,12],"coeffs":{"1":{"v":0,"u":"1","N":6}},"class":"OE"}}"#,
    );
    let out = dir.path().join("parts.json");
    let status = bin().args(["decompose"]).arg(&input).args(["--depth", "1", "--out"]).arg(&out).status().unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    let parts: Vec<skewlab::io::SeriesDto> = skewlab::io::decode(&text).unwrap();
    let f = skewlab::LaurentSeries::monomial(2, 1, 6, skewlab::AnalyticityClass::OE).with_window(0, 12);
    let direct = f.etale_decompose(1).unwrap();
    assert_eq!(parts.len(), direct.len());
    for (dto, lib) in parts.iter().zip(&direct) {
        assert!(dto.to_series().unwrap().agrees_with(lib), "CLI and library disagree");
    }
}

#[test]
fn version_mismatch_is_a_precondition_failure() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.json");
    write(
        &input,
        r#"{"version":9,"data":{"p":2,"prec":6,"window":[0,4],"coeffs":{},"class":"OE"}}"#,
    );
    let status = bin().args(["decompose"]).arg(&input).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn malformed_fixture_names_location() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.json");
    write(
        &input,
        r#"{"version":1,"data":{"p":2,"prec":6,"window":[0,4],"coeffs":{"oops":{"v":0,"u":"1","N":4}},"class":"OE"}}"#,
    );
    let output = bin().args(["decompose"]).arg(&input).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("oops"), "diagnostic should name the bad key: {err}");
}

#[test]
fn solvex_worked_example() {
    // the d = 1, K = 2 instance: X component is h − 1 and every residual is zero
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("module.json");
    write(
        &input,
        r#"{"version":1,"data":{
            "group":"GL3","p":3,"level":2,"rank":1,
            "phi_matrix":[[{"group":"GL3","p":3,"level":2,"terms":[
                {"key":[1,0],"series":{"p":3,"prec":6,"window":[0,2305843009213693951],"coeffs":{"0":{"v":0,"u":"1","N":6}},"class":"OE"}}
            ]}]],
            "actions":[]}}"#,
    );
    let out = dir.path().join("report.json");
    let status = bin().args(["solvex"]).arg(&input).args(["--out"]).arg(&out).status().unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"x_residual_zero\": true"));
    assert!(text.contains("\"y_residual_zero\": true"));
    assert!(text.contains("\"inverse_residual_zero\": true"));
    // X has the single key [1,0] with coefficient 1 and the identity key with −1
    assert!(text.contains("\"key\": ["));
}

#[test]
fn norm_closed_form_matches_library() {
    let output = bin()
        .args(["norm", "--closed-form", "--group", "GL3", "--p", "2", "--t", "2,1,0", "--rho", "1/2"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8_lossy(&output.stdout);
    let datum = skewlab::GroupId::Gl3.datum();
    let s = datum.s_elt(2, 8);
    let rho = skewlab::RhoExponent::from_parts(1, 2).unwrap();
    let v = skewlab::norms::phi_t_norm_closed(&datum, (1, 3), &s, rho).unwrap();
    // the (1,3) row of the table must match the direct call (2^{-2})
    assert_eq!(v.exponent().unwrap(), skewlab::padic::Rational::from_integer(2));
    assert!(text.contains("\"exp_num\": 2"));
}
