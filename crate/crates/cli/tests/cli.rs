use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ncps::sweep::{parse_csv, CSV_HEADER};
use ncps::{closed_form_invariants_family1, NcParams, RowClass};

fn ncps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncps"))
        .args(args)
        .output()
        .expect("spawn ncps")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key}= in output:\n{text}"))
}

fn number(text: &str, key: &str) -> f64 {
    field(text, key).parse().unwrap()
}

fn spectrum(text: &str) -> Vec<f64> {
    field(text, "spectrum")
        .split_whitespace()
        .map(|v| v.parse().unwrap())
        .collect()
}

#[test]
fn classify_vacuum() {
    let out = ncps(&[
        "classify", "--theta", "0", "--eta", "0", "--m", "0", "--n", "0",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(field(&text, "class"), "SEPARABLE");
    assert!((number(&text, "nu_minus") - 1.0).abs() < 1e-12);
    assert!((number(&text, "nu_minus_prime") - 1.0).abs() < 1e-12);
    assert_eq!(field(&text, "b"), "1");
}

#[test]
fn classify_commutative_half_radius() {
    let out = ncps(&[
        "classify", "--theta", "0", "--eta", "0", "--m", "0.05", "--n", "0.4975",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!((number(&text, "R") - 0.5).abs() < 1e-3);
    assert!((number(&text, "nu_minus_prime") - 1.5).abs() < 1e-3);
    assert_eq!(field(&text, "class"), "SEPARABLE");
}

#[test]
fn classify_entangled_point() {
    let r: f64 = 0.2;
    let m = (r / 10.0).to_string();
    let n = (3.0 * 11f64.sqrt() * r / 10.0).to_string();
    let out = ncps(&[
        "classify", "--theta", "0.125", "--eta", "0.6", "--m", &m, "--n", &n,
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(field(&text, "class"), "ENTANGLED");
    assert!(number(&text, "nu_minus_prime") < 1.0);
}

#[test]
fn domain_errors_exit_2() {
    let out = ncps(&[
        "classify", "--theta", "2", "--eta", "1", "--m", "0", "--n", "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("theta*eta must be < 1"));

    let out = ncps(&[
        "classify", "--theta", "0", "--eta", "0", "--m", "0.8", "--n", "0.6",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("must be < 1"));

    let out = ncps(&[
        "spectrum", "--theta", "-0.1", "--eta", "0", "--m", "0", "--n", "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spectrum_of_vacuum() {
    let out = ncps(&[
        "spectrum", "--theta", "0.3", "--eta", "0.2", "--m", "0", "--n", "0",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(field(&text, "structure"), "OMEGA");
    // The deformation splits the vacuum spectrum but keeps its product at
    // 1/sqrt(det Omega) = 1/(1 - theta*eta)^2.
    let values = spectrum(&text);
    let product: f64 = values.iter().product();
    assert!((product - 1.0 / 0.94f64.powi(2)).abs() < 1e-9, "{values:?}");
    assert!(values[0] < 1.0 && values[3] > 1.0);

    let out = ncps(&[
        "spectrum", "--theta", "0", "--eta", "0", "--m", "0", "--n", "0",
    ]);
    assert_eq!(field(&stdout(&out), "spectrum"), "1 1 1 1");
}

#[test]
fn transposed_spectrum_matches_closed_form() {
    let (m, n) = (0.05, 0.4975);
    let out = ncps(&[
        "spectrum",
        "--theta",
        "0.125",
        "--eta",
        "0.25",
        "--m",
        "0.05",
        "--n",
        "0.4975",
        "--transposed",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(field(&text, "structure"), "OMEGA_PRIME");
    let cf = closed_form_invariants_family1(NcParams::new(0.125, 0.25).unwrap(), m, n).unwrap();
    let values = spectrum(&text);
    assert!((values[0] - cf.nu_minus_prime).abs() < 1e-9 * cf.nu_minus_prime);
}

#[test]
fn sweep_small_grid_to_stdout() {
    let out = ncps(&[
        "sweep",
        "--m",
        "0.05",
        "--n",
        "0.4975",
        "--theta-range",
        "0:0.5:2",
        "--eta-range",
        "0:0.5:2",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    let rows = parse_csv(&text).unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!((rows[0].theta, rows[0].eta), (0.0, 0.0));
    assert_eq!((rows[1].theta, rows[1].eta), (0.0, 0.5));
    assert_eq!(rows[0].class, RowClass::Separable);
    assert!(rows.iter().all(|r| r.is_consistent()));
}

#[test]
fn sweep_marks_out_of_domain_cells() {
    let out = ncps(&[
        "sweep",
        "--m",
        "0",
        "--n",
        "0",
        "--theta-range",
        "1.5:1.5:1",
        "--eta-range",
        "0:1:2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    assert_eq!(last, "1.5,1,NaN,NaN,OUT_OF_DOMAIN");
}

#[test]
fn sweep_parallel_output_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let serial = dir.path().join("serial.csv");
    let parallel = dir.path().join("parallel.csv");
    let base = [
        "sweep",
        "--family",
        "2",
        "--m",
        "0.3",
        "--n",
        "0.4",
        "--theta-range",
        "0:2:41",
        "--eta-range",
        "0:2:41",
    ];
    for (path, jobs) in [(&serial, "1"), (&parallel, "4")] {
        let mut args = base.to_vec();
        args.extend(["--jobs", jobs, "--out", path.to_str().unwrap()]);
        let out = ncps(&args);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let a = fs::read(&serial).unwrap();
    assert_eq!(a, fs::read(&parallel).unwrap());
    assert_eq!(
        parse_csv(std::str::from_utf8(&a).unwrap()).unwrap().len(),
        41 * 41
    );
}

#[test]
fn unwritable_output_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("out.csv");
    let out = ncps(&[
        "sweep",
        "--m",
        "0",
        "--n",
        "0",
        "--theta-range",
        "0:0:1",
        "--eta-range",
        "0:0:1",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn bad_range_is_a_usage_error() {
    let out = ncps(&["sweep", "--m", "0", "--n", "0", "--theta-range", "0:1"]);
    assert!(!out.status.success());
}

fn audit_dir(dir: &Path) -> usize {
    let mut files = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let rows = parse_csv(&text).unwrap();
        assert!(!rows.is_empty(), "{}", path.display());
        assert!(rows.iter().all(|r| r.is_consistent()), "{}", path.display());
        files += 1;
    }
    files
}

#[test]
fn curve_preset_writes_every_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncps(&[
        "sweep",
        "--preset",
        "fig1",
        "--steps",
        "121",
        "--jobs",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(audit_dir(dir.path()), 18);

    let text = fs::read_to_string(dir.path().join("fig1_R0.2_theta0.125.csv")).unwrap();
    let rows = parse_csv(&text).unwrap();
    assert_eq!(rows.len(), 121);
    assert!(rows.iter().all(|r| r.theta == 0.125));
    assert!(rows.iter().any(|r| r.class == RowClass::Entangled));
}

#[test]
fn map_preset_writes_both_splits() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncps(&[
        "sweep",
        "--preset",
        "fig4",
        "--steps",
        "31",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(audit_dir(dir.path()), 6);
    let text = fs::read_to_string(dir.path().join("fig4_weak_m_R0.1.csv")).unwrap();
    assert_eq!(parse_csv(&text).unwrap().len(), 31 * 31);
}

#[test]
fn preset_conflicts_with_explicit_state() {
    let out = ncps(&["sweep", "--preset", "fig2", "--m", "0.1"]);
    assert!(!out.status.success());
}

#[test]
fn selftest_report_is_deterministic() {
    let first = ncps(&["selftest"]);
    let second = ncps(&["selftest"]);
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    assert_eq!(text.lines().count(), 11);
    let failing: Vec<&str> = text.lines().filter(|l| l.starts_with("[FAIL]")).collect();
    // Only the R = 1/2 deformation-induced entanglement check is red.
    assert_eq!(failing.len(), 1, "{text}");
    assert!(failing[0].starts_with("[FAIL]  4"));
    assert_eq!(first.status.code(), Some(1));
    assert!(stderr(&first).contains("check 4"));
}
