use std::process::{Command, Output};

use fcev::model::{CevSpec, DriverSpec, MarketSpec};
use fcev::verify::{quadrature_price, QuadratureSettings};

const CONTRACT: [&str; 12] = [
    "--s0",
    "100",
    "--strike",
    "100",
    "--rate",
    "0.05",
    "--sigma",
    "0.2",
    "--alpha",
    "1.5",
    "--maturity",
    "0.5",
];

fn fcev(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fcev"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn with_contract<'a>(head: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    let mut v = head.to_vec();
    v.extend_from_slice(&CONTRACT);
    v.extend_from_slice(tail);
    v
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Rows as maps from header name to cell.
fn rows(csv: &str) -> Vec<Vec<(String, String)>> {
    let mut lines = csv.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    lines
        .map(|l| header.iter().cloned().zip(l.split(',').map(String::from)).collect())
        .collect()
}

fn cell(row: &[(String, String)], key: &str) -> f64 {
    row.iter().find(|(k, _)| k == key).unwrap().1.parse().unwrap()
}

fn field<'a>(row: &'a [(String, String)], key: &str) -> &'a str {
    &row.iter().find(|(k, _)| k == key).unwrap().1
}

#[test]
fn price_row_matches_quadrature() {
    let out = fcev(&with_contract(&["price", "--model", "cev"], &[]));
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("model,s0,strike,rate,sigma,alpha,hurst,beta,gamma,maturity,price,guard_triggered\n"));
    let r = &rows(&text)[0];
    let m = MarketSpec::new(100.0, 100.0, 0.05, 0.5).unwrap();
    let c = CevSpec::new(0.2, 1.5).unwrap();
    let q = quadrature_price(&m, &c, &DriverSpec::Classical, &QuadratureSettings::default()).unwrap();
    assert!((cell(r, "price") - q).abs() < 1e-9 * q);
    assert_eq!(field(r, "guard_triggered"), "false");
    assert_eq!(field(r, "hurst"), "");
}

#[test]
fn validation_errors_exit_2() {
    let missing = fcev(&with_contract(&["price", "--model", "fcev"], &[]));
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("hurst"));

    let mut args = with_contract(&["price", "--model", "cev"], &[]);
    let i = args.iter().position(|a| *a == "1.5").unwrap();
    args[i] = "2.0";
    let out = fcev(&args);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));

    let out = fcev(&with_contract(&["price", "--model", "heston"], &[]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn greeks_beyond_the_guard_exit_3() {
    let mut args = with_contract(&["greeks", "--model", "cev"], &[]);
    let i = args.iter().position(|a| *a == "1.5").unwrap();
    args[i] = "1.99999999";
    assert_eq!(fcev(&args).status.code(), Some(3));
}

#[test]
fn classical_greeks_agree_with_differences() {
    let out = fcev(&with_contract(&["greeks", "--model", "cev"], &[]));
    assert_eq!(out.status.code(), Some(0));
    let r = &rows(&stdout(&out))[0];
    for g in ["delta", "spot_gamma", "vega", "theta", "rho"] {
        let a = cell(r, g);
        let d = cell(r, &format!("fd_{g}"));
        assert!(((a - d) / a).abs() < 1e-4, "{g}: {a} vs {d}");
    }
}

#[test]
fn collapsed_drivers_give_identical_greeks() {
    let greek_cells = |args: Vec<&str>| -> Vec<String> {
        let out = fcev(&args);
        assert_eq!(out.status.code(), Some(0));
        let text = stdout(&out);
        let line = text.lines().nth(1).unwrap();
        line.split(',').skip(10).map(String::from).collect()
    };
    let classical = greek_cells(with_contract(&["greeks", "--model", "cev"], &[]));
    let mixed = greek_cells(with_contract(
        &["greeks", "--model", "mfcev"],
        &["--beta", "1", "--gamma", "0", "--hurst", "0.7"],
    ));
    let half = greek_cells(with_contract(&["greeks", "--model", "fcev"], &["--hurst", "0.5"]));
    assert_eq!(classical, mixed);
    assert_eq!(classical, half);
}

fn sweep(maturity: &str, extra: &[&str]) -> Vec<Vec<(String, String)>> {
    let mut args = vec![
        "sweep",
        "--model",
        "fcev",
        "--hurst",
        "0.5",
        "--s0",
        "100",
        "--strike",
        "100",
        "--rate",
        "0.05",
        "--sigma",
        "0.15",
        "--maturity",
        maturity,
        "--param",
        "alpha",
        "--from",
        "1",
        "--to",
        "1.99",
        "--steps",
        "12",
    ];
    args.extend_from_slice(extra);
    let out = fcev(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    rows(&stdout(&out))
}

fn series_by_hurst(rows: &[Vec<(String, String)>]) -> [Vec<f64>; 3] {
    let pick = |h: f64| {
        rows.iter()
            .filter(|r| cell(r, "hurst") == h)
            .map(|r| cell(r, "price"))
            .collect::<Vec<_>>()
    };
    [pick(0.5), pick(0.7), pick(0.9)]
}

#[test]
fn hurst_ordering_reverses_across_one_year() {
    let overlays = ["--overlay", "hurst=0.7", "--overlay", "hurst=0.9"];
    let short = sweep("0.25", &overlays);
    assert_eq!(short.len(), 36);
    let [h5, h7, h9] = series_by_hurst(&short);
    for i in 0..12 {
        assert!(h5[i] > h7[i] && h7[i] > h9[i]);
    }
    // rows ascend in the swept parameter within each series
    assert!(h5.windows(2).all(|w| w[1] > w[0]));

    let long = sweep("2", &overlays);
    let [h5, h7, h9] = series_by_hurst(&long);
    for i in 0..12 {
        assert!(h5[i] < h7[i] && h7[i] < h9[i]);
    }
}

#[test]
fn mixed_overlay_dominates_fractional() {
    let rows = sweep(
        "0.5",
        &[
            "--overlay",
            "model=mfcev,beta=1,gamma=1,hurst=0.7",
            "--overlay",
            "model=mfcev,beta=0,gamma=1,hurst=0.7",
        ],
    );
    let by = |g: &str| -> Vec<f64> {
        rows.iter()
            .filter(|r| field(r, "model") == "mfcev" && field(r, "beta") == g)
            .map(|r| cell(r, "price"))
            .collect()
    };
    let (mixed, frac) = (by("1"), by("0"));
    assert_eq!(mixed.len(), 12);
    assert!(mixed.iter().zip(&frac).all(|(m, f)| m >= f));
}

#[test]
fn sweep_output_is_reproducible_with_lf_endings() {
    let args = [
        "sweep",
        "--model",
        "cev",
        "--s0",
        "100",
        "--strike",
        "100",
        "--rate",
        "0.05",
        "--sigma",
        "0.2",
        "--alpha",
        "1.5",
        "--maturity",
        "1",
        "--param",
        "maturity",
        "--from",
        "0.1",
        "--to",
        "2",
        "--steps",
        "7",
    ];
    let a = fcev(&args);
    let b = fcev(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn sweep_rejects_grids_leaving_the_domain() {
    let out = fcev(&[
        "sweep",
        "--model",
        "cev",
        "--s0",
        "100",
        "--strike",
        "100",
        "--rate",
        "0.05",
        "--sigma",
        "0.2",
        "--alpha",
        "1.5",
        "--maturity",
        "1",
        "--param",
        "alpha",
        "--from",
        "1",
        "--to",
        "2",
        "--steps",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha=2"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = std::env::temp_dir().join(format!("fcev-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.cfg");
    std::fs::write(
        &path,
        "# at the money\nmodel = cev\ns0 = 100\nstrike = 100\nrate = 0.05\nsigma = 0.2\nalpha = 1.5\nmaturity = 0.5\n",
    )
    .unwrap();
    let cfg = path.to_str().unwrap();
    let from_file = fcev(&["price", "--config", cfg]);
    let from_flags = fcev(&with_contract(&["price", "--model", "cev"], &[]));
    assert_eq!(from_file.stdout, from_flags.stdout);

    let overridden = fcev(&["price", "--config", cfg, "--s0", "110"]);
    let r = &rows(&stdout(&overridden))[0];
    assert_eq!(cell(r, "s0"), 110.0);
    assert_eq!(cell(r, "alpha"), 1.5);

    let out_path = dir.join("price.csv");
    let written = fcev(&["price", "--config", cfg, "--out", out_path.to_str().unwrap()]);
    assert_eq!(written.status.code(), Some(0));
    assert!(written.stdout.is_empty());
    assert_eq!(std::fs::read(&out_path).unwrap(), from_file.stdout);

    std::fs::write(&path, "spot = 100\n").unwrap();
    assert_eq!(fcev(&["price", "--config", cfg]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn perturbed_k_fails_the_limit_check() {
    let ok = fcev(&["check", "--only", "1"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = fcev(&["check", "--only", "1,4", "--perturb-k", "1.01"]);
    assert_eq!(bad.status.code(), Some(1));
    let text = stdout(&bad);
    assert!(text.contains("[FAIL] C1  black-scholes limit"));
    assert!(text.contains("failed: black-scholes limit\n"));
}

#[test]
fn check_json_report() {
    let out = fcev(&["check", "--only", "4,8", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 2);
    assert_eq!(v["checks"][0]["name"], "reduction lattice");
}

#[test]
fn full_check_passes() {
    let out = fcev(&["check"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert_eq!(stdout(&out).matches("[PASS]").count(), 10);
}

#[test]
fn bench_emits_a_timing_table() {
    let out = fcev(&["bench"]);
    assert_eq!(out.status.code(), Some(0));
    let r = rows(&stdout(&out));
    assert_eq!(r.len(), 27);
    assert!(r.iter().all(|row| cell(row, "seconds_per_price") > 0.0));
}
