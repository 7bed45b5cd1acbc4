#![cfg(feature = "cli")]

//! CLI-level behavior: exit codes, file formats, CSV round-tripping and the
//! run manifest, driven in-process through `cli::run_from`.

use ptsturm::cli::{run_from, EXIT_CONFIG, EXIT_OK, EXIT_VERIFICATION};
use std::fs;
use tempfile::TempDir;

fn args(parts: &[&str]) -> Vec<String> {
    std::iter::once("ptsturm".to_string())
        .chain(parts.iter().map(|s| s.to_string()))
        .collect()
}

#[test]
fn eigs_writes_csv_json_and_manifest() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = run_from(args(&[
        "eigs", "--coeff", "sine", "--eps", "0.5", "--count", "3", "--out", out,
    ]));
    assert_eq!(code, EXIT_OK);

    let csv = fs::read_to_string(dir.path().join("eigs.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,lambda,residual,certified_box,box_count"
    );
    assert_eq!(lines.count(), 3);

    // CSV round-trip: parse every numeric field and re-serialize
    let mut rebuilt = String::from("n,lambda,residual,certified_box,box_count\n");
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let n: usize = f[0].parse().unwrap();
        let lambda: f64 = f[1].parse().unwrap();
        let residual: f64 = f[2].parse().unwrap();
        let bx: Vec<f64> = f[3].split(';').map(|p| p.parse().unwrap()).collect();
        let count: i64 = f[4].parse().unwrap();
        rebuilt.push_str(&format!(
            "{},{},{},{};{};{};{},{}\n",
            n, lambda, residual, bx[0], bx[1], bx[2], bx[3], count
        ));
    }
    assert_eq!(csv, rebuilt, "CSV did not round-trip byte-identically");

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("eigs.json")).unwrap()).unwrap();
    assert_eq!(json["eps"], 0.5);
    assert_eq!(json["trivial_zero"], true);
    assert_eq!(json["real_eigs"].as_array().unwrap().len(), 3);
    assert_eq!(json["contour_counts"][0]["ok"], true);

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("run_manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "eigs");
    assert_eq!(manifest["tolerances"]["tol_ode"], 1e-10);
    assert!(manifest["wall_ms"].as_u64().is_some());
}

#[test]
fn eigs_with_bessel_oracle_column() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = run_from(args(&[
        "eigs",
        "--coeff",
        "piecewise_linear",
        "--eps",
        "0.5",
        "--count",
        "2",
        "--oracle",
        "bessel",
        "--out",
        out,
    ]));
    assert_eq!(code, EXIT_OK);
    let csv = fs::read_to_string(dir.path().join("eigs.csv")).unwrap();
    assert!(csv.lines().next().unwrap().ends_with(",bessel_residual"));
    // closed-form residuals at the located eigenvalues are small relative
    // to the local scale of B(lambda), which grows with lambda
    for line in csv.lines().skip(1) {
        let last: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(last < 1e-3, "closed-form residual {last}");
    }
}

#[test]
fn bessel_oracle_rejected_for_sine() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = run_from(args(&[
        "eigs", "--coeff", "sine", "--count", "2", "--oracle", "bessel", "--out", out,
    ]));
    assert_eq!(code, EXIT_CONFIG);
}

#[test]
fn invalid_eps_exits_with_config_code() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = run_from(args(&[
        "eigs", "--coeff", "sine", "--eps", "2.0", "--count", "2", "--out", out,
    ]));
    assert_eq!(code, EXIT_CONFIG);
}

#[test]
fn alphas_csv_schema() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = run_from(args(&[
        "alphas", "--coeff", "sine", "--eps", "0.5", "--count", "4", "--out", out,
    ]));
    assert_eq!(code, EXIT_OK);
    let csv = fs::read_to_string(dir.path().join("alphas.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "n,alpha,r,residual,wkb_seed");
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    // alpha strictly increasing, r = alpha^2
    let mut prev = 0.0;
    for row in rows {
        let f: Vec<f64> = row.split(',').skip(1).map(|p| p.parse().unwrap()).collect();
        assert!(f[0] > prev);
        assert!((f[1] - f[0] * f[0]).abs() < 1e-12 * (1.0 + f[1]));
        prev = f[0];
    }
}

#[test]
fn rho_map_outputs_and_flags() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = run_from(args(&[
        "rho-map", "--coeff", "sine", "--eps", "0.5", "--grid", "6x16", "--out", out,
    ]));
    assert_eq!(code, EXIT_OK);
    let csv = fs::read_to_string(dir.path().join("rho.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "re_z,im_z,abs_rho,sector,violates_claim"
    );
    assert_eq!(csv.lines().count(), 1 + 6 * 16);
    assert!(csv.contains("inner") && csv.contains("outer"));
    // no claimed violations anywhere on the map
    assert!(!csv.contains(",true"));
    let svg = fs::read_to_string(dir.path().join("rho.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("stroke-dasharray"), "sector rays missing");
}

#[test]
fn rho_map_grid_touching_zero_is_flagged() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    // dense radial grid up to just past alpha_1 guarantees a cell inside
    // the proximity margin of z = i alpha_1
    let code = run_from(args(&[
        "rho-map", "--coeff", "sine", "--eps", "0.5", "--grid", "48x4", "--rmax", "1.1",
        "--out", out,
    ]));
    assert_eq!(code, EXIT_OK);
    let csv = fs::read_to_string(dir.path().join("rho.csv")).unwrap();
    assert!(
        csv.contains("pole/zero proximity"),
        "expected flagged cells near i alpha_1"
    );
}

#[test]
fn certify_asymmetric_box_counts_only_contained_roots() {
    // [0.5, 3.5] x [-1, 1] contains +lambda_1 and +lambda_2 of the sine
    // profile (1.081, 2.512) but neither their negatives nor the trivial 0
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = run_from(args(&[
        "certify", "--coeff", "sine", "--eps", "0.5", "--box", "0.5,3.5,-1,1", "--out", out,
    ]));
    assert_eq!(code, EXIT_OK);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("certify.json")).unwrap())
            .unwrap();
    assert_eq!(json["winding"], 2);
    assert_eq!(json["expected"], 2);
    assert_eq!(json["ok"], true);
}

#[test]
fn certify_empty_box_count_zero() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = run_from(args(&[
        "certify", "--coeff", "sine", "--eps", "0.5", "--box", "0.5,1.05,0.5,1.5", "--out", out,
    ]));
    assert_eq!(code, EXIT_OK);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("certify.json")).unwrap())
            .unwrap();
    assert_eq!(json["winding"], 0);
    assert_eq!(json["ok"], true);
}

#[test]
fn delta_sweep_rows() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = run_from(args(&[
        "delta-sweep",
        "--coeff",
        "sine",
        "--eps",
        "0.5",
        "--deltas",
        "0.3,0.15",
        "--count",
        "2",
        "--out",
        out,
    ]));
    assert_eq!(code, EXIT_OK);
    let csv = fs::read_to_string(dir.path().join("delta_sweep.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "delta,n,lambda_delta,lambda_limit,abs_diff"
    );
    assert_eq!(csv.lines().count(), 1 + 4);
}

#[test]
fn verify_only_filter_and_degraded_tolerance() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    // a single cheap check passes at default tolerances
    let code = run_from(args(&["verify", "--only", "wronskian", "--out", out]));
    assert_eq!(code, EXIT_OK);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("verify.json")).unwrap())
            .unwrap();
    assert_eq!(report.as_array().unwrap().len(), 1);
    assert_eq!(report[0]["name"], "wronskian");

    // loosening the integrator breaks the oracle-agreement criterion
    let code = run_from(args(&[
        "verify", "--only", "oracle", "--tol-ode", "1e-4", "--out", out,
    ]));
    assert_eq!(code, EXIT_VERIFICATION);

    // unknown check name is a config error
    let code = run_from(args(&["verify", "--only", "nonsense", "--out", out]));
    assert_eq!(code, EXIT_CONFIG);
}

#[test]
fn custom_descriptor_from_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let samples: Vec<[f64; 2]> = (1..96)
        .map(|k| {
            let x = std::f64::consts::PI * (k as f64) / 96.0;
            [x, 2.0 / std::f64::consts::PI * x.sin()]
        })
        .collect();
    let desc = serde_json::json!({
        "kind": "custom",
        "eps": 0.5,
        "samples": samples,
        "fprime0": 2.0 / std::f64::consts::PI,
        "fprimePi": -2.0 / std::f64::consts::PI,
        "fsecond0": 0.0,
        "fsecondPi": 0.0,
    });
    let path = dir.path().join("coeff.json");
    fs::write(&path, serde_json::to_string(&desc).unwrap()).unwrap();
    let code = run_from(args(&[
        "alphas",
        "--coeff",
        path.to_str().unwrap(),
        "--count",
        "2",
        "--out",
        out,
    ]));
    assert_eq!(code, EXIT_OK);
    // sampled-sine zeros land close to the analytic sine profile's
    let csv = fs::read_to_string(dir.path().join("alphas.csv")).unwrap();
    let first: f64 = csv
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    let reference = ptsturm::spectrum::find_alphas(
        &ptsturm::coeff::make_sine(0.5).unwrap(),
        1,
        &ptsturm::shoot::OdeOptions::default(),
    )
    .unwrap()[0]
        .alpha;
    assert!(
        (first - reference).abs() < 1e-3 * reference,
        "custom-profile alpha_1 {first} vs sine {reference}"
    );
}
