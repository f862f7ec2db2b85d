use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvstream"))
        .args(args)
        .output()
        .expect("spawn curvstream")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

#[test]
fn sphere_coefficient_example() {
    let v = json(&[
        "coeffs",
        "--frame",
        "sphere",
        "--point",
        "1.4142135623730951,0,1.4142135623730951",
        "--mu",
        "0.5",
        "--omega",
        "0",
    ]);
    let rec = &v["records"][0];
    assert!((rec["a_mu"].as_f64().unwrap() - 0.375).abs() < 1e-12);
    assert!(rec["a_omega"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(v["frame"], "sphere");
    assert_eq!(v["engine"], "dual");
}

#[test]
fn spherical_position_flags() {
    let a = json(&[
        "coeffs",
        "--frame",
        "sphere",
        "--rho",
        "2",
        "--theta",
        "0.7853981633974483",
        "--phi",
        "1",
        "--mu",
        "0",
        "--omega",
        "1.5707963267948966",
    ]);
    assert!((a["records"][0]["a_omega"].as_f64().unwrap() + 0.5).abs() < 1e-12);
}

#[test]
fn constant_frame_has_zero_coefficients() {
    let v = json(&[
        "coeffs", "--frame", "constant", "--point", "1,-2,3", "--point", "0,0,0", "--mu", "0.3", "--omega", "2",
    ]);
    for rec in v["records"].as_array().unwrap() {
        for key in ["a_mu", "a_omega", "mu_surface", "mu_curve_n", "omega_curve", "omega_wind"] {
            assert_eq!(rec[key].as_f64().unwrap(), 0.0);
        }
    }
}

#[test]
fn engines_agree_through_the_cli() {
    let args = [
        "coeffs",
        "--frame",
        "ellipsoid",
        "--a",
        "2",
        "--b",
        "1",
        "--c",
        "1",
        "--point",
        "1.2,0.3,-0.4",
        "--mu",
        "0.3",
        "--omega",
        "1",
    ];
    let dual = json(&args);
    let mut fd_args = args.to_vec();
    fd_args.extend(["--engine", "fd"]);
    let fd = json(&fd_args);
    assert_eq!(fd["engine"], "fd");
    for key in ["a_mu", "a_omega"] {
        let (d, f) = (
            dual["records"][0][key].as_f64().unwrap(),
            fd["records"][0][key].as_f64().unwrap(),
        );
        assert!((d - f).abs() < 1e-6, "{key}: {d} vs {f}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["verify", "--frame", "none"]), 2);
    assert_eq!(code(&["coeffs", "--frame", "sphere", "--mu", "0.1", "--omega", "0"]), 2);
    assert_eq!(
        code(&["coeffs", "--frame", "sphere", "--point", "1,2", "--mu", "0.1", "--omega", "0"]),
        2
    );
    assert_eq!(
        code(&[
            "coeffs",
            "--frame",
            "sphere",
            "--point",
            "1,0,1",
            "--mu",
            "0.1",
            "--omega",
            "0",
            "--fd-step",
            "1",
            "--engine",
            "fd"
        ]),
        2
    );
    assert_eq!(code(&["verify", "--format", "csv"]), 2);
    assert_eq!(code(&["holonomy", "--theta", "4"]), 2);
    assert_eq!(
        code(&["coeffs", "--frame", "sphere", "--point", "0,0,1", "--mu", "0.5", "--omega", "0"]),
        3
    );
    assert_eq!(
        code(&[
            "coeffs",
            "--frame",
            "cylindrical-i",
            "--point",
            "0,0,1",
            "--mu",
            "0.5",
            "--omega",
            "0"
        ]),
        3
    );
    assert_eq!(
        code(&["coeffs", "--frame", "sphere", "--point", "1,0,1", "--mu", "1", "--omega", "0"]),
        3
    );
    let failing = [
        "verify",
        "--engine",
        "fd",
        "--fd-step",
        "1e-2",
        "--frame",
        "sphere",
        "--check",
        "chain-rule",
        "--no-timestamp",
    ];
    let out = run(&failing);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["checks"][0]["status"], "fail");
}

#[test]
fn csv_and_json_sweeps_carry_the_same_numbers() {
    let base = [
        "sweep",
        "--frame",
        "paraboloid",
        "--a",
        "1",
        "--b",
        "2",
        "--grid-x",
        "-0.5:0.5:3",
        "--grid-y",
        "0.1:0.1:1",
        "--grid-z",
        "0:1:2",
        "--mu-count",
        "3",
        "--omega-count",
        "4",
    ];
    let j = json(&base);
    let mut csv_args = base.to_vec();
    csv_args.extend(["--format", "csv"]);
    let out = run(&csv_args);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let headers: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        headers.join(","),
        "x,y,z,mu,omega,a_mu,a_omega,mu_surface,mu_curve_n,omega_curve,omega_wind"
    );
    let records = j["records"].as_array().unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), records.len());
    assert_eq!(rows.len(), 3 * 2 * 3 * 4);
    for (row, rec) in rows.iter().zip(records) {
        for (h, cell) in headers.iter().zip(row.iter()) {
            let c: f64 = cell.parse().unwrap();
            let v = rec[h.as_str()].as_f64().unwrap();
            assert!(c == v || (c - v).abs() <= 1e-15 * v.abs(), "{h}: {c} vs {v}");
        }
    }
}

#[test]
fn sweep_uses_gauss_legendre_and_uniform_nodes() {
    let v = json(&[
        "sweep",
        "--frame",
        "constant",
        "--point",
        "0,0,0",
        "--mu-count",
        "2",
        "--omega-count",
        "4",
    ]);
    let recs = v["records"].as_array().unwrap();
    assert_eq!(recs.len(), 8);
    let mu = recs[0]["mu"].as_f64().unwrap();
    assert!((mu + 1.0 / 3f64.sqrt()).abs() < 1e-15);
    let omegas: Vec<f64> = recs[..4].iter().map(|r| r["omega"].as_f64().unwrap()).collect();
    for (k, w) in omegas.iter().enumerate() {
        assert!((w - std::f64::consts::FRAC_PI_2 * k as f64).abs() < 1e-15);
    }
}

#[test]
fn conservation_outputs() {
    let s = json(&["conservation", "--frame", "sphere"]);
    assert_eq!(s["feasible"], true);
    assert_eq!(s["f"], "rho");
    assert_eq!(s["g"], "1");
    let c = json(&["conservation", "--frame", "cylindrical-i"]);
    assert_eq!((c["f"].as_str(), c["g"].as_str()), (Some("1"), Some("1")));
    let c2 = json(&["conservation", "--frame", "cylindrical-ii"]);
    assert_eq!(c2["feasible"], false);
    assert_eq!(c2["reason"], "CDependsOnOmega");
    assert!(c2["max_c_spread"].as_f64().unwrap() >= 1.0 / 3.0);
    let p = json(&["conservation", "--frame", "paraboloid", "--a", "1", "--b", "2"]);
    assert_eq!(p["feasible"], false);
    for frame in ["ellipsoid", "graph"] {
        assert_eq!(json(&["conservation", "--frame", frame])["feasible"], false);
    }
    assert_eq!(code(&["conservation", "--frame", "sphere", "--spatial-samples", "2"]), 2);
}

#[test]
fn verify_holonomy_at_a_given_colatitude() {
    let v = json(&[
        "verify",
        "--frame",
        "sphere",
        "--check",
        "holonomy",
        "--theta",
        "1.0471975512",
        "--no-timestamp",
    ]);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 2);
    assert_eq!(checks[0]["name"], "holonomy/sphere/theta=1.0471975512");
    assert!(checks.iter().all(|c| c["status"] == "pass"));
    assert!(checks[0]["max_residual"].as_f64().unwrap() < 1e-3);
    assert!(v["meta"].get("timestamp").is_none());
    let stamped = json(&["verify", "--frame", "sphere", "--check", "holonomy", "--theta", "1"]);
    assert!(stamped["meta"]["timestamp"].is_u64());
}

#[test]
fn holonomy_command() {
    let v = json(&["holonomy", "--theta", "1.0471975512"]);
    assert!((v["angle"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-3);
    assert!(v["error"].as_f64().unwrap() < 1e-3);
    let flat = json(&["holonomy", "--frame", "cylindrical-i", "--theta", "1"]);
    assert!(flat["angle"].as_f64().unwrap().abs() < 1e-9);
    assert!(flat.get("expected").is_none());
}

#[test]
fn output_is_deterministic_and_can_go_to_a_file() {
    let args = [
        "verify",
        "--seed",
        "3",
        "--frame",
        "ellipsoid",
        "--check",
        "oracle",
        "--check",
        "forms",
        "--no-timestamp",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let path = std::env::temp_dir().join(format!("curvstream-cli-test-{}.json", std::process::id()));
    let mut with_out = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    let c = run(&with_out);
    assert!(c.status.success() && c.stdout.is_empty());
    let written = std::fs::read(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(written, a.stdout);
}
