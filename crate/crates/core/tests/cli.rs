use std::io::Write;
use std::process::{Command, Output};

use fractional_hardy::spectral::gamma_of_theta;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frac-hardy")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// (section, label, name, value, error) rows of a CSV document.
fn rows(text: &str) -> Vec<(String, String, String, f64, f64)> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
    csv::Reader::from_reader(body.as_bytes())
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].to_string(), r[1].to_string(), r[2].to_string(), r[3].parse().unwrap(), r[4].parse().unwrap())
        })
        .collect()
}

fn config(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn constants_reports_gamma_of_theta() {
    let o = run(&["constants", "--N", "3", "--s", "0.5", "--theta", "0.31831"]);
    assert_eq!(o.status.code(), Some(0));
    let want = gamma_of_theta(0.31831, 3, 0.5).unwrap();
    let got = rows(&stdout(&o)).into_iter().find(|r| r.2 == "gamma_of_theta").unwrap();
    assert!((got.3 - want).abs() < 1e-12);
}

#[test]
fn constants_without_theta_prints_table_only() {
    let o = run(&["constants", "--N", "2", "--s", "0.4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("# N=2 s=0.4 theta=none gamma=none"));
    let r = rows(&text);
    assert!(r.iter().any(|r| r.2 == "Lambda"));
    assert!(!r.iter().any(|r| r.1 == "given"));
    assert_eq!(r.iter().filter(|r| r.2 == "theta_of_gamma").count(), 11);
}

#[test]
fn theta_above_sharp_constant_is_a_usage_error() {
    let o = run(&["constants", "--N", "3", "--s", "0.5", "--theta", "0.7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Λ_{N,s}"));
}

#[test]
fn malformed_config_exits_two() {
    let f = config("[params]\nN = 3\ns = 0.5\nbogus = 1\n");
    assert_eq!(run(&["--config", f.path().to_str().unwrap(), "verify"]).status.code(), Some(2));
    let f = config("[params\n");
    assert_eq!(run(&["--config", f.path().to_str().unwrap(), "constants"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn kernel_table_identities() {
    let o = run(&["kernel", "--N", "3", "--s", "0.5", "--theta", "0.3"]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o));
    let pairs: Vec<_> = r.iter().filter(|r| r.0 == "kernel_pairs").collect();
    assert!(!pairs.is_empty());
    for row in &pairs {
        if row.2 == "forms_rel_diff" {
            assert!(row.3 <= 1e-12);
        }
        if row.2 == "closed_vs_quadrature_rel_diff" {
            assert!(row.3 <= 1e-6);
        }
    }
    // the built-in grid lists every pair in both orders, one after the other
    let labels: Vec<&String> = pairs.iter().filter(|r| r.2 == "product_form").map(|r| &r.1).collect();
    let vals = |n: &str| -> Vec<f64> { pairs.iter().filter(|r| r.2 == n).map(|r| r.3).collect() };
    for name in ["heat_profile", "product_form", "closed_time_integral", "resolvent", "riesz_kernel"] {
        let v = vals(name);
        for k in (0..v.len()).step_by(2) {
            assert_eq!(v[k], v[k + 1], "{name} {}", labels[k]);
        }
    }
}

#[test]
fn json_output_is_versioned_and_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let o = run(&["constants", "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "constants");
}

#[test]
fn zero_density_solves_to_zero() {
    let o = run(&["solve"]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o));
    let psi: Vec<_> = r.iter().filter(|r| r.2 == "potential").collect();
    assert_eq!(psi.len(), 9);
    assert!(psi.iter().all(|r| r.3 == 0.0));
}

#[test]
fn riesz_solve_then_delta_verify_passes() {
    let f = config(
        "[params]\nN = 3\ns = 0.5\ntheta = 0.0\n[solve]\nkernel = \"riesz_exact\"\ndensity = [{ center = [1.0, 0.0, 0.0], radius = 1.0 }]\nradii = [0.5, 1.0, 1.5]\n",
    );
    let path = f.path().to_str().unwrap();
    let o = run(&["--config", path, "solve"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(rows(&stdout(&o)).iter().filter(|r| r.2 == "potential").all(|r| r.3 > 0.0));
    let v = run(&["--config", path, "verify", "--delta"]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains("delta_identity,verdict=pass"));
}

#[test]
fn surrogate_solve_slope_matches_gamma() {
    let f = config(
        "[params]\nN = 3\ns = 0.5\ntheta = 0.3183098861837907\n[solve]\nkernel = \"surrogate\"\ndensity = [{ center = [5000.0, 0.0, 0.0], radius = 2000.0 }]\n",
    );
    let o = run(&["--config", f.path().to_str().unwrap(), "solve"]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o));
    let minus_gamma = r.iter().find(|r| r.2 == "minus_gamma").unwrap().3;
    let slopes: Vec<f64> = r.iter().filter(|r| r.2 == "local_slope").map(|r| r.3).collect();
    assert_eq!(slopes.len(), 9);
    for s in slopes {
        assert!((s / minus_gamma - 1.0).abs() <= 0.05, "{s} {minus_gamma}");
    }
}

#[test]
fn wrong_theta_residual_fails_verification() {
    let o = run(&["verify", "--residual", "--theta-scale", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    let stat = rows(&stdout(&o)).into_iter().find(|r| r.0 == "fundamental_residual" && r.2 == "statistic").unwrap();
    assert!((stat.3 - 0.5).abs() < 0.01);
}

#[test]
fn default_verify_passes() {
    let o = run(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    for check in ["fundamental_residual", "hardy_ratio", "delta_identity", "origin_slope", "hardy_integrability"] {
        assert!(text.contains(&format!("{check},verdict=pass")), "{check}");
    }
}
