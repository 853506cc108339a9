//! End-to-end tests of the command-line tool.

mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::config_path;
use ntrailer::io::{model_from_json, read_table, read_trace, trace_header, AngleUnit};
use ntrailer::sim::Hold;
use ntrailer::symbolic::{simplify, AngleSum, AngleVar, ScalarExpr};
use serde_json::Value;

fn ntrailer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ntrailer")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn cfg(name: &str) -> String {
    config_path(name).to_str().unwrap().to_string()
}

#[test]
fn derive_bicycle_emits_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("model.json");
    let o = ntrailer(&["derive", "--config", &cfg("bicycle"), "--emit", "json", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["f"][2], "f_psi_1");
    assert_eq!(doc["params"]["a_1_2"], 3.0);
    let model = model_from_json(&doc).unwrap();
    let (t1, t2) = (AngleSum::var(AngleVar::steer(1, 1)), AngleSum::var(AngleVar::steer(1, 2)));
    let expected = ScalarExpr::quotient(
        ScalarExpr::sin(t2.clone() - t1),
        ScalarExpr::param("a_1_2") * ScalarExpr::cos(t2),
    )
    .unwrap();
    assert_eq!(model.f[2], simplify(&expected));
}

#[test]
fn derive_is_byte_stable_for_shipped_configs() {
    for name in [
        "bicycle",
        "car_ackermann",
        "one_trailer_on_axle",
        "semi_off_axle",
        "three_trailers",
        "triaxle_tractor",
        "car_short_trailer",
        "two_trailers_off_axle",
    ] {
        for emit in ["json", "latex"] {
            let a = ntrailer(&["derive", "--config", &cfg(name), "--emit", emit]);
            let b = ntrailer(&["derive", "--config", &cfg(name), "--emit", emit]);
            assert_eq!(code(&a), 0, "{name}: {}", stderr(&a));
            assert!(!a.stdout.is_empty());
            assert_eq!(a.stdout, b.stdout, "{name} {emit}");
        }
    }
}

#[test]
fn derive_input_and_geometry_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    std::fs::write(
        &missing,
        r#"{"units": [{"label": "t", "wheels": [{"x": 0, "y": 0}, {"x": 3, "y": 0}], "hitch_front": null, "hitch_rear": {"x": -1, "y": 0}},
                      {"label": "s", "wheels": [{"x": 0, "y": 0}], "hitch_front": null, "hitch_rear": null}]}"#,
    )
    .unwrap();
    let o = ntrailer(&["derive", "--config", p(&missing)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("unit 2 needs a front hitch"), "{}", stderr(&o));

    let singular = dir.path().join("singular.json");
    std::fs::write(
        &singular,
        r#"{"units": [{"label": "t", "wheels": [{"x": 0, "y": 0}, {"x": 3, "y": 0}], "hitch_front": null, "hitch_rear": {"x": -1, "y": 0}},
                      {"label": "s", "wheels": [{"x": 2, "y": 0}], "hitch_front": {"x": 2, "y": 0}, "hitch_rear": null}]}"#,
    )
    .unwrap();
    let o = ntrailer(&["derive", "--config", p(&singular)]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("structurally singular"));

    let unknown = dir.path().join("unknown.json");
    std::fs::write(&unknown, r#"{"units": [], "colour": "red"}"#).unwrap();
    assert_eq!(code(&ntrailer(&["derive", "--config", p(&unknown)])), 2);
    assert_eq!(code(&ntrailer(&["derive", "--config", "/nonexistent/vehicle.json"])), 2);
}

#[test]
fn simulate_straight_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    std::fs::write(&trace, "t,v,omega_1_1,omega_1_2,omega_2_1\n0,4,0,0,0\n2,4,0,0,0\n").unwrap();
    let x0 = r#"{"x1": 1, "y1": 2, "psi_1": 0.3, "psi_2": 0.3, "theta_1_1": 0, "theta_1_2": 0, "theta_2_1": 0}"#;
    let mut runs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("traj{k}.csv"));
        let o = ntrailer(&[
            "simulate", "--config", &cfg("one_trailer_on_axle"), "--controls", p(&trace), "--x0", x0, "--out", p(&out),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        runs.push((o.stdout, std::fs::read(&out).unwrap()));
    }
    assert_eq!(runs[0], runs[1]);
    let table = read_table(runs[0].1.as_slice()).unwrap();
    assert_eq!(table.rows.len(), 201);
    for col in ["psi_1", "psi_2"] {
        assert!(table.column(col).unwrap().iter().all(|v| *v == Some(0.3)));
    }
    let x1 = table.column("x1").unwrap();
    assert!((x1[200].unwrap() - (1.0 + 8.0 * 0.3f64.cos())).abs() < 1e-9);
    let summary: Value = serde_json::from_slice(&runs[0].0).unwrap();
    assert_eq!(summary["samples"], 201);
    assert_eq!(summary["rwa"][0]["peak_ratio"], Value::Null);
}

#[test]
fn simulate_with_noise_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let o = ntrailer(&["scenario", "--kind", "step", "--params", r#"{"units": 2, "duration": 6}"#, "--out", p(&trace)]);
    assert_eq!(code(&o), 0);
    let run = |seed: &str| {
        let out = dir.path().join(format!("traj{seed}.csv"));
        let o = ntrailer(&[
            "simulate", "--config", &cfg("one_trailer_on_axle"), "--controls", p(&trace), "--x0", "[0,0,0,0,0,0,0]",
            "--out", p(&out), "--noise-sigma-v", "0.1", "--noise-sigma-omega", "0.01", "--seed", seed,
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        std::fs::read(&out).unwrap()
    };
    assert_eq!(run("5"), run("5"));
    assert_ne!(run("5"), run("6"));
}

#[test]
fn simulate_reports_row_and_column_of_bad_csv() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("bad.csv");
    std::fs::write(&trace, "t,v,omega_1_1,omega_1_2\n0,1,0,0\n0.5,1,zero,0\n").unwrap();
    let out = dir.path().join("traj.csv");
    let o = ntrailer(&["simulate", "--config", &cfg("bicycle"), "--controls", p(&trace), "--x0", "[0,0,0,0,0]", "--out", p(&out)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3, column omega_1_1"), "{}", stderr(&o));
    assert!(!out.exists());
    let o = ntrailer(&["simulate", "--config", &cfg("bicycle"), "--controls", p(&trace), "--x0", "[0,0,0]", "--out", p(&out)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn simulate_singular_state_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    std::fs::write(&trace, "t,v,omega_1_1,omega_1_2\n0,1,0,0\n1,1,0,0\n").unwrap();
    let out = dir.path().join("traj.csv");
    let x0 = format!("[0,0,0,0,{}]", std::f64::consts::FRAC_PI_2);
    let o = ntrailer(&["simulate", "--config", &cfg("bicycle"), "--controls", p(&trace), "--x0", &x0, "--out", p(&out)]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("after sample 0"), "{}", stderr(&o));
}

#[test]
fn ackermann_corollary_and_degenerate_states() {
    let (l, t, r): (f64, f64, f64) = (2.7, 1.6, 10.0);
    let state = format!("[0,0,0,0,{}]", (l / r).atan());
    let o = ntrailer(&["ackermann", "--config", &cfg("car_ackermann"), "--state", &state, "--u", "[1,0,0]"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let angles: Value = serde_json::from_slice(&o.stdout).unwrap();
    let left = angles["theta_1_3"].as_f64().unwrap();
    let right = angles["theta_1_4"].as_f64().unwrap();
    // Output is rounded to 1e-12 rad.
    assert!((left.tan() - l / (r - t / 2.0)).abs() < 1e-11);
    assert!((right.tan() - l / (r + t / 2.0)).abs() < 1e-11);
    assert_eq!(angles["theta_1_5"], 0.0);

    let o = ntrailer(&[
        "ackermann", "--config", &cfg("semi_off_axle"), "--state", "[0,0,0,0,0,0,0]", "--u", r#"{"v": 2, "omega_1_1": 0, "omega_1_2": 0, "omega_2_1": 0}"#,
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let angles: Value = serde_json::from_slice(&o.stdout).unwrap();
    let obj = angles.as_object().unwrap();
    assert!(obj.contains_key("hitch_rear_1") && obj.contains_key("hitch_front_2"));
    assert!(obj.values().all(|v| v.as_f64() == Some(0.0)));

    let dir = tempfile::tempdir().unwrap();
    let icr = dir.path().join("icr.json");
    std::fs::write(
        &icr,
        r#"{"units": [{"label": "t", "wheels": [{"x": 0, "y": 0}, {"x": 3, "y": 0}, {"x": 0, "y": 10}], "hitch_front": null, "hitch_rear": null}]}"#,
    )
    .unwrap();
    let state = format!("[0,0,0,0,{}]", (3.0f64 / 10.0).atan());
    let o = ntrailer(&["ackermann", "--config", p(&icr), "--state", &state, "--u", "[1,0,0]"]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
}

#[test]
fn degree_configs_convert_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let deg = dir.path().join("deg.json");
    let text = std::fs::read_to_string(config_path("car_ackermann")).unwrap().replace("\"rad\"", "\"deg\"");
    std::fs::write(&deg, text).unwrap();
    let theta = (2.7f64 / 10.0).atan();
    let a = ntrailer(&["ackermann", "--config", &cfg("car_ackermann"), "--state", &format!("[0,0,0,0,{theta}]"), "--u", "[1,0,0]"]);
    let b = ntrailer(&["ackermann", "--config", p(&deg), "--state", &format!("[0,0,0,0,{}]", theta.to_degrees()), "--u", "[1,0,0]"]);
    let (a, b): (Value, Value) = (serde_json::from_slice(&a.stdout).unwrap(), serde_json::from_slice(&b.stdout).unwrap());
    for (k, v) in a.as_object().unwrap() {
        assert!((v.as_f64().unwrap() - b[k].as_f64().unwrap()).abs() < 1e-11, "{k}");
    }
}

#[test]
fn scenario_examples() {
    let o = ntrailer(&["scenario", "--kind", "sine", "--params", r#"{"steer": 0, "units": 2}"#]);
    assert_eq!(code(&o), 0);
    let trace = read_trace(o.stdout.as_slice(), 2, AngleUnit::Rad, Hold::Linear).unwrap();
    assert!(trace.controls().iter().all(|u| u[0] == 5.0 && u[1..].iter().all(|w| *w == 0.0)));

    let o = ntrailer(&["scenario", "--kind", "circle", "--params", r#"{"steer": 0.25, "speed": 4, "duration": 8}"#]);
    let trace = read_trace(o.stdout.as_slice(), 1, AngleUnit::Rad, Hold::ZeroOrder).unwrap();
    let (t, u) = (trace.times(), trace.controls());
    let mut steer = 0.0;
    for k in 0..t.len() - 1 {
        steer += u[k][2] * (t[k + 1] - t[k]);
        if t[k + 1] >= 1.5 + 1e-9 {
            assert!((steer - 0.25).abs() < 1e-12, "t={}", t[k + 1]);
        }
    }

    let o = ntrailer(&["scenario", "--kind", "step", "--params", r#"{"duration": -2}"#]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("duration"));
}

#[test]
fn produced_csv_files_reparse_under_their_schema() {
    let dir = tempfile::tempdir().unwrap();
    for (name, units, x0) in [
        ("bicycle", 1, "[0,0,0,0,0]"),
        ("triaxle_tractor", 2, "[0,0,0,0,0,0,0]"),
        ("three_trailers", 4, "[0,0,0,0,0,0,0,0,0,0,0]"),
    ] {
        let trace = dir.path().join(format!("{name}_trace.csv"));
        let params = format!(r#"{{"units": {units}, "duration": 4, "steer": 0.2}}"#);
        assert_eq!(code(&ntrailer(&["scenario", "--kind", "sine", "--params", &params, "--out", p(&trace)])), 0);
        let text = std::fs::read_to_string(&trace).unwrap();
        assert!(!text.contains('\r') && text.ends_with('\n'));
        assert_eq!(text.lines().next().unwrap(), trace_header(units).join(","));
        read_trace(text.as_bytes(), units, AngleUnit::Rad, Hold::Linear).unwrap();

        let out = dir.path().join(format!("{name}_traj.csv"));
        let o = ntrailer(&[
            "simulate", "--config", &cfg(name), "--controls", p(&trace), "--x0", x0, "--out", p(&out), "--hold", "linear",
        ]);
        assert_eq!(code(&o), 0, "{name}: {}", stderr(&o));
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(!text.contains('\r'));
        let table = read_table(text.as_bytes()).unwrap();
        let spec = common::load_config(name);
        let dependent = spec.dependent_wheels().count();
        let expected = 1 + (2 * units + 3) + dependent + 3 * units + (units - 1) + 1;
        assert_eq!(table.header.len(), expected, "{name}");
        assert_eq!(table.rows.len(), 401);
        for (c, h) in table.header.iter().enumerate() {
            let masked = h.starts_with("rwa_");
            assert!(table.rows.iter().all(|r| masked || r[c].is_some()), "{name}: empty {h}");
        }
    }
}
