//! Property tests for the constraint, kernel and steering modules against
//! rigid-body oracles.

mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use ntrailer::ackermann::{dependent_steer_angle, geometric_steer_angle, single_unit_tan_formula};
use ntrailer::constraints::{eval_linear, state_bindings, wheel_constraint_row};
use ntrailer::io::{emit_config, parse_config, AngleUnit, VehicleConfigFile};
use ntrailer::symbolic::{simplify, AngleSum, AngleVar, ScalarExpr};
use ntrailer::vehicle::{recover_poses, recover_poses_iterative, validate, Point, ValidatedSpec};
use proptest::prelude::*;
use rand::Rng;

fn setup(seed: u64, max_units: usize) -> (ValidatedSpec, ntrailer::kernel::KinematicModel, rand_chacha::ChaCha8Rng) {
    let mut r = rng(seed);
    let n = r.random_range(1..=max_units);
    let spec = validate(&random_spec(&mut r, n, 4)).unwrap();
    let model = derive(&spec);
    (spec, model, r)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rotate(a: f64, p: Point) -> Point {
    nalgebra::Rotation2::new(a) * p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn kernel_annihilates_independent_rows(seed in any::<u64>()) {
        let (spec, model, mut r) = setup(seed, 4);
        let x = random_state(&mut r, &model);
        let u: Vec<f64> = (0..model.control_dim()).map(|_| r.random_range(-3.0..3.0)).collect();
        let a = oracle_matrix(&spec, &x);
        let j = model.evaluate(&x).unwrap().j;
        let residual = &a * &j * DVector::from_vec(u);
        prop_assert!(residual.amax() < 1e-9, "residual {}", residual.amax());
        prop_assert_eq!(nullity(&a, 1e-8), spec.n() + 2);
    }

    #[test]
    fn symbolic_rows_match_oracle(seed in any::<u64>()) {
        let (spec, model, mut r) = setup(seed, 4);
        let x = random_state(&mut r, &model);
        for (i, k) in spec.wheels() {
            let theta = state_steer(&spec, &x, i, k).unwrap_or_else(|| r.random_range(-1.2..1.2));
            let b = state_bindings(&spec, &x, &[(AngleVar::steer(i, k), theta)]);
            let row = wheel_constraint_row(&spec, i, k).unwrap();
            let expected = oracle_row(&spec, &x, i, k, theta);
            for (c, e) in row.coefficients.iter().zip(&expected) {
                let got = ntrailer::symbolic::eval(c, &b).unwrap();
                prop_assert!((got - e).abs() < 1e-12 * (1.0 + e.abs()), "wheel ({},{}): {} vs {}", i, k, got, e);
            }
        }
    }

    #[test]
    fn resolved_dependent_wheels_do_not_slip(seed in any::<u64>()) {
        let (spec, model, mut r) = setup(seed, 4);
        let x = random_state(&mut r, &model);
        let u: Vec<f64> = (0..model.control_dim()).map(|_| r.random_range(-3.0..3.0)).collect();
        let xdot = model.state_derivative(&x, &u).unwrap();
        let scale = 1.0 + xdot.iter().map(|v| v * v).sum::<f64>().sqrt();
        for (i, k) in spec.dependent_wheels() {
            let s = match dependent_steer_angle(&spec, &model, &x, &u, i, k) {
                Ok(s) => s,
                Err(_) => continue,
            };
            let row = wheel_constraint_row(&spec, i, k).unwrap();
            let b = state_bindings(&spec, &x, &[(AngleVar::steer(i, k), s.angle)]);
            let lateral = eval_linear(&row.coefficients, &b, &xdot).unwrap();
            prop_assert!(lateral.abs() < 1e-9 * scale, "wheel ({},{}): {}", i, k, lateral);
            let oracle = dot(&oracle_row(&spec, &x, i, k, s.angle), &xdot);
            prop_assert!(oracle.abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn yaw_rates_are_triangular(seed in any::<u64>()) {
        let (spec, model, _) = setup(seed, 4);
        for i in 1..=spec.n() {
            for v in model.f[1 + i].angle_vars() {
                prop_assert!(v.unit() <= i, "f_psi_{} depends on {}", i, v.name());
            }
        }
    }

    #[test]
    fn poses_agree_and_hitches_coincide(seed in any::<u64>()) {
        let (spec, model, mut r) = setup(seed, 4);
        let x = random_state(&mut r, &model);
        let a = recover_poses(&spec, &x).unwrap();
        let b = recover_poses_iterative(&spec, &x).unwrap();
        for (p, q) in a.iter().zip(&b) {
            prop_assert!((p.p - q.p).norm() < 1e-12 && p.psi == q.psi);
        }
        for i in 1..spec.n() {
            let rear = a[i - 1].p + rotate(a[i - 1].psi, spec.hitch_rear(i).unwrap());
            let front = a[i].p + rotate(a[i].psi, spec.hitch_front(i + 1).unwrap());
            prop_assert!((rear - front).norm() < 1e-12);
        }
        let wheel = a[0].p + rotate(a[0].psi, spec.wheel(1, 1).unwrap());
        prop_assert!((wheel - Point::new(x[0], x[1])).norm() < 1e-15);
    }

    #[test]
    fn rebasing_does_not_change_the_model(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=3);
        let raw = random_spec(&mut r, n, 3);
        let mut shifted = raw.clone();
        for unit in &mut shifted.units {
            let d = Point::new(r.random_range(-4.0..4.0), r.random_range(-4.0..4.0));
            for w in &mut unit.wheels {
                w.position += d;
            }
            for h in [&mut unit.hitch_front, &mut unit.hitch_rear].into_iter().flatten() {
                *h += d;
            }
        }
        let (a, b) = (validate(&raw).unwrap(), validate(&shifted).unwrap());
        for ((ka, va), (kb, vb)) in a.param_values().iter().zip(b.param_values().iter()) {
            prop_assert_eq!(ka, kb);
            prop_assert!((va - vb).abs() < 1e-12);
        }
        let (ma, mb) = (derive(&a), derive(&b));
        let x = random_state(&mut r, &ma);
        if let (Ok(fa), Ok(fb)) = (ma.eval_f(&x), mb.eval_f(&x)) {
            for (p, q) in fa.iter().zip(&fb) {
                prop_assert!((p - q).abs() < 1e-9 * (1.0 + p.abs()));
            }
        }
    }

    #[test]
    fn tan_formula_matches_resolved_angle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut raw = random_spec(&mut r, 1, 4);
        while raw.units[0].wheels.len() < 3 {
            raw.units[0].wheels.push(wheel(coord(&mut r), coord(&mut r)));
        }
        let spec = validate(&raw).unwrap();
        let model = derive(&spec);
        let x = random_state(&mut r, &model);
        let u = [r.random_range(0.5..3.0), 0.0, 0.0];
        let w2 = spec.wheel(1, 2).unwrap();
        for k in 3..=spec.wheel_count(1) {
            let wk = spec.wheel(1, k).unwrap();
            let (Ok(s), Ok(t)) = (
                dependent_steer_angle(&spec, &model, &x, &u, 1, k),
                single_unit_tan_formula(w2.x, w2.y, wk.x, wk.y, x[3], x[4]),
            ) else { continue };
            if s.angle.cos().abs() < 1e-3 {
                continue;
            }
            let got = s.angle.tan();
            prop_assert!((got - t).abs() <= 1e-10 * (1.0 + t.abs()), "wheel {}: {} vs {}", k, got, t);
        }
    }

    #[test]
    fn wheel_normals_meet_at_one_center(seed in any::<u64>()) {
        let (spec, model, mut r) = setup(seed, 3);
        let x = random_state(&mut r, &model);
        let rates = model.eval_f(&x).unwrap();
        let poses = recover_poses(&spec, &x).unwrap();
        for i in 1..=spec.n() {
            if rates[1 + i].abs() < 1e-2 {
                continue;
            }
            // Contact point and rolling direction of every wheel, world frame.
            let mut lines = Vec::new();
            for k in 1..=spec.wheel_count(i) {
                let theta = match state_steer(&spec, &x, i, k) {
                    Some(t) => t,
                    None => {
                        let s = geometric_steer_angle(&spec, &model, &x, i, spec.wheel(i, k).unwrap()).unwrap();
                        if s.degenerate { continue; }
                        s.angle
                    }
                };
                let p = poses[i - 1].p + rotate(poses[i - 1].psi, spec.wheel(i, k).unwrap());
                let h = poses[i - 1].psi + theta;
                lines.push((p, Point::new(h.cos(), h.sin())));
            }
            // The center c satisfies dir . (c - p) = 0 for every wheel.
            let a = DMatrix::from_fn(lines.len(), 2, |row, c| lines[row].1[c]);
            let b = DVector::from_iterator(lines.len(), lines.iter().map(|(p, d)| d.dot(p)));
            if lines.len() < 2 {
                continue;
            }
            let c = a.clone().svd(true, true).solve(&b, 1e-12).unwrap();
            let c = Point::new(c[0], c[1]);
            for (p, d) in &lines {
                let miss = d.dot(&(c - p)).abs();
                prop_assert!(miss < 1e-8 * (1.0 + (c - p).norm() * 1e-3), "unit {}: {}", i, miss);
            }
        }
    }

    #[test]
    fn config_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=4);
        let spec = validate(&random_spec(&mut r, n, 4)).unwrap();
        let text = emit_config(&VehicleConfigFile::from_spec(spec.spec(), AngleUnit::Rad));
        let back = validate(&parse_config(&text).unwrap().to_spec()).unwrap();
        prop_assert_eq!(back.spec(), spec.spec());
    }
}

#[test]
fn tractor_yaw_rate_is_the_closed_form() {
    let mut r = rng(11);
    for _ in 0..20 {
        let raw = random_spec(&mut r, 1, 2);
        let spec = validate(&raw).unwrap();
        let model = derive(&spec);
        let (t1, t2) = (AngleSum::var(AngleVar::steer(1, 1)), AngleSum::var(AngleVar::steer(1, 2)));
        let expected = ScalarExpr::quotient(
            ScalarExpr::sin(t2.clone() - t1),
            ScalarExpr::sum(vec![
                ScalarExpr::param("a_1_2") * ScalarExpr::cos(t2.clone()),
                ScalarExpr::param("b_1_2") * ScalarExpr::sin(t2),
            ]),
        )
        .unwrap();
        assert_eq!(model.f[2], simplify(&expected));
    }
}

#[test]
fn ackermann_corollary_grid() {
    for l in [2.0, 3.0, 4.0] {
        for t in [1.5, 2.0] {
            for radius in [8.0, 10.0, 20.0] {
                let spec = validate(&ntrailer::vehicle::VehicleSpec {
                    units: vec![ntrailer::vehicle::UnitSpec {
                        wheels: vec![wheel(0.0, 0.0), wheel(l, 0.0), wheel(l, t / 2.0), wheel(l, -t / 2.0)],
                        hitch_front: None,
                        hitch_rear: None,
                        label: String::new(),
                    }],
                })
                .unwrap();
                let model = derive(&spec);
                let x = [0.0, 0.0, 0.0, 0.0, (l / radius).atan()];
                let u = [1.0, 0.0, 0.0];
                let left = dependent_steer_angle(&spec, &model, &x, &u, 1, 3).unwrap().angle;
                let right = dependent_steer_angle(&spec, &model, &x, &u, 1, 4).unwrap().angle;
                assert!((left.tan() - l / (radius - t / 2.0)).abs() < 1e-12);
                assert!((right.tan() - l / (radius + t / 2.0)).abs() < 1e-12);
            }
        }
    }
}
