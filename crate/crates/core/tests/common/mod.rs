//! Shared helpers for integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

use nalgebra::{DMatrix, Rotation2};
use ntrailer::io::parse_config;
use ntrailer::kernel::{derive_model, KernelError, KinematicModel};
use ntrailer::vehicle::{validate, Point, UnitSpec, ValidatedSpec, VehicleSpec, WheelSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{name}.json"))
}

pub fn load_config(name: &str) -> ValidatedSpec {
    let text = std::fs::read_to_string(config_path(name)).unwrap();
    validate(&parse_config(&text).unwrap().to_spec()).unwrap()
}

pub fn wheel(x: f64, y: f64) -> WheelSpec {
    WheelSpec { position: Point::new(x, y), label: String::new() }
}

/// A magnitude in [0.5, 5] with a random sign.
pub fn coord(rng: &mut impl Rng) -> f64 {
    let m = rng.random_range(0.5..=5.0);
    if rng.random_bool(0.5) {
        m
    } else {
        -m
    }
}

fn point(rng: &mut impl Rng) -> Point {
    Point::new(coord(rng), coord(rng))
}

/// Random vehicle with `n` units and up to `max_wheels` wheels per unit.
pub fn random_spec(rng: &mut impl Rng, n: usize, max_wheels: usize) -> VehicleSpec {
    let units = (1..=n)
        .map(|i| {
            let min = if i == 1 { 2 } else { 1 };
            let k = rng.random_range(min..=max_wheels.max(min));
            UnitSpec {
                wheels: (0..k).map(|_| WheelSpec { position: point(rng), label: String::new() }).collect(),
                hitch_front: (i > 1).then(|| point(rng)),
                hitch_rear: (i < n).then(|| point(rng)),
                label: format!("unit {i}"),
            }
        })
        .collect();
    VehicleSpec { units }
}

/// Random state whose model denominators all exceed 1e-3 in magnitude.
pub fn random_state(rng: &mut impl Rng, model: &KinematicModel) -> Vec<f64> {
    let strict = model.clone().with_eps_div(1e-3);
    let n = model.n();
    loop {
        let mut x = vec![rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)];
        x.extend((0..n).map(|_| rng.random_range(-PI..PI)));
        x.extend((0..n + 1).map(|_| rng.random_range(-1.2..1.2)));
        match strict.eval_f(&x) {
            Ok(_) => return x,
            Err(KernelError::SingularState(_)) => continue,
            Err(e) => panic!("{e}"),
        }
    }
}

fn perp(a: f64, v: Point) -> Point {
    Rotation2::new(a + PI / 2.0) * v
}

/// Lateral no-slip row of wheel (i,k) at steering angle `theta`, from the
/// rigid-body velocity of its contact point. Columns follow the reduced
/// state; steering-rate columns are zero.
pub fn oracle_row(spec: &ValidatedSpec, state: &[f64], i: usize, k: usize, theta: f64) -> Vec<f64> {
    let n = spec.n();
    let heading = state[1 + i] + theta;
    let normal = Point::new(-heading.sin(), heading.cos());
    let mut row = vec![0.0; 2 * n + 3];
    row[0] = normal.x;
    row[1] = normal.y;
    for m in 1..i {
        let arm = spec.hitch_rear(m).unwrap() - spec.hitch_front(m).unwrap();
        row[1 + m] = normal.dot(&perp(state[1 + m], arm));
    }
    let arm = spec.wheel(i, k).unwrap() - spec.hitch_front(i).unwrap();
    row[1 + i] = normal.dot(&perp(state[1 + i], arm));
    row
}

/// Steering angle of wheel (i,k) as stored in the reduced state, if any.
pub fn state_steer(spec: &ValidatedSpec, state: &[f64], i: usize, k: usize) -> Option<f64> {
    let n = spec.n();
    match (i, k) {
        (1, 1) => Some(state[n + 2]),
        (1, 2) => Some(state[n + 3]),
        (i, 1) => Some(state[n + 2 + i]),
        _ => None,
    }
}

/// Independent-row constraint matrix from the oracle.
pub fn oracle_matrix(spec: &ValidatedSpec, state: &[f64]) -> DMatrix<f64> {
    let mut wheels = vec![(1, 1), (1, 2)];
    wheels.extend((2..=spec.n()).map(|i| (i, 1)));
    let rows: Vec<Vec<f64>> =
        wheels.iter().map(|&(i, k)| oracle_row(spec, state, i, k, state_steer(spec, state, i, k).unwrap())).collect();
    DMatrix::from_fn(rows.len(), 2 * spec.n() + 3, |r, c| rows[r][c])
}

/// Number of singular values below `tol`, counting missing ones in a wide
/// matrix as zero.
pub fn nullity(a: &DMatrix<f64>, tol: f64) -> usize {
    let s = a.clone().svd(false, false).singular_values;
    let rank = s.iter().filter(|v| **v >= tol).count();
    a.ncols() - rank
}

pub fn derive(spec: &ValidatedSpec) -> KinematicModel {
    derive_model(spec).unwrap()
}

pub fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |a, b| a.max(b.abs()))
}
