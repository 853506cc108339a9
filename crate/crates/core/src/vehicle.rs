//! Vehicle description, validation and coordinate layouts.
//!
//! Units and wheels are 1-based throughout. Each unit's body frame sits on its
//! first wheel; [`validate`] translates user coordinates onto that convention.
//! The independently steered wheels are wheels 1 and 2 of the tractor and
//! wheel 1 of every trailer, so configs list those wheels first.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{Rotation2, Vector2};
use thiserror::Error;

use crate::symbolic::{AngleVar, ScalarExpr, Vec2Sym};

pub type Point = Vector2<f64>;

#[derive(Clone, Debug, PartialEq)]
pub struct WheelSpec {
    pub position: Point,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnitSpec {
    pub wheels: Vec<WheelSpec>,
    pub hitch_front: Option<Point>,
    pub hitch_rear: Option<Point>,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VehicleSpec {
    pub units: Vec<UnitSpec>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VehicleError {
    #[error("vehicle has no units")]
    EmptyVehicle,
    #[error("unit {0} needs a front hitch")]
    MissingHitch(usize),
    #[error("unit {unit} must not have a {which} hitch")]
    UnexpectedHitch { unit: usize, which: &'static str },
    #[error("tractor needs at least two wheels")]
    TractorTooFewWheels,
    #[error("unit {0} has no wheels")]
    NoWheels(usize),
    #[error("non-finite coordinate in unit {unit} ({what})")]
    NonFinite { unit: usize, what: String },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
}

/// Emitted when a unit frame was translated onto its first wheel.
#[derive(Clone, Debug, PartialEq)]
pub struct RebaseWarning {
    pub unit: usize,
    pub shift: Point,
}

impl fmt::Display for RebaseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unit {} rebased onto wheel 1: coordinates shifted by ({}, {})",
            self.unit, self.shift.x, self.shift.y
        )
    }
}

/// A vehicle whose unit frames sit on wheel 1 and whose hitches are consistent.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidatedSpec {
    spec: VehicleSpec,
    warnings: Vec<RebaseWarning>,
}

pub fn validate(spec: &VehicleSpec) -> Result<ValidatedSpec, VehicleError> {
    let n = spec.units.len();
    if n == 0 {
        return Err(VehicleError::EmptyVehicle);
    }
    let mut units = Vec::with_capacity(n);
    let mut warnings = Vec::new();
    for (idx, u) in spec.units.iter().enumerate() {
        let i = idx + 1;
        if u.wheels.is_empty() {
            return Err(if i == 1 { VehicleError::TractorTooFewWheels } else { VehicleError::NoWheels(i) });
        }
        if i == 1 && u.wheels.len() < 2 {
            return Err(VehicleError::TractorTooFewWheels);
        }
        if i == 1 && u.hitch_front.is_some() {
            return Err(VehicleError::UnexpectedHitch { unit: 1, which: "front" });
        }
        if i > 1 && u.hitch_front.is_none() {
            return Err(VehicleError::MissingHitch(i));
        }
        if i < n && u.hitch_rear.is_none() {
            return Err(VehicleError::MissingHitch(i));
        }
        if i == n && u.hitch_rear.is_some() {
            return Err(VehicleError::UnexpectedHitch { unit: i, which: "rear" });
        }
        let finite = |p: &Point| p.x.is_finite() && p.y.is_finite();
        for (k, w) in u.wheels.iter().enumerate() {
            if !finite(&w.position) {
                return Err(VehicleError::NonFinite { unit: i, what: format!("wheel {}", k + 1) });
            }
        }
        for (what, h) in [("front hitch", &u.hitch_front), ("rear hitch", &u.hitch_rear)] {
            if h.as_ref().is_some_and(|p| !finite(p)) {
                return Err(VehicleError::NonFinite { unit: i, what: what.into() });
            }
        }

        let origin = u.wheels[0].position;
        if origin != Point::zeros() {
            warnings.push(RebaseWarning { unit: i, shift: -origin });
        }
        units.push(UnitSpec {
            wheels: u
                .wheels
                .iter()
                .map(|w| WheelSpec { position: w.position - origin, label: w.label.clone() })
                .collect(),
            hitch_front: u.hitch_front.map(|h| h - origin),
            hitch_rear: u.hitch_rear.map(|h| h - origin),
            label: u.label.clone(),
        });
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(ValidatedSpec { spec: VehicleSpec { units }, warnings })
}

/// True for the wheels whose steering angles are part of the reduced state.
pub fn is_independent(unit: usize, wheel: usize) -> bool {
    (unit == 1 && wheel <= 2) || (unit > 1 && wheel == 1)
}

impl ValidatedSpec {
    pub fn spec(&self) -> &VehicleSpec {
        &self.spec
    }

    pub fn warnings(&self) -> &[RebaseWarning] {
        &self.warnings
    }

    /// Number of units.
    pub fn n(&self) -> usize {
        self.spec.units.len()
    }

    pub fn unit(&self, i: usize) -> Result<&UnitSpec, VehicleError> {
        i.checked_sub(1)
            .and_then(|j| self.spec.units.get(j))
            .ok_or_else(|| VehicleError::IndexOutOfRange(format!("unit {i}")))
    }

    pub fn wheel_count(&self, i: usize) -> usize {
        self.spec.units.get(i.wrapping_sub(1)).map_or(0, |u| u.wheels.len())
    }

    pub fn check_wheel(&self, i: usize, k: usize) -> Result<(), VehicleError> {
        if k >= 1 && k <= self.wheel_count(i) {
            Ok(())
        } else {
            Err(VehicleError::IndexOutOfRange(format!("wheel ({i},{k})")))
        }
    }

    pub fn wheel(&self, i: usize, k: usize) -> Result<Point, VehicleError> {
        self.check_wheel(i, k)?;
        Ok(self.spec.units[i - 1].wheels[k - 1].position)
    }

    /// Front hitch in body coordinates; zero for the tractor.
    pub fn hitch_front(&self, i: usize) -> Result<Point, VehicleError> {
        Ok(self.unit(i)?.hitch_front.unwrap_or_else(Point::zeros))
    }

    /// Rear hitch in body coordinates; zero for the last unit.
    pub fn hitch_rear(&self, i: usize) -> Result<Point, VehicleError> {
        Ok(self.unit(i)?.hitch_rear.unwrap_or_else(Point::zeros))
    }

    /// Total number of wheels.
    pub fn total_wheels(&self) -> usize {
        self.spec.units.iter().map(|u| u.wheels.len()).sum()
    }

    /// All `(unit, wheel)` pairs in order.
    pub fn wheels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.spec
            .units
            .iter()
            .enumerate()
            .flat_map(|(i, u)| (1..=u.wheels.len()).map(move |k| (i + 1, k)))
    }

    pub fn dependent_wheels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.wheels().filter(|&(i, k)| !is_independent(i, k))
    }

    /// Numeric values of every geometry parameter, keyed by name.
    pub fn param_values(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        for (idx, u) in self.spec.units.iter().enumerate() {
            let i = idx + 1;
            for (k, w) in u.wheels.iter().enumerate() {
                out.insert(format!("a_{i}_{}", k + 1), w.position.x);
                out.insert(format!("b_{i}_{}", k + 1), w.position.y);
            }
            if let Some(h) = u.hitch_front {
                out.insert(format!("hf_{i}_x"), h.x);
                out.insert(format!("hf_{i}_y"), h.y);
            }
            if let Some(h) = u.hitch_rear {
                out.insert(format!("hr_{i}_x"), h.x);
                out.insert(format!("hr_{i}_y"), h.y);
            }
        }
        out
    }

    pub fn wheel_sym(&self, i: usize, k: usize) -> Result<Vec2Sym, VehicleError> {
        let p = self.wheel(i, k)?;
        Ok(sym_point(p, &format!("a_{i}_{k}"), &format!("b_{i}_{k}")))
    }

    pub fn hitch_front_sym(&self, i: usize) -> Result<Vec2Sym, VehicleError> {
        let p = self.hitch_front(i)?;
        Ok(sym_point(p, &format!("hf_{i}_x"), &format!("hf_{i}_y")))
    }

    pub fn hitch_rear_sym(&self, i: usize) -> Result<Vec2Sym, VehicleError> {
        let p = self.hitch_rear(i)?;
        Ok(sym_point(p, &format!("hr_{i}_x"), &format!("hr_{i}_y")))
    }
}

/// Geometry entries that are exactly zero become the constant 0 so the
/// symbolic model drops the terms they annihilate.
fn sym_point(p: Point, xname: &str, yname: &str) -> Vec2Sym {
    let s = |v: f64, name: &str| if v == 0.0 { ScalarExpr::zero() } else { ScalarExpr::param(name) };
    Vec2Sym::new(s(p.x, xname), s(p.y, yname))
}

/// One coordinate of the reduced or full configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coordinate {
    X1,
    Y1,
    Yaw(usize),
    Steer(usize, usize),
}

impl Coordinate {
    pub fn name(&self) -> String {
        match *self {
            Coordinate::X1 => "x1".into(),
            Coordinate::Y1 => "y1".into(),
            Coordinate::Yaw(i) => AngleVar::yaw(i).name(),
            Coordinate::Steer(i, k) => AngleVar::steer(i, k).name(),
        }
    }

    pub fn angle_var(&self) -> Option<AngleVar> {
        match *self {
            Coordinate::Yaw(i) => Some(AngleVar::yaw(i)),
            Coordinate::Steer(i, k) => Some(AngleVar::steer(i, k)),
            _ => None,
        }
    }
}

/// Reduced state `(x1, y1, psi_1..psi_n, theta_1_1, theta_1_2, theta_2_1..theta_n_1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateLayout {
    n: usize,
    coords: Vec<Coordinate>,
}

impl StateLayout {
    pub fn new(n: usize) -> Self {
        let mut coords = vec![Coordinate::X1, Coordinate::Y1];
        coords.extend((1..=n).map(Coordinate::Yaw));
        coords.push(Coordinate::Steer(1, 1));
        coords.push(Coordinate::Steer(1, 2));
        coords.extend((2..=n).map(|i| Coordinate::Steer(i, 1)));
        StateLayout { n, coords }
    }

    pub fn units(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Coordinate] {
        &self.coords
    }

    pub fn names(&self) -> Vec<String> {
        self.coords.iter().map(Coordinate::name).collect()
    }

    pub fn yaw_index(&self, i: usize) -> usize {
        1 + i
    }

    /// Index of an independent steering coordinate.
    pub fn steer_index(&self, i: usize, k: usize) -> Option<usize> {
        match (i, k) {
            (1, 1) => Some(self.n + 2),
            (1, 2) => Some(self.n + 3),
            (i, 1) if i >= 2 && i <= self.n => Some(self.n + 2 + i),
            _ => None,
        }
    }

    pub fn index_of(&self, c: Coordinate) -> Option<usize> {
        self.coords.iter().position(|x| *x == c)
    }

    /// The angle variables of the state, in layout order starting at index 2.
    pub fn angle_vars(&self) -> Vec<AngleVar> {
        self.coords.iter().filter_map(Coordinate::angle_var).collect()
    }
}

pub fn state_layout(spec: &ValidatedSpec) -> StateLayout {
    StateLayout::new(spec.n())
}

/// Full configuration layout: the reduced state followed by every dependent
/// steering angle.
pub fn full_layout(spec: &ValidatedSpec) -> Vec<Coordinate> {
    let mut c = StateLayout::new(spec.n()).coords;
    c.extend(spec.dependent_wheels().map(|(i, k)| Coordinate::Steer(i, k)));
    c
}

/// Position and heading of one unit frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub p: Point,
    pub psi: f64,
}

fn rot(a: f64) -> Rotation2<f64> {
    Rotation2::new(a)
}

fn check_state(spec: &ValidatedSpec, state: &[f64]) -> Result<(), VehicleError> {
    let dim = 2 * spec.n() + 3;
    if state.len() != dim {
        return Err(VehicleError::IndexOutOfRange(format!(
            "state has {} entries, expected {dim}",
            state.len()
        )));
    }
    Ok(())
}

/// Unit poses from the sum of hitch offsets along the chain.
pub fn recover_poses(spec: &ValidatedSpec, state: &[f64]) -> Result<Vec<Pose>, VehicleError> {
    check_state(spec, state)?;
    let p1 = Point::new(state[0], state[1]);
    let psi = |i: usize| state[1 + i];
    let mut poses = Vec::with_capacity(spec.n());
    let mut chain = p1;
    for i in 1..=spec.n() {
        let p = chain - rot(psi(i)) * spec.hitch_front(i)?;
        poses.push(Pose { p, psi: psi(i) });
        chain += rot(psi(i)) * (spec.hitch_rear(i)? - spec.hitch_front(i)?);
    }
    Ok(poses)
}

/// Unit poses by walking hitch to hitch.
pub fn recover_poses_iterative(spec: &ValidatedSpec, state: &[f64]) -> Result<Vec<Pose>, VehicleError> {
    check_state(spec, state)?;
    let mut poses = vec![Pose { p: Point::new(state[0], state[1]), psi: state[2] }];
    for i in 2..=spec.n() {
        let prev = poses[i - 2];
        let psi = state[1 + i];
        let p = prev.p + rot(prev.psi) * spec.hitch_rear(i - 1)? - rot(psi) * spec.hitch_front(i)?;
        poses.push(Pose { p, psi });
    }
    Ok(poses)
}

/// Inertial location of a wheel contact point.
pub fn wheel_world_position(
    spec: &ValidatedSpec,
    state: &[f64],
    i: usize,
    k: usize,
) -> Result<Point, VehicleError> {
    let w = spec.wheel(i, k)?;
    let pose = recover_poses(spec, state)?[i - 1];
    Ok(pose.p + rot(pose.psi) * w)
}
