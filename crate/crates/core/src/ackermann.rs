//! Steering angles of dependent wheels and virtual hitch steering.
//!
//! Every body-fixed point of a unit moves along a direction set by the
//! kinematic model, and a wheel at that point rolls without slipping only if
//! it is aligned with that direction. The angle is reported modulo a half
//! turn, in `(-pi/2, pi/2]`, so it does not flip when the vehicle reverses.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Rotation2;
use thiserror::Error;

use crate::kernel::{KernelError, KinematicModel};
use crate::vehicle::{Point, ValidatedSpec, VehicleError};

/// Default speed below which a point is considered at rest.
pub const DEFAULT_EPS_V: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AckermannError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Vehicle(#[from] VehicleError),
    #[error("point on unit {unit} is at rest; steering angle undefined")]
    DegeneratePoint { unit: usize },
    #[error("closed-form denominator vanishes")]
    SingularDenominator,
    #[error("unit {unit} has no {which} hitch")]
    NoHitch { unit: usize, which: &'static str },
}

/// World-frame velocity of a point fixed to `unit`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointVelocity {
    pub v: Point,
    pub unit: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteeringSolution {
    /// Radians relative to the unit heading; 0 when degenerate.
    pub angle: f64,
    pub degenerate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HitchSide {
    Front,
    Rear,
}

/// Wraps an angle into `(-pi/2, pi/2]`.
pub fn wrap_half_turn(a: f64) -> f64 {
    let mut r = (a + FRAC_PI_2).rem_euclid(PI) - FRAC_PI_2;
    if r <= -FRAC_PI_2 {
        r += PI;
    }
    r
}

/// Velocity of the body point `p_body` of unit `i`, given the state
/// derivative `xdot`.
pub fn point_velocity_from_rates(
    spec: &ValidatedSpec,
    state: &[f64],
    xdot: &[f64],
    i: usize,
    p_body: Point,
) -> Result<PointVelocity, VehicleError> {
    spec.unit(i)?;
    let perp = |a: f64| Rotation2::new(a + FRAC_PI_2);
    let mut v = Point::new(xdot[0], xdot[1]);
    for m in 1..i {
        let offset = spec.hitch_rear(m)? - spec.hitch_front(m)?;
        v += perp(state[1 + m]) * offset * xdot[1 + m];
    }
    v += perp(state[1 + i]) * (p_body - spec.hitch_front(i)?) * xdot[1 + i];
    Ok(PointVelocity { v, unit: i })
}

pub fn point_velocity(
    spec: &ValidatedSpec,
    model: &KinematicModel,
    state: &[f64],
    u: &[f64],
    i: usize,
    p_body: Point,
) -> Result<PointVelocity, AckermannError> {
    let xdot = model.state_derivative(state, u)?;
    Ok(point_velocity_from_rates(spec, state, &xdot, i, p_body)?)
}

fn solve_direction(v: PointVelocity, psi: f64, eps_v: f64) -> Result<f64, AckermannError> {
    if !(v.v.norm() >= eps_v) {
        return Err(AckermannError::DegeneratePoint { unit: v.unit });
    }
    Ok(wrap_half_turn(v.v.y.atan2(v.v.x) - psi))
}

/// Steering angle that keeps the wheel (i,k) rolling without slip.
pub fn dependent_steer_angle(
    spec: &ValidatedSpec,
    model: &KinematicModel,
    state: &[f64],
    u: &[f64],
    i: usize,
    k: usize,
) -> Result<SteeringSolution, AckermannError> {
    let v = point_velocity(spec, model, state, u, i, spec.wheel(i, k)?)?;
    let angle = solve_direction(v, state[1 + i], DEFAULT_EPS_V)?;
    Ok(SteeringSolution { angle, degenerate: false })
}

/// Virtual steering angle at a hitch of unit `i`.
pub fn virtual_hitch_steer(
    spec: &ValidatedSpec,
    model: &KinematicModel,
    state: &[f64],
    u: &[f64],
    i: usize,
    which: HitchSide,
) -> Result<SteeringSolution, AckermannError> {
    let unit = spec.unit(i)?;
    let (hitch, name) = match which {
        HitchSide::Front => (unit.hitch_front, "front"),
        HitchSide::Rear => (unit.hitch_rear, "rear"),
    };
    let p = hitch.ok_or(AckermannError::NoHitch { unit: i, which: name })?;
    let v = point_velocity(spec, model, state, u, i, p)?;
    let angle = solve_direction(v, state[1 + i], DEFAULT_EPS_V)?;
    Ok(SteeringSolution { angle, degenerate: false })
}

/// Steering angle for a body point from the state alone.
///
/// Point velocities scale with the speed control, so the direction taken
/// modulo a half turn does not depend on it. Only the instantaneous center
/// of rotation itself is degenerate.
pub fn geometric_steer_angle(
    spec: &ValidatedSpec,
    model: &KinematicModel,
    state: &[f64],
    i: usize,
    p_body: Point,
) -> Result<SteeringSolution, AckermannError> {
    let mut u = vec![0.0; model.control_dim()];
    u[0] = 1.0;
    let v = point_velocity(spec, model, state, &u, i, p_body)?;
    Ok(match solve_direction(v, state[1 + i], DEFAULT_EPS_V) {
        Ok(angle) => SteeringSolution { angle, degenerate: false },
        Err(AckermannError::DegeneratePoint { .. }) => SteeringSolution { angle: 0.0, degenerate: true },
        Err(e) => return Err(e),
    })
}

/// Steering solutions keyed by (unit, wheel).
pub type WheelAngles = Vec<((usize, usize), SteeringSolution)>;

/// Resolves every dependent wheel of the vehicle at `state`.
pub fn resolve_dependent_angles(
    spec: &ValidatedSpec,
    model: &KinematicModel,
    state: &[f64],
) -> Result<WheelAngles, AckermannError> {
    spec.dependent_wheels()
        .map(|(i, k)| Ok(((i, k), geometric_steer_angle(spec, model, state, i, spec.wheel(i, k)?)?)))
        .collect()
}

/// `tan` of the steering angle of tractor wheel k, from the positions of
/// wheels 2 and k and the two independent steering angles.
pub fn single_unit_tan_formula(
    a2: f64,
    b2: f64,
    ak: f64,
    bk: f64,
    theta1: f64,
    theta2: f64,
) -> Result<f64, AckermannError> {
    let (t1, t2) = (theta1.tan(), theta2.tan());
    let num = (a2 - ak) * t1 + (ak + b2 * t1) * t2;
    let den = a2 + (b2 - bk) * t2 + bk * t1;
    if !(den.abs() >= crate::symbolic::DEFAULT_EPS_DIV) {
        return Err(AckermannError::SingularDenominator);
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::derive_model;
    use crate::vehicle::tests::unit;
    use crate::vehicle::{recover_poses, validate, VehicleSpec};

    fn car(l: f64, t: f64) -> ValidatedSpec {
        validate(&VehicleSpec {
            units: vec![unit(&[(0.0, 0.0), (l, 0.0), (l, t / 2.0), (l, -t / 2.0), (0.0, t / 2.0)], None, None)],
        })
        .unwrap()
    }

    #[test]
    fn wrapping() {
        assert!(wrap_half_turn(PI).abs() < 1e-15);
        assert!((wrap_half_turn(PI + 0.2) - 0.2).abs() < 1e-15);
        assert!((wrap_half_turn(-0.3) + 0.3).abs() < 1e-15);
        assert_eq!(wrap_half_turn(FRAC_PI_2), FRAC_PI_2);
        assert_eq!(wrap_half_turn(-FRAC_PI_2), FRAC_PI_2);
    }

    #[test]
    fn classical_ackermann() {
        let (l, t, r) = (3.0, 2.0, 10.0);
        let spec = car(l, t);
        let m = derive_model(&spec).unwrap();
        let x = [0.0, 0.0, 0.0, 0.0, (l / r).atan()];
        let u = [5.0, 0.0, 0.0];
        let left = dependent_steer_angle(&spec, &m, &x, &u, 1, 3).unwrap();
        let right = dependent_steer_angle(&spec, &m, &x, &u, 1, 4).unwrap();
        assert!((left.angle - (3.0f64 / 9.0).atan()).abs() < 1e-12);
        assert!((right.angle - (3.0f64 / 11.0).atan()).abs() < 1e-12);
        let rear = dependent_steer_angle(&spec, &m, &x, &u, 1, 5).unwrap();
        assert!(rear.angle.abs() < 1e-12);
        let tan = single_unit_tan_formula(l, 0.0, l, t / 2.0, 0.0, x[4]).unwrap();
        assert!((tan - left.angle.tan()).abs() < 1e-12);
    }

    #[test]
    fn straight_and_reverse() {
        let spec = car(3.0, 2.0);
        let m = derive_model(&spec).unwrap();
        let x = [1.0, 2.0, 0.4, 0.0, 0.0];
        for v in [2.0, -2.0] {
            let s = dependent_steer_angle(&spec, &m, &x, &[v, 0.0, 0.0], 1, 3).unwrap();
            assert!(s.angle.abs() < 1e-12);
        }
        let x = [0.0, 0.0, 0.0, 0.0, 0.3];
        let fwd = dependent_steer_angle(&spec, &m, &x, &[1.0, 0.0, 0.0], 1, 3).unwrap();
        let back = dependent_steer_angle(&spec, &m, &x, &[-1.0, 0.0, 0.0], 1, 3).unwrap();
        assert!((fwd.angle - back.angle).abs() < 1e-12);
    }

    #[test]
    fn rest_is_degenerate() {
        let spec = car(3.0, 2.0);
        let m = derive_model(&spec).unwrap();
        let x = [0.0, 0.0, 0.0, 0.0, 0.3];
        let err = dependent_steer_angle(&spec, &m, &x, &[0.0, 0.0, 0.0], 1, 3).unwrap_err();
        assert_eq!(err, AckermannError::DegeneratePoint { unit: 1 });
        // A point at the rotation center has no direction either.
        let icr = Point::new(0.0, 3.0 / 0.3f64.tan());
        assert!(geometric_steer_angle(&spec, &m, &x, 1, icr).unwrap().degenerate);
    }

    #[test]
    fn same_position_same_angle() {
        let spec = validate(&VehicleSpec {
            units: vec![unit(&[(0.0, 0.0), (3.0, 0.5), (3.0, 0.5)], None, None)],
        })
        .unwrap();
        let m = derive_model(&spec).unwrap();
        let x = [0.0, 0.0, 0.2, 0.1, 0.35];
        let s = dependent_steer_angle(&spec, &m, &x, &[1.0, 0.0, 0.0], 1, 3).unwrap();
        assert!((s.angle - 0.35).abs() < 1e-12);
    }

    #[test]
    fn hitch_velocity_is_perpendicular_to_radius() {
        let spec = validate(&VehicleSpec {
            units: vec![
                unit(&[(0.0, 0.0), (3.0, 0.0)], None, Some((-1.0, 0.0))),
                unit(&[(0.0, 0.0)], Some((4.0, 0.0)), None),
            ],
        })
        .unwrap();
        let m = derive_model(&spec).unwrap();
        let th = 0.25;
        let x = [0.0, 0.0, 0.0, 0.0, 0.0, th, 0.0];
        let u = [2.0, 0.0, 0.0, 0.0];
        let s = virtual_hitch_steer(&spec, &m, &x, &u, 1, HitchSide::Rear).unwrap();
        let icr = Point::new(0.0, 3.0 / th.tan());
        let radius = Point::new(-1.0, 0.0) - icr;
        let dir = Point::new(s.angle.cos(), s.angle.sin());
        assert!(radius.dot(&dir).abs() < 1e-10);
        assert!(s.angle.abs() > 1e-3);

        let on_axle = validate(&VehicleSpec {
            units: vec![
                unit(&[(0.0, 0.0), (3.0, 0.0)], None, Some((0.0, 0.0))),
                unit(&[(0.0, 0.0)], Some((4.0, 0.0)), None),
            ],
        })
        .unwrap();
        let m = derive_model(&on_axle).unwrap();
        let s = virtual_hitch_steer(&on_axle, &m, &x, &u, 1, HitchSide::Rear).unwrap();
        assert!(s.angle.abs() < 1e-12);
        assert!(virtual_hitch_steer(&on_axle, &m, &x, &u, 1, HitchSide::Front).is_err());
        let poses = recover_poses(&on_axle, &x).unwrap();
        assert_eq!(poses.len(), 2);
    }
}
