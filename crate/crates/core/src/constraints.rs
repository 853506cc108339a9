//! Rolling-without-slipping constraints in Pfaffian form.
//!
//! Every wheel contributes one row over the state velocities
//! `(x1', y1', psi_1'..psi_n', steering rates)`: the lateral component of its
//! contact-point velocity expressed in the wheel frame. The longitudinal
//! component of the same expression is the wheel speed.

use crate::symbolic::{rot, simplify, transpose_rot, AngleSum, AngleVar, Bindings, EvalError, ScalarExpr, Vec2Sym};
use crate::vehicle::{is_independent, Coordinate, StateLayout, ValidatedSpec, VehicleError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    Independent,
    Dependent,
}

/// One Pfaffian row; `coefficients` follows the state layout.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintRow {
    pub source: (usize, usize),
    pub kind: RowKind,
    pub coefficients: Vec<ScalarExpr>,
}

impl ConstraintRow {
    pub fn coefficient(&self, layout: &StateLayout, c: Coordinate) -> Option<&ScalarExpr> {
        layout.index_of(c).map(|i| &self.coefficients[i])
    }
}

/// Constraint rows of the independent wheels, in the order
/// (1,1), (1,2), (2,1), ..., (n,1).
#[derive(Clone, Debug, PartialEq)]
pub struct PfaffianMatrix {
    pub rows: Vec<ConstraintRow>,
    pub layout: StateLayout,
}

impl PfaffianMatrix {
    pub fn entries(&self) -> Vec<ScalarExpr> {
        self.rows.iter().flat_map(|r| r.coefficients.iter().cloned()).collect()
    }
}

/// A linear form in the state velocities.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearForm {
    pub coefficients: Vec<ScalarExpr>,
}

fn yaw(i: usize) -> AngleSum {
    AngleSum::var(AngleVar::yaw(i))
}

fn steer(i: usize, k: usize) -> AngleSum {
    AngleSum::var(AngleVar::steer(i, k))
}

/// Contribution of unit `m`'s yaw rate to the velocity of wheel (i,k), in the
/// wheel frame.
pub fn intermediate_term(spec: &ValidatedSpec, i: usize, m: usize, k: usize) -> Result<Vec2Sym, VehicleError> {
    spec.check_wheel(i, k)?;
    if m == 0 || m >= i {
        return Err(VehicleError::IndexOutOfRange(format!("intermediate unit {m} for unit {i}")));
    }
    let offset = spec.hitch_rear_sym(m)?.sub(&spec.hitch_front_sym(m)?);
    let angle = (yaw(m) - yaw(i) - steer(i, k)).with_offset(1);
    Ok(rot(&angle).apply(&offset))
}

/// Contribution of unit `i`'s own yaw rate to the velocity of wheel (i,k).
pub fn self_term(spec: &ValidatedSpec, i: usize, k: usize) -> Result<Vec2Sym, VehicleError> {
    let offset = spec.wheel_sym(i, k)?.sub(&spec.hitch_front_sym(i)?);
    let angle = (-steer(i, k)).with_offset(1);
    Ok(rot(&angle).apply(&offset))
}

/// Both rows of the wheel-frame velocity map for wheel (i,k).
fn velocity_rows(spec: &ValidatedSpec, i: usize, k: usize) -> Result<[Vec<ScalarExpr>; 2], VehicleError> {
    spec.check_wheel(i, k)?;
    let layout = StateLayout::new(spec.n());
    let dim = layout.dim();
    let mut rows = [vec![ScalarExpr::zero(); dim], vec![ScalarExpr::zero(); dim]];
    let heading = transpose_rot(&(yaw(i) + steer(i, k)));
    for (r, row) in rows.iter_mut().enumerate() {
        row[0] = heading.entry(r, 0).clone();
        row[1] = heading.entry(r, 1).clone();
    }
    for m in 1..i {
        let t = intermediate_term(spec, i, m, k)?;
        for (r, row) in rows.iter_mut().enumerate() {
            row[layout.yaw_index(m)] = simplify(&t.0[r]);
        }
    }
    let s = self_term(spec, i, k)?;
    for (r, row) in rows.iter_mut().enumerate() {
        row[layout.yaw_index(i)] = simplify(&s.0[r]);
    }
    Ok(rows)
}

/// Lateral no-slip constraint of wheel (i,k). Dependent wheels keep their own
/// steering angle as a free symbol.
pub fn wheel_constraint_row(spec: &ValidatedSpec, i: usize, k: usize) -> Result<ConstraintRow, VehicleError> {
    let [_, lateral] = velocity_rows(spec, i, k)?;
    Ok(ConstraintRow {
        source: (i, k),
        kind: if is_independent(i, k) { RowKind::Independent } else { RowKind::Dependent },
        coefficients: lateral,
    })
}

/// Longitudinal speed of wheel (i,k) as a linear form in the state velocities.
pub fn wheel_velocity_expr(spec: &ValidatedSpec, i: usize, k: usize) -> Result<LinearForm, VehicleError> {
    let [longitudinal, _] = velocity_rows(spec, i, k)?;
    Ok(LinearForm { coefficients: longitudinal })
}

pub fn build_pfaffian(spec: &ValidatedSpec) -> Result<PfaffianMatrix, VehicleError> {
    let mut rows = vec![wheel_constraint_row(spec, 1, 1)?, wheel_constraint_row(spec, 1, 2)?];
    for i in 2..=spec.n() {
        rows.push(wheel_constraint_row(spec, i, 1)?);
    }
    Ok(PfaffianMatrix { rows, layout: StateLayout::new(spec.n()) })
}

/// Bindings for the geometry of `spec`, the angles of a reduced state and any
/// extra (dependent) steering angles.
pub fn state_bindings(spec: &ValidatedSpec, state: &[f64], extra: &[(AngleVar, f64)]) -> Bindings {
    let layout = StateLayout::new(spec.n());
    let mut b = Bindings::default();
    for (name, v) in spec.param_values() {
        b.set_param(name, v);
    }
    for (c, v) in layout.coords().iter().zip(state) {
        if let Some(a) = c.angle_var() {
            b.set_angle(a, *v);
        }
    }
    for (a, v) in extra {
        b.set_angle(*a, *v);
    }
    b
}

/// Numeric value of `row . velocity`.
pub fn eval_linear(coefficients: &[ScalarExpr], b: &Bindings, velocity: &[f64]) -> Result<f64, EvalError> {
    let mut acc = 0.0;
    for (c, v) in coefficients.iter().zip(velocity) {
        if !c.is_zero() {
            acc += crate::symbolic::eval(c, b)? * v;
        }
    }
    Ok(acc)
}
