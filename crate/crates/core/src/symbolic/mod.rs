//! Symbolic scalar expressions over planar rotation angles.
//!
//! Angles are restricted to integer combinations of yaw and steering
//! variables plus quarter turns, which is closed under every composition of
//! planar rotations that the constraint construction needs.

mod angle;
mod emit;
mod eval;
mod expr;
mod rot;
mod simplify;

pub use angle::{AngleSum, AngleVar};
pub use emit::{expr_from_json, exprs_from_json, exprs_to_json, to_latex, LatexDocument};
pub use eval::{eval, Bindings, EvalError, Tape, DEFAULT_EPS_DIV};
pub use expr::{distinct_node_count, ExprKind, Rational, ScalarExpr};
pub use rot::{rot, transpose_rot, Mat2Sym, Vec2Sym};
pub use simplify::{simplify, simplify_all};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolicError {
    #[error("quotient with literal zero denominator")]
    ZeroDenominator,
    #[error("malformed expression json: {0}")]
    Json(String),
}
