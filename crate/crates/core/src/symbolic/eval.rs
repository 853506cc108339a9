use std::collections::HashMap;

use num_traits::ToPrimitive;
use thiserror::Error;

use super::angle::{AngleSum, AngleVar};
use super::expr::{post_order, ExprKind, Rational, ScalarExpr};

/// Default threshold below which a denominator is treated as singular.
pub const DEFAULT_EPS_DIV: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("unbound symbol {0}")]
    UnboundSymbol(String),
    #[error("denominator {value:e} below singularity threshold")]
    DivisionNearZero { value: f64 },
}

/// Numeric values for angle variables and geometry parameters.
#[derive(Clone, Debug, Default)]
pub struct Bindings {
    pub angles: HashMap<AngleVar, f64>,
    pub params: HashMap<String, f64>,
    pub eps_div: Option<f64>,
}

impl Bindings {
    pub fn set_angle(&mut self, v: AngleVar, value: f64) -> &mut Self {
        self.angles.insert(v, value);
        self
    }

    pub fn set_param(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        self.params.insert(name.into(), value);
        self
    }

    pub fn eps_div(&self) -> f64 {
        self.eps_div.unwrap_or(DEFAULT_EPS_DIV)
    }

    fn angle(&self, a: &AngleSum) -> Result<f64, EvalError> {
        a.eval(|v| self.angles.get(&v).copied())
            .map_err(|v| EvalError::UnboundSymbol(v.name()))
    }
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Evaluates `e` in double precision.
pub fn eval(e: &ScalarExpr, bindings: &Bindings) -> Result<f64, EvalError> {
    let eps = bindings.eps_div();
    let mut values: HashMap<usize, f64> = HashMap::new();
    let order = post_order(std::slice::from_ref(e));
    for node in &order {
        let get = |c: &ScalarExpr| values[&c.addr()];
        let v = match node.kind() {
            ExprKind::Const(c) => rational_to_f64(c),
            ExprKind::Param(p) => *bindings
                .params
                .get(p)
                .ok_or_else(|| EvalError::UnboundSymbol(p.clone()))?,
            ExprKind::Sin(a) => bindings.angle(a)?.sin(),
            ExprKind::Cos(a) => bindings.angle(a)?.cos(),
            ExprKind::Sum(xs) => xs.iter().map(get).sum(),
            ExprKind::Product(xs) => xs.iter().map(get).product(),
            ExprKind::Quotient(n, d) => {
                let dv = get(d);
                if !(dv.abs() >= eps) {
                    return Err(EvalError::DivisionNearZero { value: dv });
                }
                get(n) / dv
            }
            ExprKind::Neg(x) => -get(x),
        };
        values.insert(node.addr(), v);
    }
    Ok(values[&e.addr()])
}

#[derive(Clone, Debug)]
enum Op {
    Const(f64),
    Sin(Vec<(usize, f64)>, f64),
    Cos(Vec<(usize, f64)>, f64),
    Sum(Vec<usize>),
    Product(Vec<usize>),
    Div(usize, usize),
    Neg(usize),
}

/// A set of expressions compiled to a flat instruction list.
///
/// Parameters are folded in at compile time and angle variables are read from
/// a slice in the order given to [`Tape::compile`]. Shared sub-expressions are
/// computed once.
#[derive(Clone, Debug)]
pub struct Tape {
    ops: Vec<Op>,
    outputs: Vec<usize>,
    eps_div: f64,
}

impl Tape {
    pub fn compile(
        roots: &[ScalarExpr],
        inputs: &[AngleVar],
        params: &HashMap<String, f64>,
    ) -> Result<Tape, EvalError> {
        let slot_of: HashMap<AngleVar, usize> =
            inputs.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let linear = |a: &AngleSum| -> Result<(Vec<(usize, f64)>, f64), EvalError> {
            let terms = a
                .terms()
                .map(|(v, c)| {
                    slot_of
                        .get(&v)
                        .map(|s| (*s, c as f64))
                        .ok_or_else(|| EvalError::UnboundSymbol(v.name()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok((terms, a.quarter() as f64 * std::f64::consts::FRAC_PI_2))
        };

        let mut index: HashMap<ScalarExpr, usize> = HashMap::new();
        let mut by_addr: HashMap<usize, usize> = HashMap::new();
        let mut ops = Vec::new();
        for node in post_order(roots) {
            if let Some(&i) = index.get(&node) {
                by_addr.insert(node.addr(), i);
                continue;
            }
            let slot = |c: &ScalarExpr| by_addr[&c.addr()];
            let op = match node.kind() {
                ExprKind::Const(c) => Op::Const(rational_to_f64(c)),
                ExprKind::Param(p) => Op::Const(
                    *params
                        .get(p)
                        .ok_or_else(|| EvalError::UnboundSymbol(p.clone()))?,
                ),
                ExprKind::Sin(a) => {
                    let (t, o) = linear(a)?;
                    Op::Sin(t, o)
                }
                ExprKind::Cos(a) => {
                    let (t, o) = linear(a)?;
                    Op::Cos(t, o)
                }
                ExprKind::Sum(xs) => Op::Sum(xs.iter().map(slot).collect()),
                ExprKind::Product(xs) => Op::Product(xs.iter().map(slot).collect()),
                ExprKind::Quotient(n, d) => Op::Div(slot(n), slot(d)),
                ExprKind::Neg(x) => Op::Neg(slot(x)),
            };
            ops.push(op);
            index.insert(node.clone(), ops.len() - 1);
            by_addr.insert(node.addr(), ops.len() - 1);
        }
        let outputs = roots.iter().map(|r| by_addr[&r.addr()]).collect();
        Ok(Tape {
            ops,
            outputs,
            eps_div: DEFAULT_EPS_DIV,
        })
    }

    pub fn with_eps_div(mut self, eps: f64) -> Self {
        self.eps_div = eps;
        self
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    /// Evaluates all outputs. `scratch` is resized as needed and can be reused.
    pub fn run(&self, angles: &[f64], scratch: &mut Vec<f64>, out: &mut [f64]) -> Result<(), EvalError> {
        scratch.clear();
        scratch.reserve(self.ops.len());
        let lin = |t: &[(usize, f64)], o: f64| t.iter().fold(o, |acc, (s, c)| acc + c * angles[*s]);
        for op in &self.ops {
            let v = match op {
                Op::Const(c) => *c,
                Op::Sin(t, o) => lin(t, *o).sin(),
                Op::Cos(t, o) => lin(t, *o).cos(),
                Op::Sum(xs) => xs.iter().map(|i| scratch[*i]).sum(),
                Op::Product(xs) => xs.iter().map(|i| scratch[*i]).product(),
                Op::Div(n, d) => {
                    let dv = scratch[*d];
                    if !(dv.abs() >= self.eps_div) {
                        return Err(EvalError::DivisionNearZero { value: dv });
                    }
                    scratch[*n] / dv
                }
                Op::Neg(x) => -scratch[*x],
            };
            scratch.push(v);
        }
        for (o, i) in out.iter_mut().zip(&self.outputs) {
            *o = scratch[*i];
        }
        Ok(())
    }

    pub fn eval(&self, angles: &[f64]) -> Result<Vec<f64>, EvalError> {
        let mut out = vec![0.0; self.outputs.len()];
        self.run(angles, &mut Vec::new(), &mut out)?;
        Ok(out)
    }
}
