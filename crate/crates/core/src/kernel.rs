//! Closed-form kernel of the Pfaffian matrix by back-substitution.
//!
//! The kernel is spanned by one column driven by the reference wheel speed
//! `v` plus one column per independent steering rate. The speed column is
//! `(F; 0)` with `F = (f_x1, f_y1, f_psi_1..f_psi_n)`; each row of the
//! lower-triangular yaw block is solved for its own yaw rate in turn.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::constraints::{build_pfaffian, PfaffianMatrix};
use crate::symbolic::{simplify, AngleSum, AngleVar, EvalError, ScalarExpr, Tape, DEFAULT_EPS_DIV};
use crate::vehicle::{StateLayout, ValidatedSpec, VehicleError};

/// A denominator introduced while solving for a yaw rate.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularityReport {
    pub location: (usize, usize),
    pub denominator: ScalarExpr,
    pub description: String,
}

impl fmt::Display for SingularityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (wheel ({},{}), denominator {})", self.description, self.location.0, self.location.1, self.denominator)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("structurally singular geometry: {0}")]
    StructurallySingular(SingularityReport),
    #[error("singular state: {0}")]
    SingularState(SingularityReport),
    #[error("model evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("expected {expected} values, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("model has no geometry values bound")]
    Unbound,
    #[error(transparent)]
    Vehicle(#[from] VehicleError),
}

/// One entry of the control vector `u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    /// Speed of the tractor's reference wheel (1,1).
    Speed,
    SteerRate(usize, usize),
}

impl Control {
    pub fn name(&self) -> String {
        match *self {
            Control::Speed => "v".into(),
            Control::SteerRate(i, k) => format!("omega_{i}_{k}"),
        }
    }
}

pub fn control_layout(n: usize) -> Vec<Control> {
    let mut c = vec![Control::Speed, Control::SteerRate(1, 1), Control::SteerRate(1, 2)];
    c.extend((2..=n).map(|i| Control::SteerRate(i, 1)));
    c
}

/// Derived model `x' = J(x) u`.
#[derive(Clone, Debug)]
pub struct KinematicModel {
    pub layout: StateLayout,
    pub controls: Vec<Control>,
    /// `(f_x1, f_y1, f_psi_1, ..., f_psi_n)`.
    pub f: Vec<ScalarExpr>,
    pub singularities: Vec<SingularityReport>,
    params: BTreeMap<String, f64>,
    compiled: Option<Compiled>,
    eps_div: f64,
}

#[derive(Clone, Debug)]
struct Compiled {
    f: Tape,
    denominators: Tape,
}

/// Numeric `F` and `J` at one state.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelValue {
    pub f: Vec<f64>,
    pub j: DMatrix<f64>,
}

fn location_of_row(r: usize) -> (usize, usize) {
    match r {
        0 => (1, 1),
        1 => (1, 2),
        r => (r, 1),
    }
}

pub fn solve_kernel(p: &PfaffianMatrix) -> Result<KinematicModel, KernelError> {
    let layout = p.layout.clone();
    let n = layout.units();
    let heading = AngleSum::var(AngleVar::yaw(1)) + AngleSum::var(AngleVar::steer(1, 1));
    let mut f = vec![ScalarExpr::cos(heading.clone()), ScalarExpr::sin(heading)];
    let mut singularities = Vec::with_capacity(n);

    for (r, row) in p.rows.iter().enumerate().skip(1) {
        // Row r constrains yaw rate r given everything before it.
        let u = r;
        let mut known = vec![&row.coefficients[0] * &f[0], &row.coefficients[1] * &f[1]];
        for m in 1..u {
            let c = &row.coefficients[layout.yaw_index(m)];
            if !c.is_zero() {
                known.push(c * &f[1 + m]);
            }
        }
        let numerator = simplify(&ScalarExpr::sum(known));
        let denominator = row.coefficients[layout.yaw_index(u)].clone();
        let report = SingularityReport {
            location: location_of_row(r),
            denominator: denominator.clone(),
            description: if u == 1 {
                "tractor yaw rate from the second steered wheel".into()
            } else {
                format!("yaw rate of unit {u} from its first wheel")
            },
        };
        if simplify(&denominator).is_zero() {
            return Err(KernelError::StructurallySingular(report));
        }
        let q = ScalarExpr::quotient(numerator, denominator).expect("nonzero denominator");
        f.push(simplify(&-q));
        singularities.push(report);
    }

    Ok(KinematicModel::from_parts(layout, f, singularities))
}

/// Builds the constraint matrix, solves it and binds the vehicle geometry.
pub fn derive_model(spec: &ValidatedSpec) -> Result<KinematicModel, KernelError> {
    let p = build_pfaffian(spec)?;
    solve_kernel(&p)?.with_params(spec.param_values())
}

impl KinematicModel {
    /// An unbound model from already solved parts.
    pub(crate) fn from_parts(layout: StateLayout, f: Vec<ScalarExpr>, singularities: Vec<SingularityReport>) -> Self {
        KinematicModel {
            controls: control_layout(layout.units()),
            layout,
            f,
            singularities,
            params: BTreeMap::new(),
            compiled: None,
            eps_div: DEFAULT_EPS_DIV,
        }
    }

    pub fn n(&self) -> usize {
        self.layout.units()
    }

    pub fn state_dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn control_dim(&self) -> usize {
        self.controls.len()
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn eps_div(&self) -> f64 {
        self.eps_div
    }

    /// Binds geometry values and compiles the evaluator.
    pub fn with_params(mut self, params: BTreeMap<String, f64>) -> Result<Self, KernelError> {
        let map = params.clone().into_iter().collect();
        let inputs = self.layout.angle_vars();
        let dens: Vec<ScalarExpr> = self.singularities.iter().map(|s| s.denominator.clone()).collect();
        self.compiled = Some(Compiled {
            f: Tape::compile(&self.f, &inputs, &map)?.with_eps_div(self.eps_div),
            denominators: Tape::compile(&dens, &inputs, &map)?,
        });
        self.params = params;
        Ok(self)
    }

    pub fn with_eps_div(mut self, eps: f64) -> Self {
        self.eps_div = eps;
        if let Some(c) = self.compiled.as_mut() {
            c.f = c.f.clone().with_eps_div(eps);
        }
        self
    }

    fn check_len(&self, got: usize, expected: usize) -> Result<(), KernelError> {
        if got == expected {
            Ok(())
        } else {
            Err(KernelError::Dimension { expected, got })
        }
    }

    /// Writes `F(x)` into `out`, reusing `scratch`.
    pub fn eval_f_into(&self, state: &[f64], scratch: &mut Vec<f64>, out: &mut [f64]) -> Result<(), KernelError> {
        self.check_len(state.len(), self.state_dim())?;
        let c = self.compiled.as_ref().ok_or(KernelError::Unbound)?;
        let angles = &state[2..];
        let mut dens = vec![0.0; c.denominators.output_count()];
        c.denominators.run(angles, scratch, &mut dens)?;
        let worst = dens
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()));
        if let Some((i, d)) = worst {
            if !(d.abs() >= self.eps_div) {
                return Err(KernelError::SingularState(self.singularities[i].clone()));
            }
        }
        match c.f.run(angles, scratch, out) {
            Ok(()) => Ok(()),
            Err(EvalError::DivisionNearZero { .. }) => {
                let i = worst.map_or(0, |w| w.0);
                Err(KernelError::SingularState(self.singularities[i].clone()))
            }
            Err(e) => Err(e.into()),
        }
    }

    pub fn eval_f(&self, state: &[f64]) -> Result<Vec<f64>, KernelError> {
        let mut out = vec![0.0; self.f.len()];
        self.eval_f_into(state, &mut Vec::new(), &mut out)?;
        Ok(out)
    }

    /// Numeric `F` and the `(2n+3) x (n+2)` matrix `J`.
    pub fn evaluate(&self, state: &[f64]) -> Result<ModelValue, KernelError> {
        let f = self.eval_f(state)?;
        let (rows, cols) = (self.state_dim(), self.control_dim());
        let mut j = DMatrix::zeros(rows, cols);
        for (r, v) in f.iter().enumerate() {
            j[(r, 0)] = *v;
        }
        for c in 1..cols {
            j[(f.len() + c - 1, c)] = 1.0;
        }
        Ok(ModelValue { f, j })
    }

    /// `x' = J(x) u`, written into `out`.
    pub fn state_derivative_into(
        &self,
        state: &[f64],
        u: &[f64],
        scratch: &mut Vec<f64>,
        out: &mut [f64],
    ) -> Result<(), KernelError> {
        self.check_len(u.len(), self.control_dim())?;
        let nf = self.f.len();
        self.eval_f_into(state, scratch, &mut out[..nf])?;
        for v in &mut out[..nf] {
            *v *= u[0];
        }
        out[nf..].copy_from_slice(&u[1..]);
        Ok(())
    }

    pub fn state_derivative(&self, state: &[f64], u: &[f64]) -> Result<Vec<f64>, KernelError> {
        let mut out = vec![0.0; self.state_dim()];
        self.state_derivative_into(state, u, &mut Vec::new(), &mut out)?;
        Ok(out)
    }
}

pub fn evaluate_model(model: &KinematicModel, state: &[f64]) -> Result<ModelValue, KernelError> {
    model.evaluate(state)
}

pub fn state_derivative(model: &KinematicModel, state: &[f64], u: &[f64]) -> Result<Vec<f64>, KernelError> {
    model.state_derivative(state, u)
}
