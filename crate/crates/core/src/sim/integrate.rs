use nalgebra::Rotation2;
use thiserror::Error;

use super::trace::{ControlTrace, TraceError};
use crate::ackermann::{geometric_steer_angle, AckermannError};
use crate::kernel::{KernelError, KinematicModel, SingularityReport};
use crate::vehicle::{recover_poses, Point, Pose, ValidatedSpec};

pub const DEFAULT_DT: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("singular configuration after sample {sample}: {report}")]
    SingularState { sample: usize, report: SingularityReport },
    #[error("state became non-finite after sample {sample}")]
    NonFiniteState { sample: usize },
    #[error("initial state has {got} entries, expected {expected}")]
    StateDimension { expected: usize, got: usize },
    #[error("trace has {got} controls per row, expected {expected}")]
    ControlDimension { expected: usize, got: usize },
    #[error("time step must be positive and finite")]
    BadStep,
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Ackermann(#[from] AckermannError),
}

/// Per-sample status bits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SampleFlags {
    /// Some dependent wheel sits at its unit's rotation center; its angle
    /// was held from the previous sample.
    pub degenerate: bool,
}

/// Simulation record, one entry per integration step plus the initial state.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub controls: Vec<Vec<f64>>,
    pub poses: Vec<Vec<Pose>>,
    /// `psi_dot_i` per sample and unit.
    pub yaw_rates: Vec<Vec<f64>>,
    /// All wheels in (unit, wheel) order.
    pub wheels: Vec<(usize, usize)>,
    pub wheel_paths: Vec<Vec<Point>>,
    pub dependent_wheels: Vec<(usize, usize)>,
    pub dependent_angles: Vec<Vec<f64>>,
    pub flags: Vec<SampleFlags>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn units(&self) -> usize {
        self.poses.first().map_or(0, Vec::len)
    }

    /// Path of a unit's frame origin (its first wheel).
    pub fn unit_path(&self, unit: usize) -> Vec<Point> {
        self.poses.iter().map(|p| p[unit - 1].p).collect()
    }

    pub fn yaw_rate_series(&self, unit: usize) -> Vec<f64> {
        self.yaw_rates.iter().map(|r| r[unit - 1]).collect()
    }
}

struct Recorder<'a> {
    spec: &'a ValidatedSpec,
    model: &'a KinematicModel,
    traj: Trajectory,
    xdot: Vec<f64>,
    scratch: Vec<f64>,
}

impl Recorder<'_> {
    fn record(&mut self, t: f64, x: &[f64], u: &[f64]) -> Result<(), SimError> {
        let n = self.model.n();
        self.model.state_derivative_into(x, u, &mut self.scratch, &mut self.xdot)?;
        let poses = recover_poses(self.spec, x).map_err(KernelError::from)?;
        let mut path = Vec::with_capacity(self.traj.wheels.len());
        for &(i, k) in &self.traj.wheels {
            let pose = poses[i - 1];
            path.push(pose.p + Rotation2::new(pose.psi) * self.spec.wheel(i, k).map_err(KernelError::from)?);
        }
        let mut flags = SampleFlags::default();
        let mut angles = Vec::with_capacity(self.traj.dependent_wheels.len());
        for (j, &(i, k)) in self.traj.dependent_wheels.iter().enumerate() {
            let s = geometric_steer_angle(self.spec, self.model, x, i, self.spec.wheel(i, k).map_err(KernelError::from)?)?;
            if s.degenerate {
                flags.degenerate = true;
                angles.push(self.traj.dependent_angles.last().map_or(0.0, |prev| prev[j]));
            } else {
                angles.push(s.angle);
            }
        }
        self.traj.times.push(t);
        self.traj.states.push(x.to_vec());
        self.traj.controls.push(u.to_vec());
        self.traj.poses.push(poses);
        self.traj.yaw_rates.push(self.xdot[2..2 + n].to_vec());
        self.traj.wheel_paths.push(path);
        self.traj.dependent_angles.push(angles);
        self.traj.flags.push(flags);
        Ok(())
    }
}

struct Rk4<'a> {
    model: &'a KinematicModel,
    trace: &'a ControlTrace,
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
    u: Vec<f64>,
    scratch: Vec<f64>,
}

impl Rk4<'_> {
    /// One classical Runge-Kutta step. The last stage samples the control as
    /// a left limit, so a zero-order hold switching at `t + h` is not seen
    /// early.
    fn step(&mut self, x: &mut [f64], t: f64, h: f64) -> Result<(), KernelError> {
        let Rk4 { model, trace, k, tmp, u, scratch } = self;
        let [k1, k2, k3, k4] = k;
        let mut eval = |tt: f64, left: bool, xs: &[f64], out: &mut [f64]| {
            trace.sample_into(tt, left, u);
            model.state_derivative_into(xs, u, scratch, out)
        };
        eval(t, false, x, k1)?;
        for i in 0..x.len() {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        eval(t + 0.5 * h, false, tmp, k2)?;
        for i in 0..x.len() {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        eval(t + 0.5 * h, false, tmp, k3)?;
        for i in 0..x.len() {
            tmp[i] = x[i] + h * k3[i];
        }
        eval(t + h, true, tmp, k4)?;
        for i in 0..x.len() {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        Ok(())
    }
}

fn singular(sample: usize, e: KernelError) -> SimError {
    match e {
        KernelError::SingularState(report) => SimError::SingularState { sample, report },
        e => SimError::Kernel(e),
    }
}

/// Fixed-step classical Runge-Kutta integration of `x' = J(x) u(t)` over the
/// time span of `trace`, recorded every `dt`. The last step is shortened to
/// end on the final trace time, and steps are split at trace samples.
pub fn integrate(
    spec: &ValidatedSpec,
    model: &KinematicModel,
    x0: &[f64],
    trace: &ControlTrace,
    dt: f64,
) -> Result<Trajectory, SimError> {
    let dim = model.state_dim();
    if x0.len() != dim {
        return Err(SimError::StateDimension { expected: dim, got: x0.len() });
    }
    if trace.width() != model.control_dim() {
        return Err(SimError::ControlDimension { expected: model.control_dim(), got: trace.width() });
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SimError::BadStep);
    }
    let (t0, t_end) = (trace.start(), trace.end());
    let span = t_end - t0;
    let full_steps = (span / dt + 1e-9).floor() as usize;
    let remainder = span - full_steps as f64 * dt;
    let steps = full_steps + usize::from(remainder > 1e-9 * dt.max(1.0));

    let wheels: Vec<_> = spec.wheels().collect();
    let dependent_wheels: Vec<_> = spec.dependent_wheels().collect();
    let mut rec = Recorder {
        spec,
        model,
        traj: Trajectory {
            times: Vec::with_capacity(steps + 1),
            states: Vec::with_capacity(steps + 1),
            controls: Vec::with_capacity(steps + 1),
            poses: Vec::with_capacity(steps + 1),
            yaw_rates: Vec::with_capacity(steps + 1),
            wheels,
            wheel_paths: Vec::with_capacity(steps + 1),
            dependent_wheels,
            dependent_angles: Vec::with_capacity(steps + 1),
            flags: Vec::with_capacity(steps + 1),
        },
        xdot: vec![0.0; dim],
        scratch: Vec::new(),
    };

    let m = model.control_dim();
    let mut u = vec![0.0; m];
    let mut x = x0.to_vec();
    trace.sample_into(t0, false, &mut u);
    rec.record(t0, &x, &u).map_err(|e| match e {
        SimError::Kernel(k) => singular(0, k),
        e => e,
    })?;

    let mut stepper = Rk4 { model, trace, k: [vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]], tmp: vec![0.0; dim], u: vec![0.0; m], scratch: Vec::new() };
    let knots = trace.times();
    for step in 0..steps {
        let t = t0 + step as f64 * dt;
        let t_next = if step + 1 == steps { t_end } else { t0 + (step + 1) as f64 * dt };
        // Sub-steps end on every trace sample inside the step so the control
        // is smooth within each RK4 stage.
        let mut a = t;
        let first = knots.partition_point(|&tk| tk <= t + 1e-12);
        for &tk in knots[first..].iter().take_while(|&&tk| tk < t_next - 1e-12) {
            stepper.step(&mut x, a, tk - a).map_err(|e| singular(step, e))?;
            a = tk;
        }
        stepper.step(&mut x, a, t_next - a).map_err(|e| singular(step, e))?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SimError::NonFiniteState { sample: step });
        }
        trace.sample_into(t_next, false, &mut u);
        rec.record(t_next, &x, &u).map_err(|e| match e {
            SimError::Kernel(k) => singular(step, k),
            e => e,
        })?;
    }
    Ok(rec.traj)
}
