//! Synthetic control traces.
//!
//! All scenarios drive the tractor at constant speed and steer through the
//! rate of the tractor's second wheel (`omega_1_2`). Every other steering
//! rate is zero.
//!
//! - `step`: from `start`, the steering angle ramps linearly to `steer` over
//!   `ramp` seconds and is held. With `hold` set, it ramps back to zero
//!   `hold` seconds after reaching `steer`.
//! - `circle`: the same ramp, held until the end.
//! - `sine`: the steering angle follows `steer * sin(2 pi frequency (t - start))`.

use std::f64::consts::TAU;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::trace::{ControlTrace, Hold};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Step,
    Sine,
    Circle,
}

impl FromStr for ScenarioKind {
    type Err = ScenarioError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "step" => Ok(ScenarioKind::Step),
            "sine" => Ok(ScenarioKind::Sine),
            "circle" => Ok(ScenarioKind::Circle),
            other => Err(ScenarioError::BadParam(format!("unknown scenario kind {other}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioParams {
    /// Number of vehicle units; sets the trace width.
    pub units: usize,
    /// Reference wheel speed, m/s.
    pub speed: f64,
    /// Trace length, s.
    pub duration: f64,
    /// Sample spacing, s.
    pub sample_dt: f64,
    /// Target or peak steering angle, rad.
    pub steer: f64,
    pub start: f64,
    pub ramp: f64,
    pub hold: Option<f64>,
    /// Sine frequency, Hz.
    pub frequency: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            units: 1,
            speed: 5.0,
            duration: 20.0,
            sample_dt: 0.01,
            steer: 0.1,
            start: 1.0,
            ramp: 0.5,
            hold: None,
            frequency: 0.2,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("bad scenario parameter: {0}")]
    BadParam(String),
}

fn check(params: &ScenarioParams) -> Result<(), ScenarioError> {
    let bad = |m: &str| Err(ScenarioError::BadParam(m.into()));
    let p = params;
    if p.units == 0 {
        return bad("units must be at least 1");
    }
    for (name, v) in [("speed", p.speed), ("steer", p.steer), ("frequency", p.frequency)] {
        if !v.is_finite() {
            return bad(&format!("{name} must be finite"));
        }
    }
    if !(p.duration > 0.0 && p.duration.is_finite()) {
        return bad("duration must be positive");
    }
    if !(p.sample_dt > 0.0 && p.sample_dt <= p.duration) {
        return bad("sample_dt must be positive and at most duration");
    }
    if !(p.ramp > 0.0 && p.ramp.is_finite()) {
        return bad("ramp must be positive");
    }
    if !(p.start >= 0.0 && p.start.is_finite()) {
        return bad("start must be non-negative");
    }
    if p.hold.is_some_and(|h| !(h >= 0.0 && h.is_finite())) {
        return bad("hold must be non-negative");
    }
    Ok(())
}

pub fn generate(kind: ScenarioKind, params: &ScenarioParams) -> Result<ControlTrace, ScenarioError> {
    check(params)?;
    let p = params;
    let dt = p.sample_dt;
    let samples = (p.duration / dt).round() as usize;
    let width = p.units + 2;
    let idx = |t: f64| (t / dt).round() as usize;
    let (k_start, k_ramp) = (idx(p.start), idx(p.ramp).max(1));
    let rate = p.steer / (k_ramp as f64 * dt);
    let k_back = match (kind, p.hold) {
        (ScenarioKind::Step, Some(h)) => Some(k_start + k_ramp + idx(h)),
        _ => None,
    };

    let mut times = Vec::with_capacity(samples + 1);
    let mut controls = Vec::with_capacity(samples + 1);
    for k in 0..=samples {
        let t = k as f64 * dt;
        let mut u = vec![0.0; width];
        u[0] = p.speed;
        u[2] = match kind {
            ScenarioKind::Step | ScenarioKind::Circle => {
                let up = (k_start..k_start + k_ramp).contains(&k);
                let down = k_back.is_some_and(|b| (b..b + k_ramp).contains(&k));
                if up {
                    rate
                } else if down {
                    -rate
                } else {
                    0.0
                }
            }
            ScenarioKind::Sine => {
                if t >= p.start {
                    p.steer * TAU * p.frequency * (TAU * p.frequency * (t - p.start)).cos()
                } else {
                    0.0
                }
            }
        };
        times.push(t);
        controls.push(u);
    }
    let hold = if kind == ScenarioKind::Sine { Hold::Linear } else { Hold::ZeroOrder };
    ControlTrace::new(times, controls, hold).map_err(|e| ScenarioError::BadParam(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrated_steer(trace: &ControlTrace) -> f64 {
        let t = trace.times();
        let u = trace.controls();
        (0..t.len() - 1).map(|k| u[k][2] * (t[k + 1] - t[k])).sum()
    }

    #[test]
    fn circle_holds_target() {
        let p = ScenarioParams { steer: 0.2, duration: 5.0, ..Default::default() };
        let tr = generate(ScenarioKind::Circle, &p).unwrap();
        assert!((integrated_steer(&tr) - 0.2).abs() < 1e-12);
        assert_eq!(tr.width(), 3);
        assert!(tr.controls().iter().all(|u| u[0] == 5.0 && u[1] == 0.0));
    }

    #[test]
    fn step_with_return() {
        let p = ScenarioParams { steer: 0.2, hold: Some(1.0), duration: 6.0, units: 3, ..Default::default() };
        let tr = generate(ScenarioKind::Step, &p).unwrap();
        assert!(integrated_steer(&tr).abs() < 1e-12);
        assert_eq!(tr.width(), 5);
    }

    #[test]
    fn zero_amplitude_sine() {
        let p = ScenarioParams { steer: 0.0, ..Default::default() };
        let tr = generate(ScenarioKind::Sine, &p).unwrap();
        assert!(tr.controls().iter().all(|u| u[0] == 5.0 && u[1..].iter().all(|w| *w == 0.0)));
    }

    #[test]
    fn rejects_bad_params() {
        let p = ScenarioParams { duration: -1.0, ..Default::default() };
        assert!(generate(ScenarioKind::Step, &p).is_err());
        let p = ScenarioParams { units: 0, ..Default::default() };
        assert!(generate(ScenarioKind::Step, &p).is_err());
        assert!("zigzag".parse::<ScenarioKind>().is_err());
    }
}
