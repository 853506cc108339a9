use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Hold {
    /// Each sample holds until the next one.
    #[default]
    ZeroOrder,
    /// Linear interpolation between samples.
    Linear,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("trace is empty")]
    Empty,
    #[error("timestamps must be strictly increasing (row {0})")]
    NotIncreasing(usize),
    #[error("row {row} has {got} controls, expected {expected}")]
    Width { row: usize, got: usize, expected: usize },
    #[error("non-finite value in row {0}")]
    NonFinite(usize),
}

/// Time-stamped control vectors `u = (v, omega_1_1, omega_1_2, omega_2_1, ...)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlTrace {
    times: Vec<f64>,
    controls: Vec<Vec<f64>>,
    hold: Hold,
}

impl ControlTrace {
    pub fn new(times: Vec<f64>, controls: Vec<Vec<f64>>, hold: Hold) -> Result<Self, TraceError> {
        if times.is_empty() {
            return Err(TraceError::Empty);
        }
        let width = controls.first().map_or(0, Vec::len);
        if controls.len() != times.len() {
            return Err(TraceError::Width { row: controls.len().min(times.len()), got: 0, expected: width });
        }
        for (row, (t, u)) in times.iter().zip(&controls).enumerate() {
            if u.len() != width {
                return Err(TraceError::Width { row, got: u.len(), expected: width });
            }
            if !t.is_finite() || u.iter().any(|x| !x.is_finite()) {
                return Err(TraceError::NonFinite(row));
            }
            if row > 0 && !(times[row - 1] < *t) {
                return Err(TraceError::NotIncreasing(row));
            }
        }
        Ok(ControlTrace { times, controls, hold })
    }

    /// A trace holding `u` from `t0` to `t1`.
    pub fn constant(u: Vec<f64>, t0: f64, t1: f64) -> Result<Self, TraceError> {
        Self::new(vec![t0, t1], vec![u.clone(), u], Hold::ZeroOrder)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn controls(&self) -> &[Vec<f64>] {
        &self.controls
    }

    pub fn hold(&self) -> Hold {
        self.hold
    }

    pub fn width(&self) -> usize {
        self.controls[0].len()
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Control at time `t`. With `left` set, a zero-order hold returns the
    /// value just before a sample time instead of at it.
    pub fn sample_into(&self, t: f64, left: bool, out: &mut [f64]) {
        let idx = if left {
            self.times.partition_point(|s| *s < t)
        } else {
            self.times.partition_point(|s| *s <= t)
        };
        // times[idx - 1] is the last sample before (or at) t.
        if idx == 0 {
            out.copy_from_slice(&self.controls[0]);
            return;
        }
        let i = idx - 1;
        match self.hold {
            Hold::ZeroOrder => out.copy_from_slice(&self.controls[i]),
            Hold::Linear => {
                if i + 1 >= self.times.len() {
                    out.copy_from_slice(&self.controls[i]);
                    return;
                }
                let (t0, t1) = (self.times[i], self.times[i + 1]);
                let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
                for ((o, a), b) in out.iter_mut().zip(&self.controls[i]).zip(&self.controls[i + 1]) {
                    *o = a + w * (b - a);
                }
            }
        }
    }

    pub fn sample(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.width()];
        self.sample_into(t, false, &mut out);
        out
    }
}

/// Adds seeded white Gaussian noise: `sigma_v` on the speed column and
/// `sigma_omega` on every steering-rate column.
pub fn inject_noise(trace: &ControlTrace, sigma_v: f64, sigma_omega: f64, seed: u64) -> ControlTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |sigma: f64, rng: &mut ChaCha8Rng| -> f64 {
        if sigma > 0.0 {
            Normal::new(0.0, sigma).expect("finite sigma").sample(rng)
        } else {
            0.0
        }
    };
    let controls = trace
        .controls
        .iter()
        .map(|u| {
            u.iter()
                .enumerate()
                .map(|(c, x)| x + draw(if c == 0 { sigma_v } else { sigma_omega }, &mut rng))
                .collect()
        })
        .collect();
    ControlTrace { times: trace.times.clone(), controls, hold: trace.hold }
}
