//! Trajectory simulation and kinematic metrics.

mod integrate;
mod metrics;
mod scenario;
mod trace;

pub use integrate::{integrate, SampleFlags, SimError, Trajectory, DEFAULT_DT};
pub use metrics::{offtracking, offtracking_paths, rwa, rwa_with, signed_distance_to_path, RwaSeries, DEFAULT_EPS_YAW};
pub use scenario::{generate, ScenarioError, ScenarioKind, ScenarioParams};
pub use trace::{inject_noise, ControlTrace, Hold, TraceError};
