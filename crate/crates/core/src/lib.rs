//! Kinematic models of articulated vehicles: a tractor with any number of
//! wheels towing a chain of trailers.
//!
//! The model is derived symbolically from the no-slip constraint of every
//! independently steered wheel and solved in closed form, giving
//! `x' = J(x) u` over the state `(x1, y1, psi_1..psi_n, theta_1_1, theta_1_2,
//! theta_2_1..theta_n_1)` and the controls `(v, omega_1_1, omega_1_2,
//! omega_2_1..omega_n_1)`.
//!
//! ```
//! use ntrailer::io::parse_config;
//! use ntrailer::kernel::derive_model;
//! use ntrailer::vehicle::validate;
//!
//! let cfg = parse_config(r#"{"units": [
//!     {"label": "truck", "wheels": [{"x": 0, "y": 0}, {"x": 3, "y": 0}],
//!      "hitch_front": null, "hitch_rear": {"x": 0, "y": 0}},
//!     {"label": "trailer", "wheels": [{"x": 0, "y": 0}],
//!      "hitch_front": {"x": 5, "y": 0}, "hitch_rear": null}]}"#).unwrap();
//! let spec = validate(&cfg.to_spec()).unwrap();
//! let model = derive_model(&spec).unwrap();
//!
//! // Trailer at 90 degrees to the truck, driving forward at 1 m/s.
//! let x = [0.0, 0.0, std::f64::consts::FRAC_PI_2, 0.0, 0.0, 0.0, 0.0];
//! let xdot = model.state_derivative(&x, &[1.0, 0.0, 0.0, 0.0]).unwrap();
//! assert!((xdot[3] - 0.2).abs() < 1e-12);
//! ```

// Comparisons are written as `!(x >= eps)` so that NaN also fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ackermann;
pub mod cli;
pub mod constraints;
pub mod io;
pub mod kernel;
pub mod sim;
pub mod symbolic;
pub mod vehicle;
