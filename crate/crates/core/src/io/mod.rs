//! File formats: vehicle configs, control traces, trajectories and models.

pub mod config;
pub mod model;
pub mod series;

pub use config::{emit_config, parse_config, AngleUnit, UnitFile, VehicleConfigFile, WheelFile, XyFile};
pub use model::{emit_model_json, emit_model_latex, f_names, model_from_json, model_to_json, ModelFileError, MODEL_FORMAT};
pub use series::{
    read_table, read_trace, trace_header, trajectory_header, write_trace, write_trajectory, CsvError, Table,
};
