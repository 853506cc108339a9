//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input, 3 structurally singular geometry,
//! 4 singular or degenerate configuration at run time. Diagnostics go to
//! stderr; verbosity follows `NTRAILER_LOG` (`error`, `warn`, `info`, `debug`).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::ackermann::{dependent_steer_angle, virtual_hitch_steer, AckermannError, HitchSide};
use crate::constraints::build_pfaffian;
use crate::io::{emit_model_json, emit_model_latex, parse_config, read_trace, write_trace, write_trajectory, AngleUnit};
use crate::kernel::{derive_model, KernelError, KinematicModel};
use crate::sim::{generate, inject_noise, integrate, offtracking, rwa, Hold, ScenarioKind, ScenarioParams, SimError};
use crate::vehicle::{validate, Coordinate, ValidatedSpec, VehicleError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_GEOMETRY: i32 = 3;
pub const EXIT_SINGULAR: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "ntrailer", version, about = "Kinematic models of multi-axle articulated vehicles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Json,
    Latex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum HoldArg {
    Zero,
    Linear,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive the kinematic model of a vehicle.
    Derive {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        emit: Emit,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include the constraint matrix in JSON output.
        #[arg(long)]
        pfaffian: bool,
    },
    /// Integrate the model over a control trace.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Control trace CSV.
        #[arg(long)]
        controls: PathBuf,
        /// Initial state: JSON array, JSON object keyed by state name, or a file holding either.
        #[arg(long)]
        x0: String,
        #[arg(long, default_value_t = crate::sim::DEFAULT_DT)]
        dt: f64,
        /// Trajectory CSV.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "zero")]
        hold: HoldArg,
        #[arg(long, default_value_t = 0.0)]
        noise_sigma_v: f64,
        #[arg(long, default_value_t = 0.0)]
        noise_sigma_omega: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Dependent wheel and virtual hitch steering angles at one state.
    Ackermann {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        state: String,
        /// Controls: JSON array or object keyed by control name, or a file.
        #[arg(long)]
        u: String,
    },
    /// Write a synthetic control trace.
    Scenario {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Scenario parameters as inline JSON or a file; omitted fields take defaults.
        #[arg(long)]
        params: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Step,
    Sine,
    Circle,
}

impl From<KindArg> for ScenarioKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Step => ScenarioKind::Step,
            KindArg::Sine => ScenarioKind::Sine,
            KindArg::Circle => ScenarioKind::Circle,
        }
    }
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<KernelError> for Failure {
    fn from(e: KernelError) -> Self {
        let code = match e {
            KernelError::StructurallySingular(_) => EXIT_GEOMETRY,
            KernelError::SingularState(_) => EXIT_SINGULAR,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<VehicleError> for Failure {
    fn from(e: VehicleError) -> Self {
        Failure::input(format!("invalid vehicle: {e}"))
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::SingularState { .. } | SimError::NonFiniteState { .. } => {
                Failure { code: EXIT_SINGULAR, message: e.to_string() }
            }
            SimError::Kernel(k) => k.into(),
            SimError::Ackermann(a) => a.into(),
            e => Failure::input(e.to_string()),
        }
    }
}

impl From<AckermannError> for Failure {
    fn from(e: AckermannError) -> Self {
        match e {
            AckermannError::Kernel(k) => k.into(),
            AckermannError::Vehicle(v) => v.into(),
            e => Failure { code: EXIT_SINGULAR, message: e.to_string() },
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_vehicle(path: &Path) -> Result<(ValidatedSpec, AngleUnit), Failure> {
    let cfg = parse_config(&read_file(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let spec = validate(&cfg.to_spec())?;
    Ok((spec, cfg.angle_unit))
}

/// Parses inline JSON, or reads it from a file when `arg` does not start
/// with `[` or `{`.
fn json_arg(arg: &str) -> Result<Value, Failure> {
    let t = arg.trim_start();
    let text = if t.starts_with('[') || t.starts_with('{') { arg.to_string() } else { read_file(Path::new(arg))? };
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("bad JSON: {e}")))
}

/// Reads a vector given as an array in `names` order or an object keyed by
/// name. Entries flagged in `angular` are converted from `unit`.
fn named_vector(v: &Value, names: &[String], angular: &[bool], unit: AngleUnit, what: &str) -> Result<Vec<f64>, Failure> {
    let raw: Vec<f64> = match v {
        Value::Array(xs) => {
            if xs.len() != names.len() {
                return Err(Failure::input(format!("{what}: expected {} values, got {}", names.len(), xs.len())));
            }
            xs.iter()
                .zip(names)
                .map(|(x, n)| x.as_f64().ok_or_else(|| Failure::input(format!("{what}: {n} is not a number"))))
                .collect::<Result<_, _>>()?
        }
        Value::Object(m) => {
            if let Some(k) = m.keys().find(|k| !names.contains(k)) {
                return Err(Failure::input(format!("{what}: unknown entry {k:?}; expected {}", names.join(", "))));
            }
            names
                .iter()
                .map(|n| {
                    m.get(n)
                        .ok_or_else(|| Failure::input(format!("{what}: missing {n}")))?
                        .as_f64()
                        .ok_or_else(|| Failure::input(format!("{what}: {n} is not a number")))
                })
                .collect::<Result<_, _>>()?
        }
        _ => return Err(Failure::input(format!("{what}: expected a JSON array or object"))),
    };
    if raw.iter().any(|x| !x.is_finite()) {
        return Err(Failure::input(format!("{what}: values must be finite")));
    }
    Ok(raw.iter().zip(angular).map(|(x, a)| if *a { unit.to_rad(*x) } else { *x }).collect())
}

fn state_arg(model: &KinematicModel, arg: &str, unit: AngleUnit) -> Result<Vec<f64>, Failure> {
    let angular: Vec<bool> = model.layout.coords().iter().map(|c| !matches!(c, Coordinate::X1 | Coordinate::Y1)).collect();
    named_vector(&json_arg(arg)?, &model.layout.names(), &angular, unit, "state")
}

fn control_arg(model: &KinematicModel, arg: &str, unit: AngleUnit) -> Result<Vec<f64>, Failure> {
    let names: Vec<String> = model.controls.iter().map(|c| c.name()).collect();
    let angular: Vec<bool> = (0..names.len()).map(|i| i > 0).collect();
    named_vector(&json_arg(arg)?, &names, &angular, unit, "controls")
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(p) => write_file(p, text.as_bytes()),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Failure::input(e.to_string())),
    }
}

fn round(x: f64) -> f64 {
    (x * 1e12).round() / 1e12 + 0.0
}

fn cmd_derive(config: &Path, format: Emit, out: Option<&Path>, pfaffian: bool, stdout: &mut dyn Write) -> Result<(), Failure> {
    let (spec, _) = load_vehicle(config)?;
    let model = derive_model(&spec)?;
    let text = match format {
        Emit::Json => {
            let p = if pfaffian { Some(build_pfaffian(&spec)?) } else { None };
            emit_model_json(&model, p.as_ref())
        }
        Emit::Latex => emit_model_latex(&model),
    };
    log::info!("derived model for {} units", model.n());
    emit(out, &text, stdout)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    config: &Path,
    controls: &Path,
    x0: &str,
    dt: f64,
    out: &Path,
    hold: HoldArg,
    sigma: (f64, f64),
    seed: u64,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let (spec, unit) = load_vehicle(config)?;
    let model = derive_model(&spec)?;
    let x0 = state_arg(&model, x0, unit)?;
    let hold = match hold {
        HoldArg::Zero => Hold::ZeroOrder,
        HoldArg::Linear => Hold::Linear,
    };
    let file = fs::File::open(controls).map_err(|e| Failure::input(format!("{}: {e}", controls.display())))?;
    let mut trace =
        read_trace(file, spec.n(), unit, hold).map_err(|e| Failure::input(format!("{}: {e}", controls.display())))?;
    let (sigma_v, sigma_omega) = (sigma.0, unit.to_rad(sigma.1));
    if !(sigma_v >= 0.0 && sigma_omega >= 0.0 && sigma_v.is_finite() && sigma_omega.is_finite()) {
        return Err(Failure::input("noise sigmas must be non-negative and finite"));
    }
    if sigma_v > 0.0 || sigma_omega > 0.0 {
        trace = inject_noise(&trace, sigma_v, sigma_omega, seed);
    }
    let traj = integrate(&spec, &model, &x0, &trace, dt)?;
    let mut buf = Vec::new();
    write_trajectory(&mut buf, &traj).map_err(|e| Failure::input(e.to_string()))?;
    write_file(out, &buf)?;

    let n = spec.n();
    let rwa_summary: Vec<Value> = (2..=n)
        .map(|j| {
            let r = rwa(&traj, 1, j);
            json!({
                "pair": [1, j],
                "peak_ratio": r.peak_ratio.map(round),
                "peak_lag": round(r.peak_lag()),
            })
        })
        .collect();
    let off_summary: Vec<Value> = (2..=n)
        .map(|j| {
            let off = offtracking(&traj, 1, j);
            let peak = off.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
            json!({"unit": j, "peak": round(peak)})
        })
        .collect();
    let mut summary = Map::new();
    summary.insert("samples".into(), json!(traj.len()));
    summary.insert("degenerate_samples".into(), json!(traj.flags.iter().filter(|f| f.degenerate).count()));
    summary.insert("rwa".into(), Value::Array(rwa_summary));
    summary.insert("offtracking".into(), Value::Array(off_summary));
    let text = serde_json::to_string_pretty(&Value::Object(summary)).expect("serializable") + "\n";
    emit(None, &text, stdout)
}

fn cmd_ackermann(config: &Path, state: &str, u: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    let (spec, unit) = load_vehicle(config)?;
    let model = derive_model(&spec)?;
    let x = state_arg(&model, state, unit)?;
    let u = control_arg(&model, u, unit)?;
    let mut out = Map::new();
    for (i, k) in spec.dependent_wheels() {
        let s = dependent_steer_angle(&spec, &model, &x, &u, i, k)?;
        out.insert(format!("theta_{i}_{k}"), json!(round(s.angle)));
    }
    for i in 1..=spec.n() {
        let unit = spec.unit(i)?;
        for (side, present, name) in
            [(HitchSide::Front, unit.hitch_front.is_some(), "front"), (HitchSide::Rear, unit.hitch_rear.is_some(), "rear")]
        {
            if present {
                let s = virtual_hitch_steer(&spec, &model, &x, &u, i, side)?;
                out.insert(format!("hitch_{name}_{i}"), json!(round(s.angle)));
            }
        }
    }
    let text = serde_json::to_string_pretty(&Value::Object(out)).expect("serializable") + "\n";
    emit(None, &text, stdout)
}

fn cmd_scenario(kind: KindArg, params: Option<&str>, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    let params: ScenarioParams = match params {
        Some(p) => serde_json::from_value(json_arg(p)?).map_err(|e| Failure::input(format!("scenario params: {e}")))?,
        None => ScenarioParams::default(),
    };
    let trace = generate(kind.into(), &params).map_err(|e| Failure::input(e.to_string()))?;
    let mut buf = Vec::new();
    write_trace(&mut buf, &trace).map_err(|e| Failure::input(e.to_string()))?;
    emit(out, std::str::from_utf8(&buf).expect("utf-8"), stdout)
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), Failure> {
    match &cli.command {
        Command::Derive { config, emit, out, pfaffian } => cmd_derive(config, *emit, out.as_deref(), *pfaffian, stdout),
        Command::Simulate { config, controls, x0, dt, out, hold, noise_sigma_v, noise_sigma_omega, seed } => {
            cmd_simulate(config, controls, x0, *dt, out, *hold, (*noise_sigma_v, *noise_sigma_omega), *seed, stdout)
        }
        Command::Ackermann { config, state, u } => cmd_ackermann(config, state, u, stdout),
        Command::Scenario { kind, params, out } => cmd_scenario(*kind, params.as_deref(), out.as_deref(), stdout),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or("NTRAILER_LOG", "warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("ntrailer").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn scenario_to_stdout() {
        let (code, out, _) = run_args(&["scenario", "--kind", "circle", "--params", r#"{"duration": 1.0, "sample_dt": 0.5}"#]);
        assert_eq!(code, 0);
        assert_eq!(out, "t,v,omega_1_1,omega_1_2\n0,5,0,0\n0.5,5,0,0\n1,5,0,0.2\n");
    }

    #[test]
    fn bad_params_exit_2() {
        let (code, _, err) = run_args(&["scenario", "--kind", "step", "--params", r#"{"duration": -1}"#]);
        assert_eq!(code, 2);
        assert!(err.contains("duration"));
        let (code, _, _) = run_args(&["scenario", "--kind", "step", "--params", r#"{"speeed": 1}"#]);
        assert_eq!(code, 2);
        assert_eq!(run_args(&["frobnicate"]).0, 2);
    }

    #[test]
    fn named_vectors() {
        let names = vec!["a".to_string(), "b".to_string()];
        let v = named_vector(&json!({"b": 180.0, "a": 1.0}), &names, &[false, true], AngleUnit::Deg, "x").unwrap();
        assert_eq!(v, vec![1.0, std::f64::consts::PI]);
        assert!(named_vector(&json!([1.0]), &names, &[false, false], AngleUnit::Rad, "x").is_err());
        assert!(named_vector(&json!({"a": 1, "c": 2}), &names, &[false, false], AngleUnit::Rad, "x").is_err());
    }
}
