//! CSV time series: control traces in, trajectories out.
//!
//! Trace columns: `t, v, omega_1_1, omega_1_2, omega_2_1, ..., omega_n_1`.
//!
//! Trajectory columns: `t, x1, y1, psi_1..psi_n`, the independent steering
//! angles `theta_1_1, theta_1_2, theta_2_1..`, the resolved dependent angles
//! `theta_i_k`, then per unit `x_i, y_i, psidot_i`, then `rwa_1_j` for
//! `j = 2..n` (empty where masked) and `degenerate` (0 or 1).

use std::io::{Read, Write};

use thiserror::Error;

use super::config::AngleUnit;
use crate::kernel::control_layout;
use crate::sim::{rwa, ControlTrace, Hold, Trajectory};
use crate::vehicle::StateLayout;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("line {line}, column {column}: {message}")]
    Field { line: usize, column: String, message: String },
    #[error("bad header: expected [{expected}], found [{found}]")]
    Header { expected: String, found: String },
    #[error("line {line}: expected {expected} fields, found {found}")]
    Width { line: usize, expected: usize, found: usize },
    #[error("trace: {0}")]
    Trace(#[from] crate::sim::TraceError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn trace_header(units: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend(control_layout(units).iter().map(|c| c.name()));
    h
}

fn fmt(v: f64) -> String {
    // Adding zero turns -0 into 0.
    format!("{}", v + 0.0)
}

/// Reads a trace for a vehicle with `units` units. Rates are converted from
/// degrees when `unit` is [`AngleUnit::Deg`].
pub fn read_trace<R: Read>(r: R, units: usize, unit: AngleUnit, hold: Hold) -> Result<ControlTrace, CsvError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).flexible(true).from_reader(r);
    let expected = trace_header(units);
    let found: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if found != expected {
        return Err(CsvError::Header { expected: expected.join(","), found: found.join(",") });
    }
    let mut times = Vec::new();
    let mut controls = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(idx + 2, |p| p.line() as usize);
        if rec.len() != expected.len() {
            return Err(CsvError::Width { line, expected: expected.len(), found: rec.len() });
        }
        let mut vals = Vec::with_capacity(rec.len());
        for (c, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| CsvError::Field {
                line,
                column: expected[c].clone(),
                message: format!("not a number: {field:?}"),
            })?;
            if !v.is_finite() {
                return Err(CsvError::Field { line, column: expected[c].clone(), message: "non-finite value".into() });
            }
            vals.push(if c >= 2 { unit.to_rad(v) } else { v });
        }
        times.push(vals[0]);
        controls.push(vals[1..].to_vec());
    }
    Ok(ControlTrace::new(times, controls, hold)?)
}

pub fn write_trace<W: Write>(w: W, trace: &ControlTrace) -> Result<(), CsvError> {
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    wtr.write_record(trace_header(trace.width() - 2))?;
    for (t, u) in trace.times().iter().zip(trace.controls()) {
        let mut row = vec![fmt(*t)];
        row.extend(u.iter().map(|v| fmt(*v)));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn trajectory_header(traj: &Trajectory) -> Vec<String> {
    let n = traj.units();
    let mut h = vec!["t".to_string()];
    h.extend(StateLayout::new(n).names());
    h.extend(traj.dependent_wheels.iter().map(|(i, k)| format!("theta_{i}_{k}")));
    for i in 1..=n {
        h.push(format!("x_{i}"));
        h.push(format!("y_{i}"));
        h.push(format!("psidot_{i}"));
    }
    h.extend((2..=n).map(|j| format!("rwa_1_{j}")));
    h.push("degenerate".into());
    h
}

pub fn write_trajectory<W: Write>(w: W, traj: &Trajectory) -> Result<(), CsvError> {
    let n = traj.units();
    let ratios: Vec<_> = (2..=n).map(|j| rwa(traj, 1, j).pointwise).collect();
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    wtr.write_record(trajectory_header(traj))?;
    for s in 0..traj.len() {
        let mut row = vec![fmt(traj.times[s])];
        row.extend(traj.states[s].iter().map(|v| fmt(*v)));
        row.extend(traj.dependent_angles[s].iter().map(|v| fmt(*v)));
        for (pose, rate) in traj.poses[s].iter().zip(&traj.yaw_rates[s]) {
            row.push(fmt(pose.p.x));
            row.push(fmt(pose.p.y));
            row.push(fmt(*rate));
        }
        for r in &ratios {
            row.push(r[s].map(fmt).unwrap_or_default());
        }
        row.push(if traj.flags[s].degenerate { "1" } else { "0" }.into());
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

/// A parsed numeric table; empty fields read as `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let c = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[c]).collect())
    }
}

pub fn read_table<R: Read>(r: R) -> Result<Table, CsvError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = idx + 2;
        if rec.len() != header.len() {
            return Err(CsvError::Width { line, expected: header.len(), found: rec.len() });
        }
        let row = rec
            .iter()
            .enumerate()
            .map(|(c, f)| {
                if f.is_empty() {
                    Ok(None)
                } else {
                    f.parse().map(Some).map_err(|_| CsvError::Field {
                        line,
                        column: header[c].clone(),
                        message: format!("not a number: {f:?}"),
                    })
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}
