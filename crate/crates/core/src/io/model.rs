//! Model emission.
//!
//! JSON layout:
//!
//! ```text
//! {
//!   "format": "ntrailer-model/1",
//!   "units": n,
//!   "state": ["x1", "y1", "psi_1", ...],
//!   "controls": ["v", "omega_1_1", ...],
//!   "params": {"a_1_2": 3.0, ...},
//!   "f": ["f_x1", "f_y1", "f_psi_1", ...],
//!   "singularities": [{"wheel": [i, k], "description": "..."}],
//!   "expressions": {"shared": [...], "roots": [...]},
//!   "pfaffian": {"rows": [{"wheel": [i, k], "kind": "..."}], "expressions": {...}}
//! }
//! ```
//!
//! `roots` holds the `F` entries followed by one denominator per singularity.
//! `pfaffian` is present only when requested; its roots are the row entries in
//! row-major order.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::constraints::PfaffianMatrix;
use crate::kernel::{KernelError, KinematicModel, SingularityReport};
use crate::symbolic::{exprs_from_json, exprs_to_json, to_latex, ScalarExpr, SymbolicError};
use crate::vehicle::StateLayout;

pub const MODEL_FORMAT: &str = "ntrailer-model/1";

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("model file: {0}")]
    Schema(String),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Name of the `F` entry for each row: `f_x1`, `f_y1`, `f_psi_i`.
pub fn f_names(n: usize) -> Vec<String> {
    let mut names = vec!["f_x1".to_string(), "f_y1".to_string()];
    names.extend((1..=n).map(|i| format!("f_psi_{i}")));
    names
}

pub fn model_to_json(model: &KinematicModel, pfaffian: Option<&PfaffianMatrix>) -> Value {
    let n = model.n();
    let mut roots = model.f.clone();
    roots.extend(model.singularities.iter().map(|s| s.denominator.clone()));
    let params: Map<String, Value> = model.params().iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    let singularities: Vec<Value> = model
        .singularities
        .iter()
        .map(|s| json!({"wheel": [s.location.0, s.location.1], "description": s.description}))
        .collect();
    let mut doc = Map::new();
    doc.insert("format".into(), json!(MODEL_FORMAT));
    doc.insert("units".into(), json!(n));
    doc.insert("state".into(), json!(model.layout.names()));
    doc.insert("controls".into(), json!(model.controls.iter().map(|c| c.name()).collect::<Vec<_>>()));
    doc.insert("params".into(), Value::Object(params));
    doc.insert("f".into(), json!(f_names(n)));
    doc.insert("singularities".into(), Value::Array(singularities));
    doc.insert("expressions".into(), exprs_to_json(&roots));
    if let Some(p) = pfaffian {
        let rows: Vec<Value> = p
            .rows
            .iter()
            .map(|r| json!({"wheel": [r.source.0, r.source.1], "kind": format!("{:?}", r.kind).to_lowercase()}))
            .collect();
        doc.insert("pfaffian".into(), json!({"rows": rows, "expressions": exprs_to_json(&p.entries())}));
    }
    Value::Object(doc)
}

/// Pretty JSON text with a trailing newline.
pub fn emit_model_json(model: &KinematicModel, pfaffian: Option<&PfaffianMatrix>) -> String {
    let mut s = serde_json::to_string_pretty(&model_to_json(model, pfaffian)).expect("serializable");
    s.push('\n');
    s
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, ModelFileError> {
    v.get(key).ok_or_else(|| ModelFileError::Schema(format!("missing field {key:?}")))
}

/// Reads a model back. Geometry values are bound when `params` is non-empty.
pub fn model_from_json(v: &Value) -> Result<KinematicModel, ModelFileError> {
    let format = field(v, "format")?.as_str();
    if format != Some(MODEL_FORMAT) {
        return Err(ModelFileError::Schema(format!("unsupported format {format:?}")));
    }
    let n = field(v, "units")?
        .as_u64()
        .filter(|n| *n >= 1)
        .ok_or_else(|| ModelFileError::Schema("units must be a positive integer".into()))? as usize;
    let roots = exprs_from_json(field(v, "expressions")?)?;
    let sing = field(v, "singularities")?
        .as_array()
        .ok_or_else(|| ModelFileError::Schema("singularities must be an array".into()))?;
    let nf = n + 2;
    if roots.len() != nf + sing.len() || sing.len() != n {
        return Err(ModelFileError::Schema(format!(
            "expected {} expressions for {n} units, found {}",
            2 * n + 2,
            roots.len()
        )));
    }
    let mut singularities = Vec::with_capacity(n);
    for (s, den) in sing.iter().zip(&roots[nf..]) {
        let wheel = field(s, "wheel")?
            .as_array()
            .filter(|w| w.len() == 2)
            .and_then(|w| Some((w[0].as_u64()? as usize, w[1].as_u64()? as usize)))
            .ok_or_else(|| ModelFileError::Schema("singularity wheel must be [i, k]".into()))?;
        let description = field(s, "description")?.as_str().unwrap_or_default().to_string();
        singularities.push(SingularityReport { location: wheel, denominator: den.clone(), description });
    }
    let f: Vec<ScalarExpr> = roots[..nf].to_vec();
    let params: BTreeMap<String, f64> = match v.get("params") {
        Some(p) => serde_json::from_value(p.clone())?,
        None => BTreeMap::new(),
    };
    let model = KinematicModel::from_parts(StateLayout::new(n), f, singularities);
    if params.is_empty() {
        Ok(model)
    } else {
        Ok(model.with_params(params)?)
    }
}

fn latex_f_name(name: &str) -> String {
    match name {
        "f_x1" => "f_{x_1}".into(),
        "f_y1" => "f_{y_1}".into(),
        other => format!("f_{{\\psi_{{{}}}}}", other.trim_start_matches("f_psi_")),
    }
}

/// LaTeX `align*` block of the `F` entries, followed by the denominators
/// whose zeros are the singular configurations.
pub fn emit_model_latex(model: &KinematicModel) -> String {
    let mut named: Vec<(String, ScalarExpr)> = f_names(model.n())
        .iter()
        .map(|s| latex_f_name(s))
        .zip(model.f.iter().cloned())
        .collect();
    named.extend(
        model
            .singularities
            .iter()
            .map(|s| (format!("\\Delta_{{{},{}}}", s.location.0, s.location.1), s.denominator.clone())),
    );
    to_latex(&named).render()
}
