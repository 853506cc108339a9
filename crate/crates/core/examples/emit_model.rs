//! Write a model as JSON and LaTeX, then load the JSON back.

use ntrailer::constraints::build_pfaffian;
use ntrailer::io::{emit_model_json, emit_model_latex, model_from_json, parse_config};
use ntrailer::kernel::derive_model;
use ntrailer::vehicle::validate;

fn main() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/bicycle.json")).unwrap();
    let spec = validate(&parse_config(&text).unwrap().to_spec()).unwrap();
    let model = derive_model(&spec).unwrap();

    print!("{}", emit_model_latex(&model));
    let json = emit_model_json(&model, Some(&build_pfaffian(&spec).unwrap()));
    println!("JSON: {} bytes", json.len());

    let back = model_from_json(&serde_json::from_str(&json).unwrap()).unwrap();
    let x = [0.0, 0.0, 0.3, 0.0, 0.25];
    assert_eq!(back.eval_f(&x).unwrap(), model.eval_f(&x).unwrap());
    println!("reloaded model agrees: F = {:?}", back.eval_f(&x).unwrap());
}
