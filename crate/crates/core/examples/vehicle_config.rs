//! Load a vehicle config, validate it and inspect its layout.

use ntrailer::io::{emit_config, parse_config, AngleUnit, VehicleConfigFile};
use ntrailer::vehicle::{state_layout, validate, VehicleSpec};

fn main() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/triaxle_tractor.json")).unwrap();
    let spec = validate(&parse_config(&text).unwrap().to_spec()).unwrap();

    for i in 1..=spec.n() {
        let unit = spec.unit(i).unwrap();
        println!("unit {i} ({}): {} wheels", unit.label, unit.wheels.len());
    }
    println!("state: {:?}", state_layout(&spec).names());
    println!("dependent wheels: {:?}", spec.dependent_wheels().collect::<Vec<_>>());
    println!("geometry: {:?}", spec.param_values());

    // Frames are moved onto each unit's first wheel during validation.
    let mut shifted: VehicleSpec = spec.spec().clone();
    for w in &mut shifted.units[0].wheels {
        w.position.x += 1.0;
    }
    let rebased = validate(&shifted).unwrap();
    for w in rebased.warnings() {
        println!("warning: {w}");
    }

    print!("{}", emit_config(&VehicleConfigFile::from_spec(rebased.spec(), AngleUnit::Rad)));
}
