//! Print the no-slip constraint rows of a tractor with one trailer.

use ntrailer::constraints::{build_pfaffian, wheel_constraint_row};
use ntrailer::io::parse_config;
use ntrailer::vehicle::{validate, StateLayout};

fn main() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/semi_off_axle.json")).unwrap();
    let spec = validate(&parse_config(&text).unwrap().to_spec()).unwrap();
    let p = build_pfaffian(&spec).unwrap();
    let names = StateLayout::new(spec.n()).names();

    for row in &p.rows {
        println!("wheel {:?}:", row.source);
        for (name, c) in names.iter().zip(&row.coefficients) {
            if !c.is_zero() {
                println!("  d{name}: {c}");
            }
        }
    }

    // Rows of wheels that are not independently steered keep their own angle.
    let row = wheel_constraint_row(&spec, 1, 2).unwrap();
    println!("front wheel row kind: {:?}", row.kind);
}
