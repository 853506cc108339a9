//! Derive the kinematic model of an n-trailer and evaluate it.

use ntrailer::io::parse_config;
use ntrailer::kernel::derive_model;
use ntrailer::vehicle::validate;

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "one_trailer_on_axle".into());
    let path = format!("{}/configs/{name}.json", env!("CARGO_MANIFEST_DIR"));
    let spec = validate(&parse_config(&std::fs::read_to_string(path).unwrap()).unwrap().to_spec()).unwrap();
    let model = derive_model(&spec).unwrap();

    for (name, f) in ntrailer::io::f_names(model.n()).iter().zip(&model.f) {
        println!("{name} = {f}");
    }
    for s in &model.singularities {
        println!("singular where {} = 0 ({})", s.denominator, s.description);
    }

    let mut x = vec![0.0; model.state_dim()];
    x[2 + model.n() + 1] = 0.2; // front wheel steering angle
    let value = model.evaluate(&x).unwrap();
    println!("F at x = {x:?}:\n{:?}", value.f);
    println!("J:{}", value.j);
}
