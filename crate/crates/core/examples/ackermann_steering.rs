//! Steering angles of dependent wheels and virtual hitch angles.

use ntrailer::ackermann::{resolve_dependent_angles, single_unit_tan_formula, virtual_hitch_steer, HitchSide};
use ntrailer::io::parse_config;
use ntrailer::kernel::derive_model;
use ntrailer::vehicle::validate;

fn load(name: &str) -> ntrailer::vehicle::ValidatedSpec {
    let path = format!("{}/configs/{name}.json", env!("CARGO_MANIFEST_DIR"));
    validate(&parse_config(&std::fs::read_to_string(path).unwrap()).unwrap().to_spec()).unwrap()
}

fn main() {
    // A car turning left on a 10 m radius.
    let spec = load("car_ackermann");
    let model = derive_model(&spec).unwrap();
    let (l, t, r) = (2.7f64, 1.6, 10.0);
    let x = [0.0, 0.0, 0.0, 0.0, (l / r).atan()];
    for ((i, k), s) in resolve_dependent_angles(&spec, &model, &x).unwrap() {
        let label = &spec.unit(i).unwrap().wheels[k - 1].label;
        println!("{label:>12}: {:+.6} rad", s.angle);
    }
    println!("expected left  {:+.6}", (l / (r - t / 2.0)).atan());
    println!("expected right {:+.6}", (l / (r + t / 2.0)).atan());

    let tan = single_unit_tan_formula(l, 0.0, l, t / 2.0, 0.0, x[4]).unwrap();
    println!("closed form, left: {:+.6}", tan.atan());

    // Articulation seen at the fifth wheel of a semitrailer.
    let spec = load("semi_off_axle");
    let model = derive_model(&spec).unwrap();
    let x = [0.0, 0.0, 0.3, 0.0, 0.0, 0.15, 0.0];
    let u = [1.0, 0.0, 0.0, 0.0];
    let s = virtual_hitch_steer(&spec, &model, &x, &u, 2, HitchSide::Front).unwrap();
    println!("trailer hitch steering angle: {:+.6} rad", s.angle);
}
