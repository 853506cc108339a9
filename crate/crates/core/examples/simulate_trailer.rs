//! Step steer of a car towing a short trailer: rearward amplification and
//! offtracking.

use ntrailer::io::{parse_config, write_trajectory};
use ntrailer::kernel::derive_model;
use ntrailer::sim::{generate, integrate, offtracking, rwa, ScenarioKind, ScenarioParams};
use ntrailer::vehicle::validate;

fn main() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/car_short_trailer.json")).unwrap();
    let spec = validate(&parse_config(&text).unwrap().to_spec()).unwrap();
    let model = derive_model(&spec).unwrap();

    let params = ScenarioParams { units: 2, speed: 3.0, steer: 0.15, hold: Some(1.0), duration: 10.0, ..Default::default() };
    let trace = generate(ScenarioKind::Step, &params).unwrap();
    let traj = integrate(&spec, &model, &[0.0; 7], &trace, 0.01).unwrap();

    let r = rwa(&traj, 1, 2);
    println!("peak-ratio RWA {:.3}, trailer peak {:.2} s after the car", r.peak_ratio.unwrap(), r.peak_lag());
    let off = offtracking(&traj, 1, 2);
    let peak = off.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
    println!("peak offtracking {peak:+.3} m (positive is left of the car's path)");

    let out = std::env::temp_dir().join("car_short_trailer.csv");
    write_trajectory(std::fs::File::create(&out).unwrap(), &traj).unwrap();
    println!("trajectory written to {}", out.display());
}
