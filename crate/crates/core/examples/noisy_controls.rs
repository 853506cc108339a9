//! Sensitivity of the rearward amplification to noise on the control inputs.

use ntrailer::io::parse_config;
use ntrailer::kernel::derive_model;
use ntrailer::sim::{generate, inject_noise, integrate, rwa, ScenarioKind, ScenarioParams};
use ntrailer::vehicle::validate;

fn main() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/one_trailer_on_axle.json")).unwrap();
    let spec = validate(&parse_config(&text).unwrap().to_spec()).unwrap();
    let model = derive_model(&spec).unwrap();
    let trace = generate(ScenarioKind::Step, &ScenarioParams { units: 2, hold: Some(1.0), ..Default::default() }).unwrap();

    let clean = rwa(&integrate(&spec, &model, &[0.0; 7], &trace, 0.01).unwrap(), 1, 2).peak_ratio.unwrap();
    println!("noise-free peak ratio {clean:.4}");
    for seed in 0..5 {
        let noisy = inject_noise(&trace, 0.1, 0.01, seed);
        let r = rwa(&integrate(&spec, &model, &[0.0; 7], &noisy, 0.01).unwrap(), 1, 2).peak_ratio.unwrap();
        println!("seed {seed}: {r:.4} ({:+.2}%)", 100.0 * (r - clean) / clean);
    }
}
