//! Yaw-rate peaks along a chain of identical trailers, with and without
//! off-axle hitches.

use ntrailer::kernel::derive_model;
use ntrailer::sim::{generate, integrate, rwa, ScenarioKind, ScenarioParams};
use ntrailer::vehicle::{validate, Point, UnitSpec, ValidatedSpec, VehicleSpec, WheelSpec};

fn wheel(x: f64) -> WheelSpec {
    WheelSpec { position: Point::new(x, 0.0), label: String::new() }
}

/// Tractor with wheelbase 3 m and `trailers` trailers of drawbar `d`, hitched
/// `c` behind each axle.
fn train(trailers: usize, c: f64, d: f64) -> ValidatedSpec {
    let n = trailers + 1;
    let units = (1..=n)
        .map(|i| UnitSpec {
            wheels: if i == 1 { vec![wheel(0.0), wheel(3.0)] } else { vec![wheel(0.0)] },
            hitch_front: (i > 1).then(|| Point::new(d, 0.0)),
            hitch_rear: (i < n).then(|| Point::new(-c, 0.0)),
            label: String::new(),
        })
        .collect();
    validate(&VehicleSpec { units }).unwrap()
}

fn main() {
    for (c, d) in [(0.0, 4.0), (1.5, 2.0)] {
        let spec = train(3, c, d);
        let model = derive_model(&spec).unwrap();
        let params = ScenarioParams { units: 4, hold: Some(1.0), ..Default::default() };
        let traj = integrate(&spec, &model, &[0.0; 11], &generate(ScenarioKind::Step, &params).unwrap(), 0.01).unwrap();
        println!("hitch offset {c} m, drawbar {d} m");
        for j in 2..=4 {
            let r = rwa(&traj, 1, j);
            println!("  unit {j}: peak ratio {:.3}, peak at {:.2} s", r.peak_ratio.unwrap(), r.peak_time_j);
        }
    }
}
