//! Generate control traces and round-trip them through CSV.

use ntrailer::io::{read_trace, write_trace, AngleUnit};
use ntrailer::sim::{generate, ScenarioKind, ScenarioParams};

fn main() {
    for kind in [ScenarioKind::Step, ScenarioKind::Sine, ScenarioKind::Circle] {
        let params = ScenarioParams { units: 2, duration: 2.0, sample_dt: 0.25, ..Default::default() };
        let trace = generate(kind, &params).unwrap();
        let mut csv = Vec::new();
        write_trace(&mut csv, &trace).unwrap();
        let text = String::from_utf8(csv).unwrap();
        println!("{kind:?}:\n{text}");
        let back = read_trace(text.as_bytes(), 2, AngleUnit::Rad, trace.hold()).unwrap();
        assert_eq!(back, trace);
    }
}
