//! The command-line workflow run in-process: scenario, derive, simulate.

use ntrailer::cli::run;

fn main() {
    let dir = std::env::temp_dir().join("ntrailer-cli-workflow");
    std::fs::create_dir_all(&dir).unwrap();
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/three_trailers.json");
    let trace = dir.join("trace.csv");
    let trace = trace.to_str().unwrap();
    let model = dir.join("model.tex");
    let traj = dir.join("traj.csv");
    let (mut out, mut err) = (std::io::stdout(), std::io::stderr());

    let steps: [&[&str]; 3] = [
        &["ntrailer", "scenario", "--kind", "sine", "--params", r#"{"units": 4, "steer": 0.2, "frequency": 0.1}"#, "--out", trace],
        &["ntrailer", "derive", "--config", config, "--emit", "latex", "--out", model.to_str().unwrap()],
        &["ntrailer", "simulate", "--config", config, "--controls", trace, "--x0", "[0,0,0,0,0,0,0,0,0,0,0]", "--hold", "linear", "--out", traj.to_str().unwrap()],
    ];
    for args in steps {
        let code = run(args.iter().copied(), &mut out, &mut err);
        println!("{} -> exit {code}", args[1]);
    }
    println!("outputs in {}", dir.display());
}
