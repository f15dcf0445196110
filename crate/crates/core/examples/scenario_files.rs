//! Scenarios as TOML overlays: parse, run, and read the long-format CSV back.

use rbm::experiments::{read_csv, run_and_write, Experiment, Scenario};

const CONFIG: &str = r#"
name = "estimator-demo"

[run]
seed = 9

[study]
kind = "estimator-checks"
exhaustive = [[4, 2], [6, 3]]
position_sets = 3
mc_draws = 20000
"#;

fn main() -> rbm::Result<()> {
    let mut sc = Scenario::from_toml(Experiment::EstimatorChecks, CONFIG)?;
    sc.output.dir = std::env::temp_dir().join("rbm-scenario-demo");
    println!("scenario hash {}", sc.hash());
    let manifest = run_and_write(&sc)?;
    for path in &manifest.outputs {
        let rows = read_csv(path)?;
        println!("{}: {} rows", path.display(), rows.len());
        for r in rows.iter().filter(|r| r.observable.starts_with("E[")) {
            println!("  {} {} = {:.5}", r.series, r.observable, r.value);
        }
    }
    Ok(())
}
