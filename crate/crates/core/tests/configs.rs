use std::fs;
use std::path::Path;

use rbm::experiments::{Experiment, Scenario};

#[test]
fn shipped_configs_parse_and_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let experiment = if name.starts_with("langevin1d") {
            Experiment::Langevin1d
        } else if name.starts_with("lj-") {
            Experiment::LjEos
        } else if name.starts_with("scaling") {
            Experiment::Scaling
        } else {
            Experiment::EstimatorChecks
        };
        let text = fs::read_to_string(&path).unwrap();
        let sc = Scenario::from_toml(experiment, &text).unwrap_or_else(|e| panic!("{name}: {e}"));
        sc.validate().unwrap();
        count += 1;
    }
    assert!(count >= 5);
}
