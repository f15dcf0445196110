use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use crate::error::Result;

/// One observation in the long-format CSV schema shared by every table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub scenario: String,
    pub scenario_hash: String,
    pub seed: u64,
    /// Which run or curve the row belongs to, e.g. `langevin-rbm`.
    pub series: String,
    /// Name of the independent variable: `tau`, `density`, `N`, `x`, `time`, ...
    pub coord_name: String,
    pub coord: f64,
    pub observable: String,
    pub unit: String,
    pub value: f64,
    pub std_error: Option<f64>,
}

/// Rows destined for `<scenario>_<stem>.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub stem: String,
    pub records: Vec<Record>,
}

/// Builds records that share the scenario columns.
#[derive(Debug, Clone)]
pub struct RecordSink {
    scenario: String,
    hash: String,
    seed: u64,
    pub records: Vec<Record>,
}

impl RecordSink {
    pub fn new(scenario: &Scenario) -> Self {
        Self {
            scenario: scenario.name.clone(),
            hash: scenario.hash(),
            seed: scenario.run.seed,
            records: Vec::new(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn push(
        &mut self,
        series: impl Into<String>,
        coord_name: &str,
        coord: f64,
        observable: impl Into<String>,
        unit: &str,
        value: f64,
        std_error: Option<f64>,
    ) {
        self.records.push(Record {
            scenario: self.scenario.clone(),
            scenario_hash: self.hash.clone(),
            seed: self.seed,
            series: series.into(),
            coord_name: coord_name.into(),
            coord,
            observable: observable.into(),
            unit: unit.into(),
            value,
            std_error,
        });
    }

    pub fn into_table(self, stem: &str) -> Table {
        Table {
            stem: stem.into(),
            records: self.records,
        }
    }
}

pub fn write_csv(path: &Path, records: &[Record]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<Record>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub name: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Running,
    Completed,
    Failed { message: String },
}

/// Sidecar JSON describing a run. Written before the run starts and
/// rewritten when it ends. Wall-clock times live here, never in the CSVs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario: Scenario,
    pub scenario_hash: String,
    pub seed: u64,
    pub version: String,
    pub threads: usize,
    pub phases: Vec<Phase>,
    pub outputs: Vec<PathBuf>,
    pub status: Status,
}

impl RunManifest {
    pub fn new(scenario: &Scenario) -> Self {
        Self {
            scenario: scenario.clone(),
            scenario_hash: scenario.hash(),
            seed: scenario.run.seed,
            version: env!("CARGO_PKG_VERSION").into(),
            threads: rayon::current_num_threads(),
            phases: Vec::new(),
            outputs: Vec::new(),
            status: Status::Running,
        }
    }

    pub fn path(scenario: &Scenario) -> PathBuf {
        scenario.output.dir.join(format!("{}.manifest.json", scenario.name))
    }

    pub fn write(&self) -> Result<()> {
        let path = Self::path(&self.scenario);
        fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

/// Wall-clock bookkeeping for the manifest.
#[derive(Debug, Default)]
pub struct Timer {
    pub phases: Vec<Phase>,
}

impl Timer {
    pub fn time<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f();
        self.phases.push(Phase {
            name: name.into(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }
}
