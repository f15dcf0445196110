//! Scenario files and the four experiment families.
//!
//! A [`Scenario`] is a TOML document overlaid on per-experiment defaults.
//! Running it produces long-format CSV tables (see [`Record`]) and a JSON
//! [`RunManifest`] next to them.
//!
//! ```no_run
//! use rbm::experiments::{run_and_write, Experiment, Scenario};
//!
//! let mut scenario = Scenario::from_toml(Experiment::LjEos, "[study]\ndensities = [0.5]").unwrap();
//! scenario.output.dir = "target/eos".into();
//! let manifest = run_and_write(&scenario).unwrap();
//! println!("{:?}", manifest.outputs);
//! ```

use std::fs;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::forces::ForceField;
use crate::integrators::{Simulation, StepSchedule, Thermostat};
use crate::kernels::{lj_split, BoundedKernel, Kernel, LennardJones, ZeroKernel};
use crate::rng::RngStream;
use crate::state::{
    box_from_density, lattice_init, uniform_init, velocity_init, BoxGeometry, ParticleState,
};

pub mod estimator;
pub mod langevin1d;
pub mod lj;
mod output;
pub mod scaling;
mod scenario;

pub use output::{read_csv, write_csv, Phase, Record, RecordSink, RunManifest, Status, Table, Timer};
pub use scenario::{
    EosStudy, EstimatorStudy, Experiment, HistogramSpec, InitChoice, IntegratorBlock, KernelChoice,
    Langevin1dStudy, OutputBlock, RbmBlock, RunBlock, ScalingStudy, Scenario, StrongSweep, Study,
    SystemBlock, SCENARIO_VERSION,
};

/// What varies between the runs of one study; everything else comes from
/// the scenario's system and integrator blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSpec {
    pub n: usize,
    pub density: Option<f64>,
    pub schedule: StepSchedule,
    pub thermostat: Thermostat,
    pub rbm: bool,
}

impl RunSpec {
    /// The scenario's own system and integrator settings.
    pub fn from_scenario(scenario: &Scenario) -> Self {
        Self {
            n: scenario.system.n,
            density: scenario.system.density,
            schedule: scenario.integrator.schedule,
            thermostat: scenario.integrator.thermostat,
            rbm: scenario.rbm.enabled,
        }
    }
}

pub fn geometry(spec: &RunSpec) -> Result<Option<BoxGeometry>> {
    spec.density.map(|rho| box_from_density(spec.n, rho)).transpose()
}

/// Initial state, force field and integrator for one run. Initial positions
/// and velocities depend only on `rng`, so runs sharing `rng` start from
/// the same state.
pub fn build_simulation(scenario: &Scenario, spec: &RunSpec, rng: RngStream) -> Result<Simulation> {
    let sys = &scenario.system;
    let beta = scenario.integrator.beta;
    let geom = geometry(spec)?;
    let positions = match (sys.init, geom) {
        (InitChoice::Uniform { half_width }, _) => uniform_init(spec.n, sys.dim, half_width, &rng)?,
        (InitChoice::Lattice, Some(g)) => lattice_init(spec.n, &g),
        (InitChoice::Lattice, None) => {
            return Err(Error::config("system.init", "lattice start needs a density"))
        }
    };
    let velocities = velocity_init(spec.n, sys.dim, beta, &rng)?;
    let state = ParticleState::new(sys.dim, positions, velocities)?;
    let alpha = sys.regime.alpha(spec.n);
    let kernel: Arc<dyn Kernel> = match sys.kernel {
        KernelChoice::Bounded => Arc::new(BoundedKernel),
        KernelChoice::LennardJones => Arc::new(LennardJones),
        KernelChoice::None => Arc::new(ZeroKernel),
    };
    let (field, batch) = if spec.rbm {
        let field = match (sys.kernel, geom) {
            (KernelChoice::LennardJones, Some(g)) if scenario.rbm.splitting => {
                ForceField::split(lj_split(), alpha, sys.external, g)?
            }
            (KernelChoice::LennardJones, _) => {
                return Err(Error::config(
                    "rbm.splitting",
                    "Lennard-Jones forces cannot be batched without splitting",
                ))
            }
            _ => ForceField::batch_only(kernel, alpha, sys.external, geom)?,
        };
        (field, Some(scenario.rbm.p))
    } else {
        (ForceField::full(kernel, alpha, sys.external, geom), None)
    };
    Simulation::new(state, field, spec.thermostat, spec.schedule, beta, batch, rng)
}

/// Burn in, then call `observe` at each sampling point of `plan`: at
/// `burn_in + k dt` for `k = 1, 2, ...` with a sampling interval, otherwise
/// after every step. Returns the number of samples taken.
pub fn sample_run(
    sim: &mut Simulation,
    plan: &RunBlock,
    mut observe: impl FnMut(&Simulation) -> Result<()>,
) -> Result<usize> {
    sim.advance_to(plan.burn_in)?;
    let limit = plan.samples.unwrap_or(usize::MAX);
    let mut taken = 0;
    match plan.sample_every {
        Some(dt) => loop {
            let t = plan.burn_in + (taken + 1) as f64 * dt;
            if taken >= limit || plan.t_end.is_some_and(|end| t > end + 1e-9 * dt) {
                break;
            }
            sim.advance_to(t)?;
            observe(sim)?;
            taken += 1;
        },
        None => {
            while taken < limit && plan.t_end.is_none_or(|end| sim.time() < end - 1e-6 * sim.next_tau()) {
                sim.step()?;
                observe(sim)?;
                taken += 1;
            }
        }
    }
    Ok(taken)
}

/// Run a scenario without touching the file system.
pub fn execute(scenario: &Scenario, timer: &mut Timer) -> Result<Vec<Table>> {
    scenario.validate()?;
    match scenario.experiment() {
        Experiment::Langevin1d => langevin1d::run(scenario, timer),
        Experiment::LjEos => lj::run(scenario, timer),
        Experiment::Scaling => scaling::run(scenario, timer),
        Experiment::EstimatorChecks => estimator::run(scenario, timer),
    }
}

/// Run a scenario and write `<dir>/<name>_<table>.csv` files plus
/// `<dir>/<name>.manifest.json`. The manifest is written first with status
/// `running` and rewritten at the end, also on failure.
pub fn run_and_write(scenario: &Scenario) -> Result<RunManifest> {
    scenario.validate()?;
    fs::create_dir_all(&scenario.output.dir)?;
    let mut manifest = RunManifest::new(scenario);
    manifest.write()?;
    let mut timer = Timer::default();
    let result = execute(scenario, &mut timer).and_then(|tables| {
        timer.time("write", || {
            let mut paths = Vec::new();
            for t in &tables {
                let path = scenario.output.dir.join(format!("{}_{}.csv", scenario.name, t.stem));
                write_csv(&path, &t.records)?;
                paths.push(path);
            }
            Ok(paths)
        })
    });
    manifest.phases = timer.phases;
    match result {
        Ok(paths) => {
            manifest.outputs = paths;
            manifest.status = Status::Completed;
            manifest.write()?;
            Ok(manifest)
        }
        Err(e) => {
            manifest.status = Status::Failed { message: e.to_string() };
            manifest.write()?;
            Err(e)
        }
    }
}

/// Short label of a thermostat for series names.
pub fn thermostat_label(t: &Thermostat) -> &'static str {
    match t {
        Thermostat::None => "verlet",
        Thermostat::Langevin { .. } => "langevin",
        Thermostat::Andersen { .. } => "andersen",
    }
}
