//! Lennard-Jones fluid in a periodic box: pressure against density.

use rayon::prelude::*;

use super::{build_simulation, geometry, sample_run, thermostat_label, RecordSink, RunSpec, Scenario, Study, Table, Timer};
use crate::error::{Error, Result};
use crate::integrators::Thermostat;
use crate::observables::{ideal_gas_pressure, instantaneous_temperature, pressure, MeanAccumulator, ObservableReport};
use crate::rng::RngStream;
use crate::state::BoxGeometry;

use super::scenario::{EosStudy, KernelChoice};

#[derive(Debug, Clone, PartialEq)]
pub struct PressureRun {
    pub density: f64,
    pub thermostat: Thermostat,
    pub rbm: bool,
    pub pressure: ObservableReport,
    pub temperature: ObservableReport,
    /// `(time, instantaneous temperature)` for every `trace_every`-th sample.
    pub trace: Vec<(f64, f64)>,
}

impl PressureRun {
    pub fn series(&self) -> String {
        format!("{}-{}", thermostat_label(&self.thermostat), if self.rbm { "rbm" } else { "full" })
    }
}

fn study(scenario: &Scenario) -> Result<&EosStudy> {
    match &scenario.study {
        Study::LjEos(s) => Ok(s),
        _ => Err(Error::config("study.kind", "expected an lj-eos study")),
    }
}

/// Burn in, then record the virial pressure at the target temperature and
/// the kinetic temperature at every sampling point of the run block.
pub fn pressure_run(
    scenario: &Scenario,
    density: f64,
    thermostat: Thermostat,
    rbm: bool,
    trace_every: usize,
    rng: RngStream,
) -> Result<PressureRun> {
    let spec = RunSpec {
        density: Some(density),
        thermostat,
        rbm,
        ..RunSpec::from_scenario(scenario)
    };
    let geom: BoxGeometry = geometry(&spec)?.ok_or_else(|| Error::config("system.density", "missing"))?;
    let target_t = 1.0 / scenario.integrator.beta;
    let ideal = scenario.system.kernel == KernelChoice::None;
    let mut sim = build_simulation(scenario, &spec, rng)?;
    let mut p = MeanAccumulator::default();
    let mut t = MeanAccumulator::default();
    let mut trace = Vec::new();
    sample_run(&mut sim, &scenario.run, |s| {
        let value = if ideal {
            ideal_gas_pressure(&s.state, &geom, target_t)?
        } else {
            pressure(&s.state, &geom, target_t)?
        };
        p.push(value);
        let temp = instantaneous_temperature(&s.state);
        if t.count() % trace_every == 0 {
            trace.push((s.time(), temp));
        }
        t.push(temp);
        Ok(())
    })?;
    Ok(PressureRun {
        density,
        thermostat,
        rbm,
        pressure: p.report("pressure")?,
        temperature: t.report("temperature")?,
        trace,
    })
}

pub fn run(scenario: &Scenario, timer: &mut Timer) -> Result<Vec<Table>> {
    let st = study(scenario)?;
    let mut modes = Vec::new();
    if scenario.rbm.enabled {
        modes.push(true);
    }
    if st.oracle || !scenario.rbm.enabled {
        modes.push(false);
    }
    let mut jobs: Vec<(f64, Thermostat, bool)> = Vec::new();
    for &rho in &st.densities {
        for &th in &st.thermostats {
            for &rbm in &modes {
                jobs.push((rho, th, rbm));
            }
        }
    }
    let root = RngStream::new(scenario.run.seed);
    let runs = timer.time("simulate", || {
        jobs.par_iter()
            .enumerate()
            .map(|(k, &(rho, th, rbm))| pressure_run(scenario, rho, th, rbm, st.trace_every, root.fork(k as u64)))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut summary = RecordSink::new(scenario);
    let mut trace = RecordSink::new(scenario);
    for r in &runs {
        let series = r.series();
        summary.push(&series, "density", r.density, "pressure", "reduced", r.pressure.value, Some(r.pressure.standard_error));
        summary.push(
            &series,
            "density",
            r.density,
            "temperature",
            "reduced",
            r.temperature.value,
            Some(r.temperature.standard_error),
        );
        let trace_series = format!("{series} rho={}", r.density);
        for &(time, temp) in &r.trace {
            trace.push(&trace_series, "time", time, "temperature", "reduced", temp, None);
        }
    }
    Ok(vec![summary.into_table("pressure"), trace.into_table("trace")])
}
