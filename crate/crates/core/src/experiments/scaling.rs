//! Wall time per step against system size.

use std::time::Instant;

use super::{build_simulation, RecordSink, RunSpec, Scenario, Study, Table, Timer};
use crate::error::{Error, Result};
use crate::observables::loglog_slope;
use crate::rng::RngStream;

use super::scenario::ScalingStudy;

fn study(scenario: &Scenario) -> Result<&ScalingStudy> {
    match &scenario.study {
        Study::Scaling(s) => Ok(s),
        _ => Err(Error::config("study.kind", "expected a scaling study")),
    }
}

/// Seconds per step for `n` particles: the fastest of the study's timing
/// blocks. Set-up, melting and warm-up steps are not timed.
pub fn seconds_per_step(scenario: &Scenario, n: usize, rbm: bool) -> Result<f64> {
    let st = study(scenario)?;
    let spec = RunSpec {
        n,
        density: Some(st.density),
        rbm,
        ..RunSpec::from_scenario(scenario)
    };
    let rng = RngStream::new(scenario.run.seed);
    let mut melt = build_simulation(scenario, &RunSpec { rbm: true, ..spec }, rng)?;
    melt.advance_to(st.melt_time)?;
    let mut sim = build_simulation(scenario, &spec, rng)?.with_state(melt.state)?;
    for _ in 0..st.warmup_steps {
        sim.step()?;
    }
    let mut best = f64::INFINITY;
    for _ in 0..st.blocks {
        let start = Instant::now();
        let mut steps = 0usize;
        while steps < st.min_steps || start.elapsed().as_secs_f64() < st.min_seconds {
            sim.step()?;
            steps += 1;
        }
        best = best.min(start.elapsed().as_secs_f64() / steps as f64);
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingCurve {
    pub rbm: bool,
    pub sizes: Vec<usize>,
    pub seconds: Vec<f64>,
}

impl ScalingCurve {
    pub fn slope(&self) -> Result<f64> {
        let n: Vec<f64> = self.sizes.iter().map(|&n| n as f64).collect();
        loglog_slope(&n, &self.seconds)
    }
}

/// Timings are taken one size at a time so that runs do not compete for cores.
pub fn scaling_curve(scenario: &Scenario, rbm: bool) -> Result<ScalingCurve> {
    let st = study(scenario)?;
    let seconds = st
        .sizes
        .iter()
        .map(|&n| seconds_per_step(scenario, n, rbm))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalingCurve {
        rbm,
        sizes: st.sizes.clone(),
        seconds,
    })
}

pub fn run(scenario: &Scenario, timer: &mut Timer) -> Result<Vec<Table>> {
    let st = study(scenario)?;
    let mut modes = Vec::new();
    if scenario.rbm.enabled {
        modes.push(true);
    }
    if st.full_baseline || !scenario.rbm.enabled {
        modes.push(false);
    }
    let mut sink = RecordSink::new(scenario);
    for rbm in modes {
        let series = if rbm { "rbm" } else { "full" };
        let curve = timer.time(series, || scaling_curve(scenario, rbm))?;
        for (&n, &s) in curve.sizes.iter().zip(&curve.seconds) {
            sink.push(series, "N", n as f64, "seconds_per_step", "s", s, None);
        }
        if curve.sizes.len() >= 2 {
            sink.push(series, "fit", 0.0, "loglog_slope", "1", curve.slope()?, None);
        }
    }
    Ok(vec![sink.into_table("timing")])
}
