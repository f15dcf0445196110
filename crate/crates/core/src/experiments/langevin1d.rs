//! Harmonically confined particles in one dimension with the bounded kernel
//! `x / (1 + x^2)` in the mean-field regime.

use rayon::prelude::*;

use super::{build_simulation, sample_run, RecordSink, RunSpec, Scenario, Study, Table, Timer};
use crate::error::{Error, Result};
use crate::integrators::{NoiseTape, Simulation, StepSchedule};
use crate::observables::{
    histogram, l1_distance, loglog_slope, strong_error, uniform_edges, weak_error, TestFunction,
};
use crate::rng::RngStream;

use super::scenario::Langevin1dStudy;

// fork indices of the scenario seed
const WEAK_FORK: u64 = 0;
const STRONG_FORK: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct WeakPoint {
    pub tau: f64,
    pub errors: Vec<(TestFunction, f64)>,
    pub density: Vec<f64>,
    pub l1: f64,
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakSweep {
    pub edges: Vec<f64>,
    pub reference_density: Vec<f64>,
    pub reference_samples: Vec<f64>,
    pub points: Vec<WeakPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrongPoint {
    pub n: usize,
    pub tau: f64,
    /// Root mean square over repetitions.
    pub error: f64,
    pub per_repetition: Vec<f64>,
}

fn study(scenario: &Scenario) -> Result<&Langevin1dStudy> {
    match &scenario.study {
        Study::Langevin1d(s) => Ok(s),
        _ => Err(Error::config("study.kind", "expected a langevin1d study")),
    }
}

/// Simulation with step `tau`, driven by `tape` when given.
pub fn simulation(
    scenario: &Scenario,
    n: usize,
    tau: f64,
    rbm: bool,
    tape: Option<NoiseTape>,
    rng: RngStream,
) -> Result<Simulation> {
    let spec = RunSpec {
        n,
        schedule: StepSchedule::Fixed { tau },
        rbm,
        ..RunSpec::from_scenario(scenario)
    };
    let sim = build_simulation(scenario, &spec, rng)?;
    match tape {
        Some(t) => sim.with_tape(t),
        None => Ok(sim),
    }
}

/// All particle positions at every sampling time of the run block.
pub fn equilibrium_samples(
    scenario: &Scenario,
    tau: f64,
    rbm: bool,
    tape: Option<NoiseTape>,
    rng: RngStream,
) -> Result<Vec<f64>> {
    let mut sim = simulation(scenario, scenario.system.n, tau, rbm, tape, rng)?;
    let mut out = Vec::new();
    sample_run(&mut sim, &scenario.run, |s| {
        out.extend(s.state.xs());
        Ok(())
    })?;
    Ok(out)
}

/// Equilibrium runs at each step size of the study against a full
/// reference run. Repetitions pool their samples.
pub fn weak_sweep(scenario: &Scenario) -> Result<WeakSweep> {
    let st = study(scenario)?;
    let root = RngStream::new(scenario.run.seed).fork(WEAK_FORK);
    let reps: Vec<(RngStream, Option<NoiseTape>)> = (0..scenario.run.repetitions as u64)
        .map(|r| {
            let tape = st
                .coupled
                .then(|| NoiseTape::new(root.fork(2 * r + 1), st.reference_tau, 1));
            (root.fork(2 * r), tape)
        })
        .collect();
    let pooled = |tau: f64, rbm: bool| -> Result<Vec<f64>> {
        let runs = reps
            .par_iter()
            .map(|&(rng, tape)| equilibrium_samples(scenario, tau, rbm, tape, rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(runs.concat())
    };
    let edges = uniform_edges(st.histogram.lo, st.histogram.hi, st.histogram.bins);
    let reference_samples = pooled(st.reference_tau, false)?;
    let reference_density = histogram(&reference_samples, &edges)?;
    let points = st
        .taus
        .par_iter()
        .map(|&tau| {
            let samples = pooled(tau, scenario.rbm.enabled)?;
            let density = histogram(&samples, &edges)?;
            let errors = TestFunction::ALL
                .iter()
                .map(|&f| Ok((f, weak_error(&samples, &reference_samples, |x| f.eval(x))?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(WeakPoint {
                tau,
                errors,
                l1: l1_distance(&density, &reference_density, &edges),
                density,
                samples,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WeakSweep {
        edges,
        reference_density,
        reference_samples,
        points,
    })
}

/// Relative strong errors at time `t` of the sweep, for `n` particles.
/// Every repetition drives a full-interaction reference at the tape step
/// and each coarse run from one shared fine-grid tape.
pub fn strong_sweep(scenario: &Scenario, n: usize) -> Result<Vec<StrongPoint>> {
    let st = &study(scenario)?.strong;
    let root = RngStream::new(scenario.run.seed).fork(STRONG_FORK + n as u64);
    let per_rep = (0..st.repetitions as u64)
        .into_par_iter()
        .map(|r| {
            let rng = root.fork(2 * r);
            let tape = NoiseTape::new(root.fork(2 * r + 1), st.reference_tau, 1);
            let mut reference = simulation(scenario, n, st.reference_tau, false, Some(tape), rng)?;
            reference.advance_to(st.t)?;
            st.taus
                .par_iter()
                .map(|&tau| {
                    let mut sim = simulation(scenario, n, tau, scenario.rbm.enabled, Some(tape), rng)?;
                    sim.advance_to(st.t)?;
                    strong_error(&sim.state, &reference.state)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(st
        .taus
        .iter()
        .enumerate()
        .map(|(k, &tau)| {
            let errs: Vec<f64> = per_rep.iter().map(|e| e[k]).collect();
            let ms = errs.iter().map(|e| e * e).sum::<f64>() / errs.len() as f64;
            StrongPoint {
                n,
                tau,
                error: ms.sqrt(),
                per_repetition: errs,
            }
        })
        .collect())
}

/// Slope of `ln err` against `ln tau`.
pub fn strong_slope(points: &[StrongPoint]) -> Result<f64> {
    let tau: Vec<f64> = points.iter().map(|p| p.tau).collect();
    let err: Vec<f64> = points.iter().map(|p| p.error).collect();
    loglog_slope(&tau, &err)
}

pub fn run(scenario: &Scenario, timer: &mut Timer) -> Result<Vec<Table>> {
    let st = study(scenario)?;
    let method = if scenario.rbm.enabled { "rbm" } else { "full" };
    let weak = timer.time("weak", || weak_sweep(scenario))?;

    let mut errors = RecordSink::new(scenario);
    let mut hist = RecordSink::new(scenario);
    let mut samples = RecordSink::new(scenario);
    let centres: Vec<f64> = weak.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let reference_series = format!("reference tau={}", st.reference_tau);
    for (c, d) in centres.iter().zip(&weak.reference_density) {
        hist.push(&reference_series, "x", *c, "density", "1", *d, None);
    }
    if scenario.output.samples {
        for (k, x) in weak.reference_samples.iter().enumerate() {
            samples.push(&reference_series, "sample", k as f64, "x", "length", *x, None);
        }
    }
    for p in &weak.points {
        for &(f, e) in &p.errors {
            errors.push(method, "tau", p.tau, format!("weak_error {}", f.name()), "1", e, None);
        }
        errors.push(method, "tau", p.tau, "histogram_l1", "1", p.l1, None);
        let series = format!("{method} tau={}", p.tau);
        for (c, d) in centres.iter().zip(&p.density) {
            hist.push(&series, "x", *c, "density", "1", *d, None);
        }
        if scenario.output.samples {
            for (k, x) in p.samples.iter().enumerate() {
                samples.push(&series, "sample", k as f64, "x", "length", *x, None);
            }
        }
    }

    let mut strong = RecordSink::new(scenario);
    for &n in &st.strong.sizes {
        let points = timer.time(&format!("strong N={n}"), || strong_sweep(scenario, n))?;
        let series = format!("N={n}");
        for p in &points {
            let reps = p.per_repetition.len() as f64;
            let mean = p.per_repetition.iter().sum::<f64>() / reps;
            let var = p.per_repetition.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (reps - 1.0).max(1.0);
            strong.push(&series, "tau", p.tau, "strong_error", "1", p.error, Some((var / reps).sqrt()));
        }
        if points.len() >= 2 {
            strong.push(&series, "fit", 0.0, "loglog_slope", "1", strong_slope(&points)?, None);
        }
    }

    let mut tables = vec![
        errors.into_table("weak"),
        hist.into_table("histogram"),
        strong.into_table("strong"),
    ];
    if scenario.output.samples {
        tables.push(samples.into_table("samples"));
    }
    Ok(tables)
}
