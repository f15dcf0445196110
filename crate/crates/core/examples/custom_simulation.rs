//! Assembling a simulation by hand: bounded pair kernel, harmonic trap,
//! random batches of two, BAOAB Langevin steps.

use std::sync::Arc;

use rbm::forces::ForceField;
use rbm::integrators::{Simulation, StepSchedule, Thermostat};
use rbm::kernels::BoundedKernel;
use rbm::observables::{instantaneous_temperature, MeanAccumulator};
use rbm::rng::RngStream;
use rbm::state::{uniform_init, velocity_init, ExternalField, ParticleState, Regime};

fn main() -> rbm::Result<()> {
    let n = 200;
    let beta = 1.0;
    let rng = RngStream::new(42);
    let state = ParticleState::new(1, uniform_init(n, 1, 0.5, &rng)?, velocity_init(n, 1, beta, &rng)?)?;
    let field = ForceField::batch_only(
        Arc::new(BoundedKernel),
        Regime::MeanField.alpha(n),
        ExternalField::Harmonic { lambda: 2.5 },
        None,
    )?;
    let mut sim = Simulation::new(
        state,
        field,
        Thermostat::Langevin { gamma: 2.5 },
        StepSchedule::Fixed { tau: 0.05 },
        beta,
        Some(2),
        rng,
    )?;
    sim.advance_to(10.0)?;
    let (mut t, mut x2) = (MeanAccumulator::default(), MeanAccumulator::default());
    while sim.time() < 50.0 {
        sim.step()?;
        t.push(instantaneous_temperature(&sim.state));
        x2.push(sim.state.xs().iter().map(|x| x * x).sum::<f64>() / n as f64);
    }
    println!("steps {}  <T> = {:.4}  <x^2> = {:.4}", sim.steps_taken(), t.mean(), x2.mean());
    Ok(())
}
