//! Pressure of a Lennard-Jones fluid with split random-batch forces and with
//! full forces, under both thermostats.

use rbm::experiments::lj::pressure_run;
use rbm::experiments::{Experiment, Scenario};
use rbm::integrators::Thermostat;
use rbm::rng::RngStream;

fn main() -> rbm::Result<()> {
    let mut sc = Scenario::default_for(Experiment::LjEos);
    sc.run.burn_in = 5.0;
    sc.run.samples = Some(2000);
    let rng = RngStream::new(sc.run.seed);
    for th in [Thermostat::Langevin { gamma: 50.0 }, Thermostat::Andersen { nu: 50.0 }] {
        for rho in [0.3, 0.5, 0.7] {
            for rbm in [true, false] {
                let r = pressure_run(&sc, rho, th, rbm, usize::MAX, rng)?;
                println!(
                    "{:<14} rho = {rho}  P = {:.4} +- {:.4}  T = {:.4}",
                    r.series(),
                    r.pressure.value,
                    r.pressure.standard_error,
                    r.temperature.value
                );
            }
        }
    }
    Ok(())
}
