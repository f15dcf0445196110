//! Random-batch forces heat the system. Stronger thermostat coupling and a
//! decreasing step schedule reduce the resulting pressure bias.

use rbm::experiments::lj::pressure_run;
use rbm::experiments::{Experiment, Scenario};
use rbm::integrators::{StepSchedule, Thermostat};
use rbm::rng::RngStream;

fn main() -> rbm::Result<()> {
    let mut sc = Scenario::default_for(Experiment::LjEos);
    sc.system.n = 500;
    sc.run.burn_in = 2.0;
    sc.run.t_end = Some(7.0);
    sc.run.samples = None;
    let rng = RngStream::new(sc.run.seed);
    let fixed = StepSchedule::Fixed { tau: 0.001 };
    let settings = [
        ("full forces", 10.0, fixed, false),
        ("rbm, gamma 10", 10.0, fixed, true),
        ("rbm, gamma 50", 50.0, fixed, true),
        ("rbm, decreasing tau", 10.0, StepSchedule::Decreasing { tau0: 0.001 }, true),
    ];
    for (label, gamma, schedule, rbm) in settings {
        let mut s = sc.clone();
        s.integrator.schedule = schedule;
        let r = pressure_run(&s, 0.7, Thermostat::Langevin { gamma }, rbm, usize::MAX, rng)?;
        println!("{label:<20} P = {:.4}  T = {:.4}", r.pressure.value, r.temperature.value);
    }
    Ok(())
}
