//! Pathwise error of random-batch trajectories against a coupled fine-step
//! reference, and its log-log slope in the step size.

use rbm::experiments::langevin1d::{strong_slope, strong_sweep};
use rbm::experiments::{Experiment, Scenario};

fn main() -> rbm::Result<()> {
    let sc = Scenario::default_for(Experiment::Langevin1d);
    let points = strong_sweep(&sc, 50)?;
    for p in &points {
        println!("tau = {:<10} err = {:.4e}", p.tau, p.error);
    }
    println!("slope = {:.3}", strong_slope(&points)?);
    Ok(())
}
