//! Equilibrium of the 1D mean-field Langevin system: random-batch runs at
//! several step sizes against a fine full-interaction reference.

use rbm::experiments::langevin1d::weak_sweep;
use rbm::experiments::{Experiment, Scenario};

fn main() -> rbm::Result<()> {
    let sc = Scenario::default_for(Experiment::Langevin1d);
    let sweep = weak_sweep(&sc)?;
    println!("{:>8}  {:>10}  {}", "tau", "L1", "relative weak errors");
    for p in &sweep.points {
        let errs: Vec<String> = p.errors.iter().map(|(f, e)| format!("{}={e:.4}", f.name())).collect();
        println!("{:>8}  {:>10.4}  {}", p.tau, p.l1, errs.join("  "));
    }
    Ok(())
}
