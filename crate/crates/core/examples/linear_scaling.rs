//! Wall time per step against particle count for split random-batch forces
//! and for full pair sums.

use rbm::experiments::scaling::scaling_curve;
use rbm::experiments::{Experiment, Scenario, Study};

fn main() -> rbm::Result<()> {
    let mut sc = Scenario::default_for(Experiment::Scaling);
    if let Study::Scaling(st) = &mut sc.study {
        st.sizes = vec![256, 512, 1024, 2048];
    }
    for rbm in [true, false] {
        let curve = scaling_curve(&sc, rbm)?;
        for (n, s) in curve.sizes.iter().zip(&curve.seconds) {
            println!("{:<5} N = {n:<6} {:.3e} s/step", if rbm { "rbm" } else { "full" }, s);
        }
        println!("slope {:.3}", curve.slope()?);
    }
    Ok(())
}
