//! The batch force estimator is unbiased with a known variance. Both are
//! checked exactly by enumerating every partition of a small system.

use rbm::batching::variance_factor;
use rbm::experiments::estimator::{exhaustive_check, expected_indicator_moments, indicator_moments};
use rbm::kernels::BoundedKernel;
use rbm::rng::RngStream;
use rbm::state::uniform_init;

fn main() -> rbm::Result<()> {
    let rng = RngStream::new(3);
    for (n, p) in [(4, 2), (6, 2), (6, 3)] {
        let x = uniform_init(n, 3, 2.0, &rng.fork(n as u64))?;
        let c = exhaustive_check(&x, p, &BoundedKernel)?;
        println!(
            "N = {n} p = {p}: |E chi| = {:.1e}, variance factor {:.4}, relative error {:.1e}",
            c.bias,
            variance_factor(n, p),
            c.variance_error
        );
    }
    let (single, double) = indicator_moments(20, 4, 100_000, &rng)?;
    let (e1, e2) = expected_indicator_moments(20, 4);
    println!("E I12 = {:.5} +- {:.5} (exact {e1:.5})", single.mean, single.std_error);
    println!("E I12 I13 = {:.5} +- {:.5} (exact {e2:.5})", double.mean, double.std_error);
    Ok(())
}
