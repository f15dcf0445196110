//! Checks of the batch estimator identities: exact averages over every
//! partition of small systems, and Monte Carlo moments of the batch
//! indicators.

use super::{RecordSink, Scenario, Study, Table, Timer};
use crate::batching::{all_partitions, random_partition, variance_factor, EstimatorStats};
use crate::error::{Error, Result};
use crate::kernels::{BoundedKernel, Kernel, LennardJones, ZeroKernel};
use crate::observables::MeanAccumulator;
use crate::rng::RngStream;
use crate::state::{norm2, uniform_init};

use super::scenario::{EstimatorStudy, InitChoice, KernelChoice};

const EXHAUSTIVE_FORK: u64 = 0;
const INDICATOR_FORK: u64 = 1;

fn study(scenario: &Scenario) -> Result<&EstimatorStudy> {
    match &scenario.study {
        Study::EstimatorChecks(s) => Ok(s),
        _ => Err(Error::config("study.kind", "expected an estimator-checks study")),
    }
}

/// Worst case over particles of one position set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExhaustiveCheck {
    /// `max_i |E chi_i|`
    pub bias: f64,
    /// `max_i |E |chi_i|^2 - factor Lambda_i|`, relative to `factor Lambda_i`
    /// (absolute when that is zero).
    pub variance_error: f64,
}

/// Average `chi_i` and `|chi_i|^2` over every partition of `positions`.
pub fn exhaustive_check(positions: &[crate::state::Vec3], p: usize, kernel: &dyn Kernel) -> Result<ExhaustiveCheck> {
    let n = positions.len();
    let parts = all_partitions(n, p)?;
    let count = parts.len() as f64;
    let factor = variance_factor(n, p);
    let mut bias: f64 = 0.0;
    let mut variance_error: f64 = 0.0;
    for i in 0..n {
        let mut mean = [0.0; 3];
        let mut second = 0.0;
        let mut lambda = 0.0;
        for part in &parts {
            let s = EstimatorStats::compute(positions, kernel, part, i)?;
            for c in 0..3 {
                mean[c] += s.chi[c] / count;
            }
            second += norm2(&s.chi) / count;
            lambda = s.lambda;
        }
        bias = bias.max(norm2(&mean).sqrt());
        let expected = factor * lambda;
        let diff = (second - expected).abs();
        variance_error = variance_error.max(if expected > 0.0 { diff / expected } else { diff });
    }
    Ok(ExhaustiveCheck { bias, variance_error })
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

/// `E I_01` and `E I_01 I_02` over `draws` random partitions, where `I_ij`
/// indicates that `i` and `j` share a batch.
pub fn indicator_moments(n: usize, p: usize, draws: usize, rng: &RngStream) -> Result<(Estimate, Estimate)> {
    let mut single = MeanAccumulator::default();
    let mut double = MeanAccumulator::default();
    for k in 0..draws as u64 {
        let part = random_partition(n, p, rng, k)?;
        let a = part.same_batch(0, 1)?;
        let b = part.same_batch(0, 2)?;
        single.push(a as u8 as f64);
        double.push((a && b) as u8 as f64);
    }
    let est = |m: &MeanAccumulator| Estimate {
        mean: m.mean(),
        std_error: m.standard_error(),
    };
    Ok((est(&single), est(&double)))
}

pub fn expected_indicator_moments(n: usize, p: usize) -> (f64, f64) {
    let (n, p) = (n as f64, p as f64);
    ((p - 1.0) / (n - 1.0), (p - 1.0) * (p - 2.0) / ((n - 1.0) * (n - 2.0)))
}

fn kernel(choice: KernelChoice) -> Box<dyn Kernel> {
    match choice {
        KernelChoice::Bounded => Box::new(BoundedKernel),
        KernelChoice::LennardJones => Box::new(LennardJones),
        KernelChoice::None => Box::new(ZeroKernel),
    }
}

pub fn run(scenario: &Scenario, timer: &mut Timer) -> Result<Vec<Table>> {
    let st = study(scenario)?;
    let sys = &scenario.system;
    let half_width = match sys.init {
        InitChoice::Uniform { half_width } => half_width,
        InitChoice::Lattice => return Err(Error::config("system.init", "estimator checks draw uniform positions")),
    };
    let k = kernel(sys.kernel);
    let root = RngStream::new(scenario.run.seed);
    let mut sink = RecordSink::new(scenario);

    timer.time("exhaustive", || {
        let base = root.fork(EXHAUSTIVE_FORK);
        for &(n, p) in &st.exhaustive {
            let series = format!("exhaustive N={n} p={p}");
            for set in 0..st.position_sets {
                let x = uniform_init(n, sys.dim, half_width, &base.fork((n * 1000 + set) as u64))?;
                let c = exhaustive_check(&x, p, k.as_ref())?;
                sink.push(&series, "set", set as f64, "chi_bias", "force", c.bias, None);
                sink.push(&series, "set", set as f64, "variance_error", "1", c.variance_error, None);
            }
        }
        Ok(())
    })?;

    timer.time("indicators", || {
        let (n, p) = (st.mc_n, st.mc_p);
        let (single, double) = indicator_moments(n, p, st.mc_draws, &root.fork(INDICATOR_FORK))?;
        let (e1, e2) = expected_indicator_moments(n, p);
        let series = format!("monte-carlo N={n} p={p}");
        let draws = st.mc_draws as f64;
        sink.push(&series, "draws", draws, "E[I_12]", "1", single.mean, Some(single.std_error));
        sink.push(&series, "draws", draws, "E[I_12] expected", "1", e1, None);
        sink.push(&series, "draws", draws, "E[I_12 I_13]", "1", double.mean, Some(double.std_error));
        sink.push(&series, "draws", draws, "E[I_12 I_13] expected", "1", e2, None);
        Ok(())
    })?;
    Ok(vec![sink.into_table("identities")])
}
