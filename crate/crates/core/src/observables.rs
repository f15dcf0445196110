//! Measurements on states and sample sets.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::neighbor::CellList;
use crate::state::{minimal_image_1d, norm2, sub, BoxGeometry, ParticleState, Vec3};

/// Mean of a scalar series with its plain standard error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableReport {
    pub name: String,
    pub value: f64,
    pub sample_count: usize,
    pub standard_error: f64,
}

/// Streaming mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanAccumulator {
    count: usize,
    mean: f64,
    m2: f64,
}

impl MeanAccumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn standard_error(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count as f64 - 1.0) / self.count as f64).sqrt()
        }
    }

    pub fn report(&self, name: impl Into<String>) -> Result<ObservableReport> {
        if self.count == 0 {
            return Err(Error::config("observable", "no samples collected"));
        }
        Ok(ObservableReport {
            name: name.into(),
            value: self.mean,
            sample_count: self.count,
            standard_error: self.standard_error(),
        })
    }
}

/// `sum_{i<j, r_ij < r_c} (2 r^-12 - r^-6)` over minimal-image distances.
pub fn virial_sum(state: &ParticleState, geometry: &BoxGeometry) -> f64 {
    let rc2 = geometry.cutoff() * geometry.cutoff();
    let x = &state.positions;
    (0..x.len())
        .into_par_iter()
        .with_min_len(16)
        .map(|i| virial_row(x, i, geometry.is_periodic().then(|| geometry.side_length()), rc2))
        .collect::<Vec<f64>>()
        .iter()
        .sum()
}

fn virial_row(x: &[Vec3], i: usize, period: Option<f64>, rc2: f64) -> f64 {
    let mut acc = 0.0;
    for xj in &x[i + 1..] {
        let mut r2 = 0.0;
        for c in 0..3 {
            let d = match period {
                Some(l) => minimal_image_1d(x[i][c] - xj[c], l),
                None => x[i][c] - xj[c],
            };
            r2 += d * d;
        }
        if r2 < rc2 {
            let ir6 = 1.0 / (r2 * r2 * r2);
            acc += 2.0 * ir6 * ir6 - ir6;
        }
    }
    acc
}

/// Same sum as [`virial_sum`], from a cell list built with radius `r_c`.
pub fn virial_sum_cells(state: &ParticleState, cells: &CellList, cutoff: f64) -> Result<f64> {
    Ok(cells
        .pairs_within(&state.positions, cutoff)?
        .iter()
        .map(|p| {
            let ir6 = 1.0 / norm2(&p.disp).powi(3);
            2.0 * ir6 * ir6 - ir6
        })
        .sum())
}

/// Mean-field tail for interactions beyond `r_c`:
/// `(16/3) pi rho^2 [(2/3) r_c^-9 - r_c^-3]`.
pub fn pressure_tail(rho: f64, cutoff: f64) -> f64 {
    16.0 / 3.0 * PI * rho * rho * (2.0 / 3.0 * cutoff.powi(-9) - cutoff.powi(-3))
}

fn check_periodic_3d(state: &ParticleState, geometry: &BoxGeometry) -> Result<()> {
    if state.dim() != 3 || !geometry.is_periodic() {
        return Err(Error::config(
            "observable.pressure",
            "pressure needs a three-dimensional periodic system",
        ));
    }
    Ok(())
}

/// Virial pressure of a truncated Lennard-Jones fluid at temperature `t`:
/// `rho T + (8/V) sum (2 r^-12 - r^-6) + tail`.
pub fn pressure(state: &ParticleState, geometry: &BoxGeometry, temperature: f64) -> Result<f64> {
    check_periodic_3d(state, geometry)?;
    let v = geometry.volume();
    let rho = state.n() as f64 / v;
    Ok(rho * temperature + 8.0 / v * virial_sum(state, geometry) + pressure_tail(rho, geometry.cutoff()))
}

/// `rho T`, for systems without pair interactions.
pub fn ideal_gas_pressure(state: &ParticleState, geometry: &BoxGeometry, temperature: f64) -> Result<f64> {
    check_periodic_3d(state, geometry)?;
    Ok(state.n() as f64 / geometry.volume() * temperature)
}

/// `(1 / (dim n)) sum |v_i|^2`.
pub fn instantaneous_temperature(state: &ParticleState) -> f64 {
    let n = state.n();
    if n == 0 {
        return 0.0;
    }
    state.velocities.iter().map(norm2).sum::<f64>() / (state.dim() * n) as f64
}

pub fn kinetic_energy(state: &ParticleState) -> f64 {
    0.5 * state.velocities.iter().map(norm2).sum::<f64>()
}

/// Lennard-Jones energy over minimal-image pairs inside the cutoff, shifted
/// to vanish at the cutoff so that it is conserved by truncated forces.
pub fn lj_shifted_potential_energy(state: &ParticleState, geometry: &BoxGeometry) -> f64 {
    let rc = geometry.cutoff();
    let phi = |r2: f64| {
        let ir6 = 1.0 / (r2 * r2 * r2);
        4.0 * (ir6 * ir6 - ir6)
    };
    let shift = phi(rc * rc);
    let x = &state.positions;
    let mut e = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let r2 = norm2(&geometry.minimal_image(sub(&x[i], &x[j])));
            if r2 < rc * rc {
                e += phi(r2) - shift;
            }
        }
    }
    e
}

/// Test functions used for equilibrium weak errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TestFunction {
    /// `exp(2x)`
    Exp2x,
    /// `x^2`
    Square,
    /// `1 / ((x - 0.1)^2 + 0.001)`
    Peak,
    /// `1 / (1 + x^2)`
    Lorentzian,
}

impl TestFunction {
    pub const ALL: [TestFunction; 4] = [
        TestFunction::Exp2x,
        TestFunction::Square,
        TestFunction::Peak,
        TestFunction::Lorentzian,
    ];

    pub fn eval(self, x: f64) -> f64 {
        match self {
            TestFunction::Exp2x => (2.0 * x).exp(),
            TestFunction::Square => x * x,
            TestFunction::Peak => 1.0 / ((x - 0.1).powi(2) + 0.001),
            TestFunction::Lorentzian => 1.0 / (1.0 + x * x),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TestFunction::Exp2x => "exp(2x)",
            TestFunction::Square => "x^2",
            TestFunction::Peak => "1/((x-0.1)^2+0.001)",
            TestFunction::Lorentzian => "1/(1+x^2)",
        }
    }
}

/// `|mean f(samples) - mean f(reference)| / mean f(reference)`.
pub fn weak_error(samples: &[f64], reference: &[f64], f: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() || reference.is_empty() {
        return Err(Error::config("observable.weak_error", "sample sets must be nonempty"));
    }
    let m = samples.iter().map(|&x| f(x)).sum::<f64>() / samples.len() as f64;
    let r = reference.iter().map(|&x| f(x)).sum::<f64>() / reference.len() as f64;
    if r.abs() < 1e-12 {
        return Err(Error::config(
            "observable.weak_error",
            "reference mean is zero; relative error undefined",
        ));
    }
    Ok(((m - r) / r).abs())
}

/// Relative RMS position deviation `sqrt(sum |x - x_ref|^2 / sum |x_ref|^2)`.
pub fn strong_error(state: &ParticleState, reference: &ParticleState) -> Result<f64> {
    if state.n() != reference.n() || state.dim() != reference.dim() {
        return Err(Error::config("observable.strong_error", "states differ in shape"));
    }
    let num: f64 = state
        .positions
        .iter()
        .zip(&reference.positions)
        .map(|(a, b)| norm2(&sub(a, b)))
        .sum();
    let den: f64 = reference.positions.iter().map(norm2).sum();
    if den == 0.0 {
        return Err(Error::config("observable.strong_error", "reference positions are all zero"));
    }
    Ok((num / den).sqrt())
}

/// Normalised histogram: densities integrate to one over the bins. Samples
/// outside the edges count toward the normalisation but not toward any bin.
pub fn histogram(samples: &[f64], edges: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::config("observable.histogram", "no samples"));
    }
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::config("observable.histogram", "bin edges must be strictly increasing"));
    }
    let mut counts = vec![0usize; edges.len() - 1];
    for &x in samples {
        if x < edges[0] || x >= edges[edges.len() - 1] {
            continue;
        }
        let k = edges.partition_point(|&e| e <= x) - 1;
        counts[k] += 1;
    }
    let total = samples.len() as f64;
    Ok(counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, w)| c as f64 / total / (w[1] - w[0]))
        .collect())
}

/// `sum_k |a_k - b_k| width_k` for two densities on the same bins.
pub fn l1_distance(a: &[f64], b: &[f64], edges: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(edges.windows(2))
        .map(|((x, y), w)| (x - y).abs() * (w[1] - w[0]))
        .sum()
}

/// `n` equal-width bins on `[lo, hi]`.
pub fn uniform_edges(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::config("observable.slope", "need at least two matching points"));
    }
    if x.iter().chain(y).any(|&v| !(v > 0.0)) {
        return Err(Error::config("observable.slope", "log-log fit needs positive values"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::config("observable.slope", "abscissae are all equal"));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{RngStream, Tag};
    use crate::state::lattice_init;

    fn state3(x: Vec<[f64; 3]>) -> ParticleState {
        let n = x.len();
        ParticleState::new(3, x, vec![[0.0; 3]; n]).unwrap()
    }

    #[test]
    fn two_particle_pressure() {
        let g = BoxGeometry::periodic(10.0, 5.0).unwrap();
        let s = state3(vec![[1.0, 1.0, 1.0], [2.0, 1.0, 1.0]]);
        let p = pressure(&s, &g, 0.0).unwrap();
        let rho: f64 = 2.0 / 1000.0;
        let tail = 16.0 / 3.0 * PI * rho * rho * (2.0 / 3.0 * 5f64.powi(-9) - 5f64.powi(-3));
        assert!((p - (0.008 + tail)).abs() < 1e-16);
        assert!((tail - -5.361_422_698_330_862e-7).abs() < 1e-20);
    }

    #[test]
    fn ideal_gas_and_rejections() {
        let g = BoxGeometry::periodic(10.0, 5.0).unwrap();
        let s = state3(vec![[1.0, 1.0, 1.0], [2.0, 1.0, 1.0]]);
        assert_eq!(ideal_gas_pressure(&s, &g, 2.0).unwrap(), 2.0 / 1000.0 * 2.0);
        let s1 = ParticleState::from_1d(&[0.0, 1.0], &[0.0, 0.0]).unwrap();
        assert!(pressure(&s1, &g, 1.0).is_err());
        assert!(pressure(&s, &BoxGeometry::open(10.0), 1.0).is_err());
    }

    #[test]
    fn pressure_translation_and_permutation_invariant() {
        let g = BoxGeometry::periodic(5.0, 2.5).unwrap();
        let r = RngStream::new(8);
        let x: Vec<[f64; 3]> = lattice_init(27, &g)
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                let mut s = r.stream(Tag::Estimator, i as u64, 0);
                [p[0] + 0.4 * s.uniform(), p[1] + 0.4 * s.uniform(), p[2] + 0.4 * s.uniform()]
            })
            .collect();
        let p0 = pressure(&state3(x.clone()), &g, 1.5).unwrap();
        let shifted: Vec<_> = x.iter().map(|p| g.wrap([p[0] + 3.7, p[1] - 1.1, p[2] + 0.2])).collect();
        let p1 = pressure(&state3(shifted), &g, 1.5).unwrap();
        let mut rev = x.clone();
        rev.reverse();
        let p2 = pressure(&state3(rev), &g, 1.5).unwrap();
        assert!((p0 - p1).abs() < 1e-10 * p0.abs().max(1.0));
        assert!((p0 - p2).abs() < 1e-10 * p0.abs().max(1.0));
    }

    #[test]
    fn cell_list_virial_matches_scan() {
        let g = BoxGeometry::periodic(6.0, 3.0).unwrap();
        let r = RngStream::new(12);
        let x: Vec<[f64; 3]> = lattice_init(64, &g)
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                let mut s = r.stream(Tag::Estimator, i as u64, 1);
                g.wrap([p[0] + 0.5 * s.uniform(), p[1] + 0.5 * s.uniform(), p[2] + 0.5 * s.uniform()])
            })
            .collect();
        let s = state3(x);
        let cells = CellList::build(&s.positions, &g, 3.0).unwrap();
        let a = virial_sum(&s, &g);
        let b = virial_sum_cells(&s, &cells, 3.0).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn temperature_examples() {
        let s = ParticleState::from_1d(&[0.0, 1.0], &[0.0, 0.0]).unwrap();
        assert_eq!(instantaneous_temperature(&s), 0.0);
        let s = ParticleState::from_1d(&[0.0], &[3.0]).unwrap();
        assert_eq!(instantaneous_temperature(&s), 9.0);
        let v = crate::state::velocity_init(50, 3, 0.5, &RngStream::new(1)).unwrap();
        let s = ParticleState::new(3, vec![[0.0; 3]; 50], v).unwrap();
        assert!((instantaneous_temperature(&s) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn weak_error_examples() {
        let a = [0.1, 0.5, -0.3];
        assert_eq!(weak_error(&a, &a, |x| x * x).unwrap(), 0.0);
        assert_eq!(weak_error(&[0.0], &[1.0], |x| x * x).unwrap(), 1.0);
        assert!(weak_error(&[1.0], &[0.0], |x| x * x).is_err());
        assert!(weak_error(&[], &[1.0], |x| x).is_err());
        assert_eq!(TestFunction::Peak.eval(0.1), 1000.0);
    }

    #[test]
    fn strong_error_examples() {
        let a = ParticleState::from_1d(&[1.0, -2.0, 0.5], &[0.0; 3]).unwrap();
        assert_eq!(strong_error(&a, &a).unwrap(), 0.0);
        let b = ParticleState::from_1d(&[2.0, -4.0, 1.0], &[0.0; 3]).unwrap();
        assert!((strong_error(&b, &a).unwrap() - 1.0).abs() < 1e-15);
        let z = ParticleState::from_1d(&[0.0; 3], &[0.0; 3]).unwrap();
        assert!(strong_error(&a, &z).is_err());
    }

    #[test]
    fn histogram_examples() {
        let edges = uniform_edges(0.0, 1.0, 10);
        let h = histogram(&[0.55, 0.56, 0.57], &edges).unwrap();
        for (k, d) in h.iter().enumerate() {
            assert!((d - if k == 5 { 10.0 } else { 0.0 }).abs() < 1e-12);
        }
        let r = RngStream::new(4);
        let u: Vec<f64> = (0..100_000).map(|i| r.stream(Tag::Estimator, i, 0).uniform()).collect();
        let h = histogram(&u, &edges).unwrap();
        let integral: f64 = h.iter().map(|d| d * 0.1).sum();
        assert!((integral - 1.0).abs() < 1e-12);
        for d in &h {
            // binomial sd of a bin density: sqrt(0.1 * 0.9 / n) / 0.1
            assert!((d - 1.0).abs() < 4.0 * (0.09f64 / 1e5).sqrt() / 0.1);
        }
        assert!(histogram(&[], &edges).is_err());
        assert!(histogram(&[0.5], &[0.0, 0.0, 1.0]).is_err());
        assert_eq!(l1_distance(&h, &h, &edges), 0.0);
    }

    #[test]
    fn accumulator() {
        let mut a = MeanAccumulator::default();
        assert!(a.report("x").is_err());
        for x in [1.0, 2.0, 3.0, 4.0] {
            a.push(x);
        }
        assert_eq!(a.mean(), 2.5);
        // sample sd sqrt(5/3), se = sd / 2
        assert!((a.standard_error() - (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn slope_of_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 0.2 * v.sqrt()).collect();
        assert!((loglog_slope(&x, &y).unwrap() - 0.5).abs() < 1e-12);
        assert!(loglog_slope(&[1.0], &[1.0]).is_err());
        assert!(loglog_slope(&[1.0, 2.0], &[0.0, 1.0]).is_err());
    }
}
