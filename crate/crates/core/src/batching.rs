//! Random batch partitions and the batch-force error functionals.
//!
//! A [`Partition`] splits `{0, .., n-1}` into `n / p` batches of size `p`.
//! Inside a batch the pair sum is reweighted by `(N - 1) / (p - 1)`, which
//! makes the batch force an unbiased estimate of the full force. [`chi`] is
//! the per-particle error of that estimate and [`lambda`] the pair-force
//! spread that sets its variance:
//!
//! ```text
//! E chi_i = 0,    E |chi_i|^2 = (1/(p-1) - 1/(N-1)) Lambda_i
//! ```

use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::rng::{RngStream, Tag};
use crate::state::{axpy, norm2, sub, Vec3};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    p: usize,
    batches: Vec<Vec<usize>>,
    batch_of: Vec<usize>,
}

fn check_sizes(n: usize, p: usize) -> Result<()> {
    if p < 2 {
        return Err(Error::config("rbm.p", format!("batch size must be at least 2, got {p}")));
    }
    if n % p != 0 {
        return Err(Error::config(
            "rbm.p",
            format!("batch size {p} must divide the particle count {n}"),
        ));
    }
    Ok(())
}

impl Partition {
    /// Build from explicit batches; members are sorted within each batch.
    pub fn from_batches(n: usize, mut batches: Vec<Vec<usize>>) -> Result<Self> {
        let p = batches.first().map_or(0, Vec::len);
        check_sizes(n, p)?;
        let mut batch_of = vec![usize::MAX; n];
        for (q, b) in batches.iter_mut().enumerate() {
            if b.len() != p {
                return Err(Error::config("partition", "batches must have equal size"));
            }
            b.sort_unstable();
            for &i in b.iter() {
                if i >= n || batch_of[i] != usize::MAX {
                    return Err(Error::config(
                        "partition",
                        format!("index {i} is out of range or repeated"),
                    ));
                }
                batch_of[i] = q;
            }
        }
        if batch_of.contains(&usize::MAX) {
            return Err(Error::config("partition", "batches do not cover all particles"));
        }
        Ok(Self {
            p,
            batches,
            batch_of,
        })
    }

    /// All particles in one batch.
    pub fn single(n: usize) -> Result<Self> {
        Self::from_batches(n, vec![(0..n).collect()])
    }

    pub fn n(&self) -> usize {
        self.batch_of.len()
    }

    pub fn batch_size(&self) -> usize {
        self.p
    }

    pub fn batches(&self) -> &[Vec<usize>] {
        &self.batches
    }

    /// The batch that contains particle `i`, sorted ascending.
    pub fn batch_containing(&self, i: usize) -> &[usize] {
        &self.batches[self.batch_of[i]]
    }

    pub fn batch_id(&self, i: usize) -> usize {
        self.batch_of[i]
    }

    /// `I_ij`: whether `i` and `j` share a batch.
    pub fn same_batch(&self, i: usize, j: usize) -> Result<bool> {
        if i == j {
            return Err(Error::config("indicator", "indices must be distinct"));
        }
        let n = self.n();
        if i >= n || j >= n {
            return Err(Error::config("indicator", "index out of range"));
        }
        Ok(self.batch_of[i] == self.batch_of[j])
    }
}

/// Uniform random partition: Fisher-Yates shuffle driven by the partition
/// stream of `step`, then consecutive chunks of `p`.
pub fn random_partition(n: usize, p: usize, rng: &RngStream, step: u64) -> Result<Partition> {
    check_sizes(n, p)?;
    let mut perm: Vec<usize> = (0..n).collect();
    let mut s = rng.stream(Tag::Partition, 0, step);
    for i in (1..n).rev() {
        let j = (s.uniform() * (i + 1) as f64) as usize;
        perm.swap(i, j.min(i));
    }
    let batches = perm.chunks(p).map(<[usize]>::to_vec).collect();
    Partition::from_batches(n, batches)
}

/// Every partition of `{0..n-1}` into unordered batches of size `p`.
/// There are `n! / ((p!)^(n/p) (n/p)!)` of them, so keep `n` small.
pub fn all_partitions(n: usize, p: usize) -> Result<Vec<Partition>> {
    check_sizes(n, p)?;
    fn rec(remaining: &[usize], p: usize, acc: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        let Some((&first, rest)) = remaining.split_first() else {
            out.push(acc.clone());
            return;
        };
        // choose p-1 companions for the smallest unassigned index
        let mut pick = Vec::with_capacity(p - 1);
        combos(rest, p - 1, 0, &mut pick, &mut |chosen| {
            let mut batch = vec![first];
            batch.extend_from_slice(chosen);
            let left: Vec<usize> = rest.iter().copied().filter(|x| !chosen.contains(x)).collect();
            acc.push(batch);
            rec(&left, p, acc, out);
            acc.pop();
        });
    }
    fn combos(
        items: &[usize],
        k: usize,
        start: usize,
        pick: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if pick.len() == k {
            f(pick);
            return;
        }
        for idx in start..items.len() {
            pick.push(items[idx]);
            combos(items, k, idx + 1, pick, f);
            pick.pop();
        }
    }
    let all: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    rec(&all, p, &mut Vec::new(), &mut out);
    out.into_iter().map(|b| Partition::from_batches(n, b)).collect()
}

/// Error of the batch force estimate at particle `i`:
/// `(1/(p-1)) sum_{j in C, j != i} K(x_i - x_j) - (1/(N-1)) sum_{j != i} K(x_i - x_j)`.
pub fn chi(positions: &[Vec3], kernel: &dyn Kernel, partition: &Partition, i: usize) -> Vec3 {
    let n = positions.len();
    let p = partition.batch_size();
    let mut batch = [0.0; 3];
    for &j in partition.batch_containing(i) {
        if j != i {
            axpy(&mut batch, 1.0, &kernel.force(&sub(&positions[i], &positions[j])));
        }
    }
    let mut full = [0.0; 3];
    for j in (0..n).filter(|&j| j != i) {
        axpy(&mut full, 1.0, &kernel.force(&sub(&positions[i], &positions[j])));
    }
    let mut out = [0.0; 3];
    axpy(&mut out, 1.0 / (p as f64 - 1.0), &batch);
    axpy(&mut out, -1.0 / (n as f64 - 1.0), &full);
    out
}

/// Spread of the pair forces on `i` around their mean:
/// `(1/(N-2)) sum_{j != i} |K(x_i - x_j) - mean_l K(x_i - x_l)|^2`.
pub fn lambda(positions: &[Vec3], kernel: &dyn Kernel, i: usize) -> Result<f64> {
    let n = positions.len();
    if n < 3 {
        return Err(Error::config("n", "Lambda needs at least three particles"));
    }
    let forces: Vec<Vec3> = (0..n)
        .filter(|&j| j != i)
        .map(|j| kernel.force(&sub(&positions[i], &positions[j])))
        .collect();
    let mut mean = [0.0; 3];
    for f in &forces {
        axpy(&mut mean, 1.0 / (n as f64 - 1.0), f);
    }
    Ok(forces.iter().map(|f| norm2(&sub(f, &mean))).sum::<f64>() / (n as f64 - 2.0))
}

/// `chi_i` together with `Lambda_i` for one partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorStats {
    pub chi: Vec3,
    pub lambda: f64,
}

impl EstimatorStats {
    pub fn compute(positions: &[Vec3], kernel: &dyn Kernel, partition: &Partition, i: usize) -> Result<Self> {
        Ok(Self {
            chi: chi(positions, kernel, partition, i),
            lambda: lambda(positions, kernel, i)?,
        })
    }
}

/// `1/(p-1) - 1/(N-1)`, the variance factor in front of `Lambda_i`.
pub fn variance_factor(n: usize, p: usize) -> f64 {
    1.0 / (p as f64 - 1.0) - 1.0 / (n as f64 - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::BoundedKernel;
    use std::collections::HashMap;

    #[derive(Debug)]
    struct Constant(Vec3);
    impl Kernel for Constant {
        fn force(&self, _x: &Vec3) -> Vec3 {
            self.0
        }
        fn is_bounded(&self) -> bool {
            true
        }
    }

    fn positions(n: usize, seed: u64) -> Vec<Vec3> {
        let r = RngStream::new(seed);
        (0..n)
            .map(|i| {
                let mut s = r.stream(Tag::Estimator, i as u64, 99);
                [4.0 * s.uniform() - 2.0, 4.0 * s.uniform() - 2.0, 4.0 * s.uniform() - 2.0]
            })
            .collect()
    }

    #[test]
    fn divisibility_required() {
        let r = RngStream::new(1);
        assert!(random_partition(10, 3, &r, 0).is_err());
        assert!(random_partition(10, 1, &r, 0).is_err());
        assert!(random_partition(10, 5, &r, 0).is_ok());
    }

    #[test]
    fn partition_is_disjoint_cover() {
        let r = RngStream::new(5);
        for step in 0..50 {
            let part = random_partition(24, 4, &r, step).unwrap();
            let mut seen = vec![false; 24];
            for b in part.batches() {
                assert_eq!(b.len(), 4);
                for &i in b {
                    assert!(!seen[i]);
                    seen[i] = true;
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn single_batch_cases() {
        let r = RngStream::new(5);
        let part = random_partition(4, 4, &r, 3).unwrap();
        assert_eq!(part.batches(), &[vec![0, 1, 2, 3]]);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(part.same_batch(i, j).unwrap());
                }
            }
        }
        assert!(part.same_batch(1, 1).is_err());
        let x = positions(4, 2);
        let c = chi(&x, &BoundedKernel, &part, 2);
        assert!(norm2(&c).sqrt() < 1e-15);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(all_partitions(4, 2).unwrap().len(), 3);
        assert_eq!(all_partitions(6, 2).unwrap().len(), 15);
        assert_eq!(all_partitions(6, 3).unwrap().len(), 10);
        assert_eq!(all_partitions(8, 2).unwrap().len(), 105);
    }

    #[test]
    fn pairings_equally_likely() {
        // chi-square over the 3 pairings of 4 particles, 1e5 draws
        let r = RngStream::new(2024);
        let draws = 100_000u64;
        let mut counts: HashMap<Vec<Vec<usize>>, u64> = HashMap::new();
        for step in 0..draws {
            let part = random_partition(4, 2, &r, step).unwrap();
            let mut key: Vec<Vec<usize>> = part.batches().to_vec();
            key.sort();
            *counts.entry(key).or_default() += 1;
        }
        assert_eq!(counts.len(), 3);
        let e = draws as f64 / 3.0;
        let stat: f64 = counts.values().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // chi-square(2) quantile at 1 - 1e-3
        assert!(stat < 13.8155, "chi-square statistic {stat}");
    }

    #[test]
    fn six_particles_fifteen_pairings() {
        let r = RngStream::new(77);
        let mut counts: HashMap<Vec<Vec<usize>>, u64> = HashMap::new();
        for step in 0..30_000 {
            let mut key = random_partition(6, 2, &r, step).unwrap().batches().to_vec();
            key.sort();
            *counts.entry(key).or_default() += 1;
        }
        assert_eq!(counts.len(), 15);
    }

    #[test]
    fn constant_kernel_has_no_error() {
        let x = positions(6, 3);
        let k = Constant([0.3, -1.0, 2.0]);
        for part in all_partitions(6, 2).unwrap() {
            let c = chi(&x, &k, &part, 0);
            assert!(norm2(&c).sqrt() < 1e-14);
        }
        assert!(lambda(&x, &k, 0).unwrap().abs() < 1e-28);
    }

    #[test]
    fn exhaustive_unbiasedness_and_variance() {
        for n in [4usize, 6] {
            let parts = all_partitions(n, 2).unwrap();
            for seed in 0..20 {
                let x = positions(n, seed);
                for i in 0..n {
                    let mut mean = [0.0; 3];
                    let mut m2 = 0.0;
                    for part in &parts {
                        let c = chi(&x, &BoundedKernel, part, i);
                        axpy(&mut mean, 1.0 / parts.len() as f64, &c);
                        m2 += norm2(&c) / parts.len() as f64;
                    }
                    assert!(norm2(&mean).sqrt() < 1e-12);
                    let lam = lambda(&x, &BoundedKernel, i).unwrap();
                    let expect = variance_factor(n, 2) * lam;
                    assert!((m2 - expect).abs() <= 1e-10 * expect.abs());
                }
            }
        }
        assert!((variance_factor(4, 2) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn lambda_matches_direct_loop() {
        // two clusters in 1D: pair forces from the other cluster dominate
        let x: Vec<Vec3> = [-2.0, -1.9, -2.1, 2.0, 1.95, 2.05]
            .iter()
            .map(|&v| [v, 0.0, 0.0])
            .collect();
        for i in 0..x.len() {
            let fs: Vec<f64> = (0..x.len())
                .filter(|&j| j != i)
                .map(|j| {
                    let d = x[i][0] - x[j][0];
                    d / (1.0 + d * d)
                })
                .collect();
            let m = fs.iter().sum::<f64>() / fs.len() as f64;
            let direct = fs.iter().map(|f| (f - m) * (f - m)).sum::<f64>() / (x.len() as f64 - 2.0);
            let got = lambda(&x, &BoundedKernel, i).unwrap();
            assert!((got - direct).abs() < 1e-14);
        }
        assert!(lambda(&x[..2], &BoundedKernel, 0).is_err());
    }
}
