//! Per-particle force assembly: full pair sums, random-batch sums, and
//! split sums where the short-range part is exact and only the long-range
//! part is batched.
//!
//! Forces exclude friction; thermostats live in the integrators. Every
//! particle's sum is accumulated in a fixed order, so results do not depend
//! on the number of worker threads.

use std::sync::Arc;

use rayon::prelude::*;

use crate::batching::Partition;
use crate::error::{Error, Result};
use crate::kernels::{Kernel, Radial, SplitKernel};
use crate::neighbor::CellList;
use crate::state::{axpy, minimal_image_1d, norm2, sub, BoxGeometry, ExternalField, ParticleState, Vec3};

#[inline]
fn scale(d: &Vec3, g: f64) -> Vec3 {
    [g * d[0], g * d[1], g * d[2]]
}

/// Pairs of an unbounded kernel closer than this are treated as an
/// integration failure.
pub const MIN_PAIR_DISTANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// `alpha sum_{j != i} K`
    Full,
    /// `alpha (N-1)/(p-1) sum_{j in batch} K`
    BatchOnly,
    /// exact `K1` plus batched `K2`
    Split,
}

#[derive(Debug, Clone)]
pub struct ForceField {
    strategy: Strategy,
    kernel: Arc<dyn Kernel>,
    split: Option<SplitKernel>,
    alpha: f64,
    external: ExternalField,
    geometry: Option<BoxGeometry>,
}

impl ForceField {
    pub fn full(
        kernel: Arc<dyn Kernel>,
        alpha: f64,
        external: ExternalField,
        geometry: Option<BoxGeometry>,
    ) -> Self {
        Self {
            strategy: Strategy::Full,
            kernel,
            split: None,
            alpha,
            external,
            geometry,
        }
    }

    /// Random-batch forces on the whole kernel. Singular kernels are
    /// rejected: the batch reweighting would amplify their unbounded values.
    pub fn batch_only(
        kernel: Arc<dyn Kernel>,
        alpha: f64,
        external: ExternalField,
        geometry: Option<BoxGeometry>,
    ) -> Result<Self> {
        if !kernel.is_bounded() {
            return Err(Error::config(
                "rbm.splitting",
                format!("kernel {kernel:?} is unbounded; enable splitting instead of plain random batches"),
            ));
        }
        Ok(Self {
            strategy: Strategy::BatchOnly,
            kernel,
            split: None,
            alpha,
            external,
            geometry,
        })
    }

    /// Split forces; needs a periodic box with cutoff above the splitting radius.
    pub fn split(split: SplitKernel, alpha: f64, external: ExternalField, geometry: BoxGeometry) -> Result<Self> {
        if !geometry.is_periodic() || geometry.cutoff() < split.r0 {
            return Err(Error::config(
                "system.density",
                format!(
                    "split forces need a periodic box with cutoff >= r0 = {:.4}",
                    split.r0
                ),
            ));
        }
        Ok(Self {
            strategy: Strategy::Split,
            kernel: Arc::new(split.full()),
            split: Some(split),
            alpha,
            external,
            geometry: Some(geometry),
        })
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn geometry(&self) -> Option<&BoxGeometry> {
        self.geometry.as_ref()
    }

    pub fn kernel(&self) -> &dyn Kernel {
        self.kernel.as_ref()
    }

    /// Whether forces depend on a partition.
    pub fn needs_partition(&self) -> bool {
        self.strategy != Strategy::Full
    }

    /// Dispatch on the strategy. `step` only labels diagnostics.
    pub fn compute(&self, state: &ParticleState, partition: Option<&Partition>, step: u64) -> Result<Vec<Vec3>> {
        match (self.strategy, partition) {
            (Strategy::Full, _) => self.force_full(state, step),
            (Strategy::BatchOnly, Some(p)) => self.force_batched(state, p, step),
            (Strategy::Split, Some(p)) => {
                let split = self.split.as_ref().expect("split strategy carries a split kernel");
                let g = self.geometry.as_ref().expect("split strategy carries a box");
                let cells = CellList::build(&state.positions, g, split.r0)?;
                self.force_split(state, p, &cells, step)
            }
            (_, None) => Err(Error::config("rbm", "random-batch forces need a partition")),
        }
    }

    /// Displacement `x_i - x_j` and its squared length, or `None` beyond the cutoff.
    #[inline]
    fn displacement(&self, state: &ParticleState, i: usize, j: usize, guard: bool, step: u64) -> Result<Option<Vec3>> {
        let mut d = sub(&state.positions[i], &state.positions[j]);
        let mut cutoff2 = f64::INFINITY;
        if let Some(g) = &self.geometry {
            d = g.minimal_image(d);
            if g.is_periodic() {
                cutoff2 = g.cutoff() * g.cutoff();
            }
        }
        let r2 = norm2(&d);
        if guard && r2 < MIN_PAIR_DISTANCE * MIN_PAIR_DISTANCE {
            return Err(Error::SingularPair {
                i,
                j,
                distance: r2.sqrt(),
                step,
            });
        }
        Ok((r2 < cutoff2).then_some(d))
    }

    /// `F_i = b(x_i) + alpha sum_{j != i} K(x_i - x_j)`.
    pub fn force_full(&self, state: &ParticleState, step: u64) -> Result<Vec<Vec3>> {
        match self.kernel.radial() {
            Some(Radial::LennardJones) => self.full_sum(state, step, |d, r2| scale(d, Radial::LennardJones.factor(r2))),
            Some(Radial::Bounded) => self.full_sum(state, step, |d, r2| scale(d, Radial::Bounded.factor(r2))),
            None => self.full_sum(state, step, |d, _| self.kernel.force(d)),
        }
    }

    fn full_sum<F>(&self, state: &ParticleState, step: u64, pair: F) -> Result<Vec<Vec3>>
    where
        F: Fn(&Vec3, f64) -> Vec3 + Sync,
    {
        (0..state.n())
            .into_par_iter()
            .with_min_len(32)
            .map(|i| self.full_row(state, i, step, &pair))
            .collect()
    }

    fn full_row<F>(&self, state: &ParticleState, i: usize, step: u64, pair: &F) -> Result<Vec3>
    where
        F: Fn(&Vec3, f64) -> Vec3,
    {
        let guard = !self.kernel.is_bounded();
        let (period, cutoff2) = match &self.geometry {
            Some(g) if g.is_periodic() => (Some(g.side_length()), g.cutoff() * g.cutoff()),
            _ => (None, f64::INFINITY),
        };
        let xi = state.positions[i];
        let mut acc = [0.0; 3];
        for (j, xj) in state.positions.iter().enumerate() {
            if j == i {
                continue;
            }
            let mut d = sub(&xi, xj);
            if let Some(l) = period {
                for c in d.iter_mut() {
                    *c = minimal_image_1d(*c, l);
                }
            }
            let r2 = norm2(&d);
            if guard && r2 < MIN_PAIR_DISTANCE * MIN_PAIR_DISTANCE {
                return Err(Error::SingularPair {
                    i,
                    j,
                    distance: r2.sqrt(),
                    step,
                });
            }
            if r2 < cutoff2 {
                let k = pair(&d, r2);
                for c in 0..3 {
                    acc[c] += k[c];
                }
            }
        }
        let mut f = self.external.force(&xi);
        axpy(&mut f, self.alpha, &acc);
        Ok(f)
    }

    fn batch_sum(
        &self,
        kernel: &dyn Kernel,
        state: &ParticleState,
        partition: &Partition,
        i: usize,
        step: u64,
    ) -> Result<Vec3> {
        let guard = !kernel.is_bounded();
        let mut acc = [0.0; 3];
        for &j in partition.batch_containing(i) {
            if j == i {
                continue;
            }
            if let Some(d) = self.displacement(state, i, j, guard, step)? {
                axpy(&mut acc, 1.0, &kernel.force(&d));
            }
        }
        Ok(acc)
    }

    fn batch_weight(&self, n: usize, partition: &Partition) -> f64 {
        self.alpha * (n as f64 - 1.0) / (partition.batch_size() as f64 - 1.0)
    }

    /// `F_i = b(x_i) + alpha (N-1)/(p-1) sum_{j in C(i), j != i} K(x_i - x_j)`.
    pub fn force_batched(&self, state: &ParticleState, partition: &Partition, step: u64) -> Result<Vec<Vec3>> {
        check_partition(state, partition)?;
        let w = self.batch_weight(state.n(), partition);
        (0..state.n())
            .into_par_iter()
            .with_min_len(64)
            .map(|i| {
                let acc = self.batch_sum(self.kernel.as_ref(), state, partition, i, step)?;
                let mut f = self.external.force(&state.positions[i]);
                axpy(&mut f, w, &acc);
                Ok(f)
            })
            .collect()
    }

    /// Exact short-range sum over cell-list pairs plus the reweighted
    /// batch sum of the long-range part.
    pub fn force_split(
        &self,
        state: &ParticleState,
        partition: &Partition,
        cells: &CellList,
        step: u64,
    ) -> Result<Vec<Vec3>> {
        check_partition(state, partition)?;
        let split = self
            .split
            .as_ref()
            .ok_or_else(|| Error::config("rbm.splitting", "force field has no split kernel"))?;
        let w = self.batch_weight(state.n(), partition);
        let mut forces: Vec<Vec3> = (0..state.n())
            .into_par_iter()
            .with_min_len(64)
            .map(|i| {
                let acc = self.batch_sum(&split.long_range, state, partition, i, step)?;
                let mut f = self.external.force(&state.positions[i]);
                axpy(&mut f, w, &acc);
                Ok(f)
            })
            .collect::<Result<_>>()?;
        let short = self.short_range_forces(state, cells, step)?;
        for (f, s) in forces.iter_mut().zip(&short) {
            axpy(f, 1.0, s);
        }
        Ok(forces)
    }

    /// `alpha sum_j K1(x_i - x_j)` over the cell-list pairs closer than `r0`.
    pub fn short_range_forces(&self, state: &ParticleState, cells: &CellList, step: u64) -> Result<Vec<Vec3>> {
        let split = self
            .split
            .as_ref()
            .ok_or_else(|| Error::config("rbm.splitting", "force field has no split kernel"))?;
        let mut forces = vec![[0.0; 3]; state.n()];
        for pair in cells.pairs_within(&state.positions, split.r0)? {
            let r2 = norm2(&pair.disp);
            if r2 < MIN_PAIR_DISTANCE * MIN_PAIR_DISTANCE {
                return Err(Error::SingularPair {
                    i: pair.i,
                    j: pair.j,
                    distance: r2.sqrt(),
                    step,
                });
            }
            let f = split.short_range.force(&pair.disp);
            axpy(&mut forces[pair.i], self.alpha, &f);
            axpy(&mut forces[pair.j], -self.alpha, &f);
        }
        Ok(forces)
    }
}

fn check_partition(state: &ParticleState, partition: &Partition) -> Result<()> {
    if partition.n() != state.n() {
        return Err(Error::config(
            "partition",
            format!("partition covers {} particles, state has {}", partition.n(), state.n()),
        ));
    }
    Ok(())
}

/// Short-range part alone, summed over cell-list pairs.
pub fn short_range_forces(split: &SplitKernel, positions: &[Vec3], cells: &CellList) -> Result<Vec<Vec3>> {
    let mut forces = vec![[0.0; 3]; positions.len()];
    for pair in cells.pairs_within(positions, split.r0)? {
        let f = split.short_range.force(&pair.disp);
        axpy(&mut forces[pair.i], 1.0, &f);
        axpy(&mut forces[pair.j], -1.0, &f);
    }
    Ok(forces)
}
