//! Pair interaction kernels and the short/long range split of Lennard-Jones.

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::state::{norm2, Vec3};

/// Pair force `K(x)` acting on particle `i` for the displacement
/// `x = x_i - x_j`.
pub trait Kernel: Send + Sync + Debug {
    fn force(&self, x: &Vec3) -> Vec3;

    /// Pair potential `phi(r)` with `K = -grad phi`, when one exists.
    fn potential(&self, _r: f64) -> Option<f64> {
        None
    }

    /// Whether `sup |K|` is finite. Pure random-batch forces require it.
    fn is_bounded(&self) -> bool;

    /// Closed radial form `K(x) = g(|x|^2) x`, if the kernel has one.
    fn radial(&self) -> Option<Radial> {
        None
    }
}

/// Radial factors that pair loops can inline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Radial {
    LennardJones,
    Bounded,
}

impl Radial {
    #[inline]
    pub fn factor(self, r2: f64) -> f64 {
        match self {
            Radial::LennardJones => lj_radial(r2),
            Radial::Bounded => 1.0 / (1.0 + r2),
        }
    }
}

/// `K(x) = x / (1 + |x|^2)`; `|K| <= 1/2`, `|K'| <= 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct BoundedKernel;

/// Scalar form of [`BoundedKernel`].
#[inline]
pub fn bounded_kernel_eval(x: f64) -> f64 {
    x / (1.0 + x * x)
}

impl Kernel for BoundedKernel {
    #[inline]
    fn force(&self, x: &Vec3) -> Vec3 {
        let s = 1.0 / (1.0 + norm2(x));
        [x[0] * s, x[1] * s, x[2] * s]
    }

    fn potential(&self, r: f64) -> Option<f64> {
        Some(-0.5 * (r * r).ln_1p())
    }

    fn is_bounded(&self) -> bool {
        true
    }

    fn radial(&self) -> Option<Radial> {
        Some(Radial::Bounded)
    }
}

/// No interaction.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroKernel;

impl Kernel for ZeroKernel {
    fn force(&self, _x: &Vec3) -> Vec3 {
        [0.0; 3]
    }

    fn potential(&self, _r: f64) -> Option<f64> {
        Some(0.0)
    }

    fn is_bounded(&self) -> bool {
        true
    }
}

/// Splitting radius of the Lennard-Jones potential: its minimum, `2^(1/6)`.
pub fn lj_split_radius() -> f64 {
    2f64.powf(1.0 / 6.0)
}

#[inline]
fn lj_phi(r: f64) -> f64 {
    let ir6 = 1.0 / (r * r * r).powi(2);
    4.0 * (ir6 * ir6 - ir6)
}

/// Radial factor `g` with `-grad phi(x) = g(r^2) x`.
#[inline]
fn lj_radial(r2: f64) -> f64 {
    let ir2 = 1.0 / r2;
    let ir6 = ir2 * ir2 * ir2;
    (48.0 * ir6 * ir6 - 24.0 * ir6) * ir2
}

/// `4 (r^-12 - r^-6)`.
pub fn lj_potential(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::config("r", format!("distance must be positive, got {r}")));
    }
    Ok(lj_phi(r))
}

/// `-grad phi(x) = (48 r^-14 - 24 r^-8) x`.
pub fn lj_force(x: &Vec3) -> Result<Vec3> {
    let r2 = norm2(x);
    if !(r2 > 0.0) {
        return Err(Error::config("x", "Lennard-Jones force is singular at zero displacement"));
    }
    let g = lj_radial(r2);
    Ok([g * x[0], g * x[1], g * x[2]])
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LennardJones;

impl Kernel for LennardJones {
    #[inline]
    fn force(&self, x: &Vec3) -> Vec3 {
        let g = lj_radial(norm2(x));
        [g * x[0], g * x[1], g * x[2]]
    }

    fn potential(&self, r: f64) -> Option<f64> {
        Some(lj_phi(r))
    }

    fn is_bounded(&self) -> bool {
        false
    }

    fn radial(&self) -> Option<Radial> {
        Some(Radial::LennardJones)
    }
}

/// Repulsive core: the Lennard-Jones force below `r0`, zero from `r0` on.
/// The potential is shifted by `+1` so that it is continuous at `r0`.
#[derive(Debug, Clone, Copy)]
pub struct LjShortRange {
    r0: f64,
}

impl Kernel for LjShortRange {
    #[inline]
    fn force(&self, x: &Vec3) -> Vec3 {
        let r2 = norm2(x);
        if r2 >= self.r0 * self.r0 {
            return [0.0; 3];
        }
        let g = lj_radial(r2);
        [g * x[0], g * x[1], g * x[2]]
    }

    fn potential(&self, r: f64) -> Option<f64> {
        Some(if r < self.r0 { lj_phi(r) + 1.0 } else { 0.0 })
    }

    fn is_bounded(&self) -> bool {
        false
    }
}

/// Attractive tail: zero below `r0`, the Lennard-Jones force from `r0` on.
/// The potential is the constant `-1` below `r0`.
#[derive(Debug, Clone, Copy)]
pub struct LjLongRange {
    r0: f64,
}

impl Kernel for LjLongRange {
    #[inline]
    fn force(&self, x: &Vec3) -> Vec3 {
        let r2 = norm2(x);
        if r2 < self.r0 * self.r0 {
            return [0.0; 3];
        }
        let g = lj_radial(r2);
        [g * x[0], g * x[1], g * x[2]]
    }

    fn potential(&self, r: f64) -> Option<f64> {
        Some(if r < self.r0 { -1.0 } else { lj_phi(r) })
    }

    fn is_bounded(&self) -> bool {
        true
    }
}

/// `K = K1 + K2` with `K1` supported in `|x| < r0`.
#[derive(Debug, Clone, Copy)]
pub struct SplitKernel {
    pub short_range: LjShortRange,
    pub long_range: LjLongRange,
    pub r0: f64,
}

impl SplitKernel {
    /// Unsplit kernel.
    pub fn full(&self) -> LennardJones {
        LennardJones
    }
}

/// Lennard-Jones split at its minimum `2^(1/6)`. Both the potential and the
/// force are continuous across the splitting radius.
pub fn lj_split() -> SplitKernel {
    let r0 = lj_split_radius();
    SplitKernel {
        short_range: LjShortRange { r0 },
        long_range: LjLongRange { r0 },
        r0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn rad(r: f64) -> Vec3 {
        [r, 0.0, 0.0]
    }

    fn fd_check(k: &dyn Kernel, r: f64) {
        // direction not aligned with an axis
        let u = [0.48, -0.6, 0.64];
        let x = [u[0] * r, u[1] * r, u[2] * r];
        let h = 1e-6 * r;
        let dphi = (k.potential(r + h).unwrap() - k.potential(r - h).unwrap()) / (2.0 * h);
        let f = k.force(&x);
        for c in 0..3 {
            let expect = -dphi * u[c];
            let scale = f[c].abs().max(1e-8);
            assert!(
                (f[c] - expect).abs() / scale < 1e-5,
                "r={r} c={c} force={} fd={}",
                f[c],
                expect
            );
        }
    }

    #[test]
    fn bounded_kernel_examples() {
        assert_eq!(bounded_kernel_eval(0.0), 0.0);
        assert_eq!(bounded_kernel_eval(1.0), 0.5);
        let sup = (0..=2_000_000)
            .map(|i| bounded_kernel_eval(-10.0 + i as f64 * 1e-5).abs())
            .fold(0.0, f64::max);
        assert!((sup - 0.5).abs() < 1e-6);
        assert_eq!(BoundedKernel.force(&rad(1.0))[0], 0.5);
    }

    #[test]
    fn lj_potential_examples() {
        assert_eq!(lj_potential(1.0).unwrap(), 0.0);
        assert!((lj_potential(lj_split_radius()).unwrap() + 1.0).abs() < 1e-14);
        assert_eq!(lj_potential(2.0).unwrap(), -0.0615234375);
        assert!(lj_potential(0.0).is_err());
        assert!(lj_potential(-1.0).is_err());
    }

    #[test]
    fn lj_force_examples() {
        let f = lj_force(&rad(lj_split_radius())).unwrap();
        assert!(f[0].abs() < 1e-13);
        assert!(lj_force(&[0.0; 3]).is_err());
        // asymptotic tail 24 r^-7 at r = 5
        let f = lj_force(&rad(5.0)).unwrap();
        let tail = -24.0 * 5f64.powi(-7);
        assert!(((f[0] - tail) / tail).abs() < 0.01);
        fd_check(&LennardJones, 1.3);
    }

    #[test]
    fn force_potential_consistency() {
        let s = lj_split();
        for r in [0.9, 1.0, 1.05, 1.3, 1.7, 2.5, 4.0] {
            fd_check(&LennardJones, r);
            fd_check(&BoundedKernel, r);
            if (r - s.r0).abs() > 1e-3 {
                fd_check(&s.short_range, r);
                fd_check(&s.long_range, r);
            }
        }
    }

    #[test]
    fn split_identities() {
        let s = lj_split();
        assert_eq!(s.short_range.potential(s.r0).unwrap(), 0.0);
        assert!((s.long_range.potential(s.r0 * (1.0 - 1e-15)).unwrap() + 1.0).abs() < 1e-15);
        assert!(s.short_range.force(&rad(s.r0 * (1.0 - 1e-12)))[0].abs() < 1e-9);
        assert_eq!(s.short_range.force(&rad(s.r0)), [0.0; 3]);
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        for _ in 0..1000 {
            let r: f64 = rng.random_range(0.8..5.0);
            let u = [0.6, 0.0, -0.8];
            let x = [u[0] * r, u[1] * r, u[2] * r];
            let full = LennardJones.force(&x);
            let k1 = s.short_range.force(&x);
            let k2 = s.long_range.force(&x);
            for c in 0..3 {
                assert!((k1[c] + k2[c] - full[c]).abs() <= 1e-12 * full[c].abs().max(1e-300));
            }
            let phi = lj_phi(r);
            let sum = s.short_range.potential(r).unwrap() + s.long_range.potential(r).unwrap();
            assert!((sum - phi).abs() <= 1e-12 * phi.abs().max(1.0));
        }
    }

    #[test]
    fn long_range_part_is_bounded_and_decays() {
        let s = lj_split();
        let grid: Vec<f64> = (0..=100_000).map(|i| s.r0 + i as f64 * (10.0 - s.r0) / 1e5).collect();
        let mags: Vec<f64> = grid.iter().map(|&r| s.long_range.force(&rad(r))[0].abs()).collect();
        let (imax, max) = mags
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (i, &m)| if m > acc.1 { (i, m) } else { acc });
        assert!(max.is_finite() && max < 3.0);
        // maximum sits just beyond r0, then the magnitude decreases monotonically
        assert!(grid[imax] < 1.3);
        for w in mags[imax..].windows(2) {
            assert!(w[1] <= w[0] + 1e-15);
        }
    }

    #[test]
    fn kernels_are_odd() {
        let s = lj_split();
        let x = [0.7, -0.4, 0.9];
        let mx = [-0.7, 0.4, -0.9];
        let kernels: [&dyn Kernel; 4] = [&BoundedKernel, &LennardJones, &s.short_range, &s.long_range];
        for k in kernels {
            let a = k.force(&x);
            let b = k.force(&mx);
            for c in 0..3 {
                assert_eq!(a[c], -b[c]);
            }
        }
    }
}
