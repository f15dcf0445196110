//! Particle state, periodic geometry and initial conditions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{RngStream, Tag};

/// Three-component vector. One-dimensional systems keep the trailing
/// components at zero.
pub type Vec3 = [f64; 3];

#[inline]
pub fn norm2(v: &Vec3) -> f64 {
    v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
}

#[inline]
pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn axpy(y: &mut Vec3, a: f64, x: &Vec3) {
    y[0] += a * x[0];
    y[1] += a * x[1];
    y[2] += a * x[2];
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 1 || dim == 3 {
        Ok(())
    } else {
        Err(Error::config(
            "system.dim",
            format!("dimension {dim} is not supported (use 1 or 3)"),
        ))
    }
}

/// Positions and velocities of `n` particles in `dim` dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleState {
    dim: usize,
    pub positions: Vec<Vec3>,
    pub velocities: Vec<Vec3>,
    pub time: f64,
}

impl ParticleState {
    pub fn new(dim: usize, positions: Vec<Vec3>, velocities: Vec<Vec3>) -> Result<Self> {
        check_dim(dim)?;
        if positions.len() != velocities.len() {
            return Err(Error::config(
                "state",
                format!(
                    "{} positions but {} velocities",
                    positions.len(),
                    velocities.len()
                ),
            ));
        }
        Ok(Self {
            dim,
            positions,
            velocities,
            time: 0.0,
        })
    }

    /// One-dimensional state from scalar coordinates.
    pub fn from_1d(x: &[f64], v: &[f64]) -> Result<Self> {
        Self::new(
            1,
            x.iter().map(|&x| [x, 0.0, 0.0]).collect(),
            v.iter().map(|&v| [v, 0.0, 0.0]).collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_finite(&self) -> bool {
        self.positions
            .iter()
            .chain(self.velocities.iter())
            .all(|v| v.iter().all(|c| c.is_finite()))
    }

    /// First coordinate of every particle.
    pub fn xs(&self) -> Vec<f64> {
        self.positions.iter().map(|p| p[0]).collect()
    }
}

/// Cubic box of side `side_length`. Pair interactions beyond `cutoff` are
/// skipped when the box is periodic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxGeometry {
    side_length: f64,
    periodic: bool,
    cutoff: f64,
}

impl BoxGeometry {
    /// Periodic box; the cutoff may not exceed half the side.
    pub fn periodic(side_length: f64, cutoff: f64) -> Result<Self> {
        if !(side_length > 0.0 && side_length.is_finite()) {
            return Err(Error::config("box.side_length", "must be positive"));
        }
        if !(cutoff > 0.0) || cutoff > 0.5 * side_length {
            return Err(Error::config(
                "box.cutoff",
                format!("cutoff {cutoff} must lie in (0, L/2 = {}]", 0.5 * side_length),
            ));
        }
        Ok(Self {
            side_length,
            periodic: true,
            cutoff,
        })
    }

    /// Non-periodic box without a cutoff.
    pub fn open(side_length: f64) -> Self {
        Self {
            side_length,
            periodic: false,
            cutoff: f64::INFINITY,
        }
    }

    pub fn side_length(&self) -> f64 {
        self.side_length
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn volume(&self) -> f64 {
        self.side_length.powi(3)
    }

    /// Nearest-image displacement (identity for open boxes).
    #[inline]
    pub fn minimal_image(&self, d: Vec3) -> Vec3 {
        if !self.periodic {
            return d;
        }
        let l = self.side_length;
        let mut out = d;
        for c in out.iter_mut() {
            *c = minimal_image_1d(*c, l);
        }
        out
    }

    /// Map a position into [0, L) per component.
    #[inline]
    pub fn wrap(&self, x: Vec3) -> Vec3 {
        if !self.periodic {
            return x;
        }
        let l = self.side_length;
        let mut out = x;
        for c in out.iter_mut() {
            let mut w = *c - l * (*c / l).floor();
            if w >= l {
                w -= l;
            }
            *c = w;
        }
        out
    }
}

/// Representative of `dx` modulo `l` in [-l/2, l/2).
#[inline]
pub fn minimal_image_1d(dx: f64, l: f64) -> f64 {
    let h = 0.5 * l;
    if dx >= -l && dx < l {
        let shift = (dx < -h) as i32 - (dx >= h) as i32;
        return dx + l * shift as f64;
    }
    let mut r = dx - l * (dx / l + 0.5).floor();
    if r >= 0.5 * l {
        r -= l;
    } else if r < -0.5 * l {
        r += l;
    }
    r
}

/// Periodic box of side `(n / rho)^(1/3)` with cutoff at half the side.
pub fn box_from_density(n: usize, rho: f64) -> Result<BoxGeometry> {
    if n == 0 {
        return Err(Error::config("system.n", "must be positive"));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::config("system.density", "must be positive"));
    }
    let l = (n as f64 / rho).cbrt();
    BoxGeometry::periodic(l, 0.5 * l)
}

/// Smallest `m` with `m^3 >= n`.
fn cube_side(n: usize) -> usize {
    let mut m = (n as f64).cbrt().round() as usize;
    while m * m * m < n {
        m += 1;
    }
    while m > 1 && (m - 1) * (m - 1) * (m - 1) >= n {
        m -= 1;
    }
    m.max(1)
}

/// First `n` sites of a cubic lattice with `ceil(n^(1/3))` sites per side,
/// in row-major order (last coordinate fastest).
pub fn lattice_init(n: usize, geometry: &BoxGeometry) -> Vec<Vec3> {
    let m = cube_side(n);
    let a = geometry.side_length() / m as f64;
    (0..n)
        .map(|s| {
            let ix = s / (m * m);
            let iy = (s / m) % m;
            let iz = s % m;
            [ix as f64 * a, iy as f64 * a, iz as f64 * a]
        })
        .collect()
}

/// Positions drawn i.i.d. uniform on [-half_width, half_width]^dim.
pub fn uniform_init(n: usize, dim: usize, half_width: f64, rng: &RngStream) -> Result<Vec<Vec3>> {
    check_dim(dim)?;
    Ok((0..n)
        .map(|i| {
            let mut s = rng.stream(Tag::InitPositions, i as u64, 0);
            let mut p = [0.0; 3];
            for c in p.iter_mut().take(dim) {
                *c = half_width * (2.0 * s.uniform() - 1.0);
            }
            p
        })
        .collect())
}

/// Uniform [-0.5, 0.5] components, shifted to zero mean and rescaled so
/// that `(1/n) sum |v|^2 = dim / beta`.
pub fn velocity_init(n: usize, dim: usize, beta: f64, rng: &RngStream) -> Result<Vec<Vec3>> {
    check_dim(dim)?;
    if n < 2 {
        return Err(Error::config(
            "system.n",
            "velocity initialisation needs at least two particles",
        ));
    }
    if !(beta > 0.0) {
        return Err(Error::config("integrator.beta", "must be positive"));
    }
    let mut v: Vec<Vec3> = (0..n)
        .map(|i| {
            let mut s = rng.stream(Tag::InitVelocities, i as u64, 0);
            let mut p = [0.0; 3];
            for c in p.iter_mut().take(dim) {
                *c = s.uniform() - 0.5;
            }
            p
        })
        .collect();
    let mut mean = [0.0; 3];
    for p in &v {
        axpy(&mut mean, 1.0 / n as f64, p);
    }
    for p in v.iter_mut() {
        *p = sub(p, &mean);
    }
    let ms: f64 = v.iter().map(norm2).sum::<f64>() / n as f64;
    let scale = (dim as f64 / beta / ms).sqrt();
    for p in v.iter_mut() {
        for c in p.iter_mut() {
            *c *= scale;
        }
    }
    Ok(v)
}

/// Coupling prefactor in front of the pair sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `1 / (N - 1)`
    MeanField,
    /// `1`
    Molecular,
}

impl Regime {
    pub fn alpha(self, n: usize) -> f64 {
        match self {
            Regime::MeanField => 1.0 / (n as f64 - 1.0),
            Regime::Molecular => 1.0,
        }
    }
}

/// Confining force `b(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExternalField {
    #[default]
    None,
    /// `b(x) = -lambda x`
    Harmonic { lambda: f64 },
}

impl ExternalField {
    #[inline]
    pub fn force(&self, x: &Vec3) -> Vec3 {
        match *self {
            ExternalField::None => [0.0; 3],
            ExternalField::Harmonic { lambda } => [-lambda * x[0], -lambda * x[1], -lambda * x[2]],
        }
    }
}

/// Physical parameters of the thermostatted system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
    pub external: ExternalField,
}

impl SystemParams {
    /// Noise amplitude from the fluctuation-dissipation relation.
    pub fn sigma(&self) -> f64 {
        (2.0 * self.gamma / self.beta).sqrt()
    }

    pub fn temperature(&self) -> f64 {
        1.0 / self.beta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_image_examples() {
        let b = BoxGeometry::periodic(10.0, 5.0).unwrap();
        assert_eq!(b.minimal_image([9.0, 0.0, 0.0])[0], -1.0);
        assert_eq!(b.minimal_image([0.0, 0.0, 0.0])[0], 0.0);
        // brute force over integer shifts
        let dx = -5.2;
        let best = (-3..=3)
            .map(|k| dx + 10.0 * k as f64)
            .min_by(|a: &f64, b: &f64| a.abs().partial_cmp(&b.abs()).unwrap())
            .unwrap();
        assert!((b.minimal_image([dx, 0.0, 0.0])[0] - best).abs() < 1e-12);
        assert!((best - 4.8).abs() < 1e-12);
        // half-open convention
        assert_eq!(minimal_image_1d(5.0, 10.0), -5.0);
        assert_eq!(minimal_image_1d(-5.0, 10.0), -5.0);
    }

    #[test]
    fn open_box_passes_through() {
        let b = BoxGeometry::open(10.0);
        assert_eq!(b.minimal_image([9.0, -12.0, 3.0]), [9.0, -12.0, 3.0]);
    }

    #[test]
    fn cutoff_limited_to_half_box() {
        assert!(BoxGeometry::periodic(10.0, 5.0).is_ok());
        assert!(BoxGeometry::periodic(10.0, 5.01).is_err());
        assert!(BoxGeometry::periodic(0.0, 0.0).is_err());
    }

    #[test]
    fn box_from_density_examples() {
        let b = box_from_density(500, 0.5).unwrap();
        assert!((b.side_length() - 10.0).abs() < 1e-12);
        assert!((b.cutoff() - 5.0).abs() < 1e-12);
        assert!(b.is_periodic());
        assert!((box_from_density(1, 1.0).unwrap().side_length() - 1.0).abs() < 1e-15);
        // (100 / 0.3)^(1/3) = 6.933612743506347...
        let l = box_from_density(100, 0.3).unwrap().side_length();
        assert!((l - 6.933_612_743_506_347).abs() < 1e-12);
        assert!(box_from_density(0, 1.0).is_err());
        assert!(box_from_density(10, 0.0).is_err());
        assert!(box_from_density(10, -1.0).is_err());
    }

    #[test]
    fn lattice_examples() {
        let b = BoxGeometry::periodic(2.0, 1.0).unwrap();
        let p = lattice_init(8, &b);
        assert_eq!(p.len(), 8);
        for s in &p {
            for c in s {
                assert!(*c == 0.0 || *c == 1.0);
            }
        }
        let b = BoxGeometry::periodic(3.0, 1.5).unwrap();
        let p = lattice_init(27, &b);
        assert_eq!(p[26], [2.0, 2.0, 2.0]);
        assert_eq!(p[1], [0.0, 0.0, 1.0]);

        // n = 10 at density 5/6: 3 sites per side, first ten in row-major order
        let b = box_from_density(10, 5.0 / 6.0).unwrap();
        let a = b.side_length() / 3.0;
        let p = lattice_init(10, &b);
        let mut expect = Vec::new();
        'outer: for ix in 0..3 {
            for iy in 0..3 {
                for iz in 0..3 {
                    if expect.len() == 10 {
                        break 'outer;
                    }
                    expect.push([ix as f64 * a, iy as f64 * a, iz as f64 * a]);
                }
            }
        }
        assert_eq!(p, expect);
        for (i, x) in p.iter().enumerate() {
            assert!(x.iter().all(|c| *c >= 0.0 && *c < b.side_length()));
            for y in &p[i + 1..] {
                assert!(norm2(&b.minimal_image(sub(x, y))).sqrt() >= a - 1e-12);
            }
        }
    }

    #[test]
    fn velocity_init_examples() {
        let rng = RngStream::new(11);
        let v = velocity_init(100, 3, 0.5, &rng).unwrap();
        let ms: f64 = v.iter().map(norm2).sum::<f64>() / 100.0;
        assert!((ms - 6.0).abs() < 1e-12);
        for c in 0..3 {
            let s: f64 = v.iter().map(|p| p[c]).sum();
            assert!(s.abs() < 1e-12);
        }
        let v = velocity_init(2, 1, 1.0, &rng).unwrap();
        assert!((v[0][0].abs() - 1.0).abs() < 1e-14);
        assert!((v[0][0] + v[1][0]).abs() < 1e-14);
        assert!(velocity_init(1, 3, 1.0, &rng).is_err());
        assert!(velocity_init(10, 2, 1.0, &rng).is_err());
    }

    #[test]
    fn fluctuation_dissipation() {
        let p = SystemParams {
            alpha: 1.0,
            gamma: 2.5,
            beta: 1.0,
            external: ExternalField::None,
        };
        assert!((p.sigma() * p.sigma() - 5.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn minimal_image_idempotent_and_minimal(dx in -100.0f64..100.0, l in 0.5f64..20.0) {
            let once = minimal_image_1d(dx, l);
            prop_assert!(once >= -0.5 * l && once < 0.5 * l);
            prop_assert_eq!(minimal_image_1d(once, l), once);
            for k in -3..=3 {
                prop_assert!(once.abs() <= (once + k as f64 * l).abs() + 1e-9);
            }
            // same residue class
            let q = (dx - once) / l;
            prop_assert!((q - q.round()).abs() < 1e-9);
        }

        #[test]
        fn wrap_lands_in_box(x in -100.0f64..100.0, l in 0.5f64..20.0) {
            let b = BoxGeometry::periodic(l, 0.5 * l).unwrap();
            let w = b.wrap([x, 0.0, 0.0])[0];
            prop_assert!(w >= 0.0 && w < l);
        }
    }
}
