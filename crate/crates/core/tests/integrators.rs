use std::sync::Arc;

use approx::assert_relative_eq;
use rbm::batching::{random_partition, Partition};
use rbm::forces::ForceField;
use rbm::integrators::{andersen_probability, verlet_andersen_step, Simulation, StepSchedule, Thermostat};
use rbm::kernels::{lj_split, LennardJones, ZeroKernel};
use rbm::observables::{kinetic_energy, lj_shifted_potential_energy, MeanAccumulator};
use rbm::rng::RngStream;
use rbm::state::{box_from_density, lattice_init, velocity_init, ExternalField, ParticleState, Regime, Vec3};

fn free_particles(n: usize, v: f64) -> ParticleState {
    ParticleState::new(3, vec![[0.0; 3]; n], vec![[v; 3]; n]).unwrap()
}

#[test]
fn baoab_harmonic_variances() {
    let (lambda, beta) = (1.5, 2.0);
    let n = 200;
    let field = ForceField::full(Arc::new(ZeroKernel), 1.0, ExternalField::Harmonic { lambda }, None);
    let state = ParticleState::from_1d(&vec![1.0; n], &vec![0.0; n]).unwrap();
    let mut sim = Simulation::new(
        state,
        field,
        Thermostat::Langevin { gamma: 1.0 },
        StepSchedule::Fixed { tau: 0.05 },
        beta,
        None,
        RngStream::new(21),
    )
    .unwrap();
    sim.advance_to(20.0).unwrap();
    let (mut x2, mut v2) = (MeanAccumulator::default(), MeanAccumulator::default());
    for _ in 0..2000 {
        sim.step().unwrap();
        for (x, v) in sim.state.positions.iter().zip(&sim.state.velocities) {
            x2.push(x[0] * x[0]);
            v2.push(v[0] * v[0]);
        }
    }
    assert_relative_eq!(x2.mean(), 1.0 / (beta * lambda), max_relative = 0.05);
    assert_relative_eq!(v2.mean(), 1.0 / beta, max_relative = 0.05);
}

#[test]
fn andersen_collision_count_is_binomial() {
    let n = 20_000;
    let (nu, tau) = (5.0, 0.01);
    let field = ForceField::full(Arc::new(ZeroKernel), 1.0, ExternalField::None, None);
    let mut state = free_particles(n, 100.0);
    let mut force = vec![[0.0; 3]; n];
    verlet_andersen_step(&mut state, &field, &mut force, None, tau, nu, 1.0, &RngStream::new(22), 0).unwrap();
    let hits = state.velocities.iter().filter(|v| v[0] != 100.0).count() as f64;
    let p = andersen_probability(nu, tau);
    let sd = (n as f64 * p * (1.0 - p)).sqrt();
    assert!((hits - n as f64 * p).abs() < 4.0 * sd, "{hits} collisions, expected {}", n as f64 * p);
}

#[test]
fn infinite_collision_rate_draws_maxwellian() {
    let n = 20_000;
    let t = 1.7;
    let field = ForceField::full(Arc::new(ZeroKernel), 1.0, ExternalField::None, None);
    let mut state = free_particles(n, 100.0);
    let mut force = vec![[0.0; 3]; n];
    verlet_andersen_step(&mut state, &field, &mut force, None, 0.01, f64::INFINITY, t, &RngStream::new(23), 0).unwrap();
    let (mut mean, mut sq) = (MeanAccumulator::default(), MeanAccumulator::default());
    for v in &state.velocities {
        for c in v {
            mean.push(*c);
            sq.push(c * c);
        }
    }
    assert!(mean.mean().abs() < 4.0 * mean.standard_error());
    assert_relative_eq!(sq.mean(), t, max_relative = 0.03);
}

#[test]
fn verlet_conserves_lennard_jones_energy() {
    let n = 32;
    let geom = box_from_density(n, 0.5).unwrap();
    let rng = RngStream::new(24);
    let state = ParticleState::new(3, lattice_init(n, &geom), velocity_init(n, 3, 1.0, &rng).unwrap()).unwrap();
    let field = ForceField::full(Arc::new(LennardJones), Regime::Molecular.alpha(n), ExternalField::None, Some(geom));
    let energy = |s: &ParticleState| kinetic_energy(s) + lj_shifted_potential_energy(s, &geom);
    let mut sim = Simulation::new(state, field, Thermostat::None, StepSchedule::Fixed { tau: 0.001 }, 1.0, None, rng).unwrap();
    // the total energy is close to zero here; measure drift against the kinetic scale
    let (e0, k0) = (energy(&sim.state), kinetic_energy(&sim.state));
    let mut worst: f64 = 0.0;
    for _ in 0..2000 {
        sim.step().unwrap();
        worst = worst.max((energy(&sim.state) - e0).abs() / k0);
    }
    assert!(worst <= 1e-3, "energy drift {worst:.2e} of the initial kinetic energy");
}

#[test]
fn split_forces_are_unbiased() {
    let n = 64;
    let geom = box_from_density(n, 0.5).unwrap();
    let rng = RngStream::new(25);
    let mut x = lattice_init(n, &geom);
    let jitter = rbm::state::uniform_init(n, 3, 0.1, &rng.fork(1)).unwrap();
    for (p, d) in x.iter_mut().zip(&jitter) {
        for c in 0..3 {
            p[c] += d[c];
        }
    }
    let state = ParticleState::new(3, x, vec![[0.0; 3]; n]).unwrap();
    let exact = ForceField::full(Arc::new(LennardJones), 1.0, ExternalField::None, Some(geom))
        .force_full(&state, 0)
        .unwrap();
    let field = ForceField::split(lj_split(), 1.0, ExternalField::None, geom).unwrap();
    let draws = 4000;
    let mut acc: Vec<[MeanAccumulator; 3]> = (0..n).map(|_| Default::default()).collect();
    for k in 0..draws {
        let part: Partition = random_partition(n, 2, &rng.fork(2), k).unwrap();
        let f: Vec<Vec3> = field.compute(&state, Some(&part), k).unwrap();
        for (a, fi) in acc.iter_mut().zip(&f) {
            for c in 0..3 {
                a[c].push(fi[c]);
            }
        }
    }
    for (a, e) in acc.iter().zip(&exact) {
        for c in 0..3 {
            let z = (a[c].mean() - e[c]).abs() / a[c].standard_error().max(1e-12);
            assert!(z < 5.0, "component off by {z:.1} standard errors");
        }
    }
}
