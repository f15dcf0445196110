//! Time steppers.
//!
//! All second-order schemes evaluate forces once per step, right after the
//! partition for the next interval has been drawn, and reuse that force as
//! the first half-kick of the following step. The velocity update over
//! `[t_k, t_{k+1})` therefore averages `F(t_k+)` and `F(t_{k+1}+)`.

use serde::{Deserialize, Serialize};

use crate::batching::{random_partition, Partition};
use crate::error::{Error, Result};
use crate::forces::ForceField;
use crate::rng::{RngStream, Tag};
use crate::state::{axpy, ParticleState, Vec3};

/// Step sizes `tau_k` for `k = 1, 2, ...`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum StepSchedule {
    Fixed { tau: f64 },
    /// `tau_k = tau0 / ln(k + 1)`
    Decreasing { tau0: f64 },
}

impl StepSchedule {
    pub fn tau(&self, k: u64) -> f64 {
        match *self {
            StepSchedule::Fixed { tau } => tau,
            StepSchedule::Decreasing { tau0 } => tau0 / ((k.max(1) + 1) as f64).ln(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let t = match *self {
            StepSchedule::Fixed { tau } => tau,
            StepSchedule::Decreasing { tau0 } => tau0,
        };
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::config("integrator.schedule", "step size must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Thermostat {
    /// Plain velocity Verlet.
    None,
    /// Underdamped Langevin with friction `gamma`, integrated by BAOAB.
    Langevin { gamma: f64 },
    /// Velocity Verlet with Andersen collisions at rate `nu`.
    Andersen { nu: f64 },
}

impl Thermostat {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Thermostat::None => Ok(()),
            Thermostat::Langevin { gamma } if gamma > 0.0 => Ok(()),
            Thermostat::Andersen { nu } if nu > 0.0 => Ok(()),
            _ => Err(Error::config(
                "integrator.thermostat",
                "friction or collision rate must be positive",
            )),
        }
    }
}

/// `c1 = exp(-gamma tau)`, `c2 = sqrt((1 - c1^2) / beta)`.
pub fn ou_coefficients(gamma: f64, tau: f64, beta: f64) -> (f64, f64) {
    let c1 = (-gamma * tau).exp();
    // 1 - c1^2 without cancellation for small gamma tau
    let c2 = (-(-2.0 * gamma * tau).exp_m1() / beta).sqrt();
    (c1, c2)
}

/// Chance that a particle collides with the bath during `tau`.
pub fn andersen_probability(nu: f64, tau: f64) -> f64 {
    if nu.is_infinite() {
        1.0
    } else {
        -(-nu * tau).exp_m1()
    }
}

/// Ornstein-Uhlenbeck increment of one coarse step built from `M` fine
/// standard normals: `c2_f sum_j c1_f^(M-1-j) R_j`. Its variance equals
/// `(1 - c1_f^(2M)) / beta`, the coarse-step `c2^2`.
pub fn coupled_noise_aggregate(fine_draws: &[f64], gamma: f64, tau_fine: f64, beta: f64) -> Result<f64> {
    if !fine_draws.len().is_power_of_two() {
        return Err(Error::config(
            "strong.tau",
            format!("coarse/fine step ratio {} is not a power of two", fine_draws.len()),
        ));
    }
    let (c1, c2) = ou_coefficients(gamma, tau_fine, beta);
    let acc = fine_draws.iter().fold(0.0, |acc, r| c1 * acc + r);
    Ok(c2 * acc)
}

/// Brownian increments on a fine grid, shared between coupled runs. The
/// tape is regenerated from its keys on demand instead of being stored.
#[derive(Debug, Clone, Copy)]
pub struct NoiseTape {
    rng: RngStream,
    tau_fine: f64,
    dim: usize,
}

impl NoiseTape {
    pub fn new(rng: RngStream, tau_fine: f64, dim: usize) -> Self {
        Self { rng, tau_fine, dim }
    }

    pub fn tau_fine(&self) -> f64 {
        self.tau_fine
    }

    /// Standard normals of `particle` on fine step `fine_step` (0-based).
    pub fn draw(&self, particle: usize, fine_step: u64) -> Vec3 {
        self.rng.stream(Tag::Tape, particle as u64, fine_step).normal3(self.dim)
    }

    /// O-step increment for coarse step `coarse_step` (1-based) spanning `m` fine steps.
    pub fn coarse_noise(&self, particle: usize, coarse_step: u64, m: u64, gamma: f64, beta: f64) -> Result<Vec3> {
        let first = (coarse_step - 1) * m;
        let draws: Vec<Vec3> = (first..first + m).map(|f| self.draw(particle, f)).collect();
        let mut out = [0.0; 3];
        let mut comp = vec![0.0; m as usize];
        for c in 0..self.dim {
            for (slot, d) in comp.iter_mut().zip(&draws) {
                *slot = d[c];
            }
            out[c] = coupled_noise_aggregate(&comp, gamma, self.tau_fine, beta)?;
        }
        Ok(out)
    }
}

fn wrap_positions(state: &mut ParticleState, field: &ForceField) {
    if let Some(g) = field.geometry() {
        if g.is_periodic() {
            for x in state.positions.iter_mut() {
                *x = g.wrap(*x);
            }
        }
    }
}

fn check_finite(state: &ParticleState, step: u64) -> Result<()> {
    if state.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { step })
    }
}

/// One BAOAB step. `ou_noise(i)` returns the full O-step increment added
/// to `c1 v_i`. `force` holds `F(t_k+)` on entry and `F(t_{k+1}+)` on exit.
#[allow(clippy::too_many_arguments)]
pub fn baoab_step_with_noise<F>(
    state: &mut ParticleState,
    field: &ForceField,
    force: &mut Vec<Vec3>,
    next_partition: Option<&Partition>,
    tau: f64,
    gamma: f64,
    ou_noise: F,
    step: u64,
) -> Result<()>
where
    F: Fn(usize) -> Result<Vec3>,
{
    let c1 = (-gamma * tau).exp();
    let half = 0.5 * tau;
    for i in 0..state.n() {
        let v = &mut state.velocities[i];
        axpy(v, half, &force[i]);
        axpy(&mut state.positions[i], half, v);
        let xi = ou_noise(i)?;
        for c in 0..3 {
            v[c] = c1 * v[c] + xi[c];
        }
        axpy(&mut state.positions[i], half, v);
    }
    wrap_positions(state, field);
    *force = field.compute(state, next_partition, step)?;
    for (v, f) in state.velocities.iter_mut().zip(force.iter()) {
        axpy(v, half, f);
    }
    state.time += tau;
    check_finite(state, step)
}

/// BAOAB step with noise from the keyed Langevin streams of `step`.
#[allow(clippy::too_many_arguments)]
pub fn baoab_step(
    state: &mut ParticleState,
    field: &ForceField,
    force: &mut Vec<Vec3>,
    next_partition: Option<&Partition>,
    tau: f64,
    gamma: f64,
    beta: f64,
    rng: &RngStream,
    step: u64,
) -> Result<()> {
    let (_, c2) = ou_coefficients(gamma, tau, beta);
    let dim = state.dim();
    baoab_step_with_noise(
        state,
        field,
        force,
        next_partition,
        tau,
        gamma,
        |i| {
            let r = rng.stream(Tag::Langevin, i as u64, step).normal3(dim);
            Ok([c2 * r[0], c2 * r[1], c2 * r[2]])
        },
        step,
    )
}

/// Velocity Verlet with Andersen collisions:
/// collide, drift `x += v tau + F tau^2 / 2`, recompute forces with the new
/// partition, kick `v += (F_old + F_new) tau / 2`.
#[allow(clippy::too_many_arguments)]
pub fn verlet_andersen_step(
    state: &mut ParticleState,
    field: &ForceField,
    force: &mut Vec<Vec3>,
    next_partition: Option<&Partition>,
    tau: f64,
    nu: f64,
    temperature: f64,
    rng: &RngStream,
    step: u64,
) -> Result<()> {
    let dim = state.dim();
    if nu > 0.0 {
        let prob = andersen_probability(nu, tau);
        let sd = temperature.sqrt();
        for (i, v) in state.velocities.iter_mut().enumerate() {
            let mut s = rng.stream(Tag::Andersen, i as u64, step);
            if s.uniform() <= prob {
                let r = s.normal3(dim);
                *v = [sd * r[0], sd * r[1], sd * r[2]];
            }
        }
    }
    let half_tau2 = 0.5 * tau * tau;
    for i in 0..state.n() {
        let v = state.velocities[i];
        let x = &mut state.positions[i];
        axpy(x, tau, &v);
        axpy(x, half_tau2, &force[i]);
    }
    wrap_positions(state, field);
    let new_force = field.compute(state, next_partition, step)?;
    for ((v, f_old), f_new) in state.velocities.iter_mut().zip(force.iter()).zip(&new_force) {
        axpy(v, 0.5 * tau, f_old);
        axpy(v, 0.5 * tau, f_new);
    }
    *force = new_force;
    state.time += tau;
    check_finite(state, step)
}

/// Overdamped step `x += F tau + sigma sqrt(tau) xi`. Velocities are untouched.
pub fn euler_maruyama_first_order_step(
    state: &mut ParticleState,
    field: &ForceField,
    partition: Option<&Partition>,
    tau: f64,
    sigma: f64,
    rng: &RngStream,
    step: u64,
) -> Result<()> {
    let force = field.compute(state, partition, step)?;
    let amp = sigma * tau.sqrt();
    let dim = state.dim();
    for (i, (x, f)) in state.positions.iter_mut().zip(&force).enumerate() {
        axpy(x, tau, f);
        if amp != 0.0 {
            let r = rng.stream(Tag::Langevin, i as u64, step).normal3(dim);
            axpy(x, amp, &r);
        }
    }
    wrap_positions(state, field);
    state.time += tau;
    check_finite(state, step)
}

#[derive(Debug, Clone, Copy)]
enum NoiseSource {
    Keyed,
    Tape { tape: NoiseTape, fine_per_step: u64 },
}

/// Owns a state and advances it with a thermostat, a step schedule, and
/// optionally a fresh random partition per step.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub state: ParticleState,
    field: ForceField,
    thermostat: Thermostat,
    schedule: StepSchedule,
    beta: f64,
    batch_size: Option<usize>,
    rng: RngStream,
    noise: NoiseSource,
    step: u64,
    force: Vec<Vec3>,
}

impl Simulation {
    /// `batch_size` must be given exactly when the force field is batched.
    pub fn new(
        state: ParticleState,
        field: ForceField,
        thermostat: Thermostat,
        schedule: StepSchedule,
        beta: f64,
        batch_size: Option<usize>,
        rng: RngStream,
    ) -> Result<Self> {
        thermostat.validate()?;
        schedule.validate()?;
        if !(beta > 0.0) {
            return Err(Error::config("integrator.beta", "must be positive"));
        }
        match (field.needs_partition(), batch_size) {
            (true, None) => return Err(Error::config("rbm.p", "batched forces need a batch size")),
            (false, Some(_)) => return Err(Error::config("rbm.p", "full forces take no batch size")),
            _ => {}
        }
        let mut sim = Self {
            state,
            field,
            thermostat,
            schedule,
            beta,
            batch_size,
            rng,
            noise: NoiseSource::Keyed,
            step: 0,
            force: Vec::new(),
        };
        let part = sim.partition(0)?;
        sim.force = sim.field.compute(&sim.state, part.as_ref(), 0)?;
        Ok(sim)
    }

    /// Drive the Langevin noise from a shared fine-grid tape. The step must
    /// be a power-of-two multiple of the tape's step.
    pub fn with_tape(mut self, tape: NoiseTape) -> Result<Self> {
        let StepSchedule::Fixed { tau } = self.schedule else {
            return Err(Error::config("integrator.schedule", "coupled noise needs a fixed step"));
        };
        if !matches!(self.thermostat, Thermostat::Langevin { .. }) {
            return Err(Error::config("integrator.thermostat", "coupled noise needs the Langevin thermostat"));
        }
        let ratio = tau / tape.tau_fine();
        let m = ratio.round() as u64;
        if (ratio - m as f64).abs() > 1e-9 * ratio || !m.is_power_of_two() {
            return Err(Error::config(
                "strong.tau",
                format!("step {tau} is not a power-of-two multiple of {}", tape.tau_fine()),
            ));
        }
        self.noise = NoiseSource::Tape { tape, fine_per_step: m };
        Ok(self)
    }

    /// Continue from `state`, e.g. one prepared by another simulation.
    pub fn with_state(mut self, state: ParticleState) -> Result<Self> {
        if state.n() != self.state.n() || state.dim() != self.state.dim() {
            return Err(Error::config("state", "particle count or dimension differs"));
        }
        self.state = state;
        let part = self.partition(self.step)?;
        self.force = self.field.compute(&self.state, part.as_ref(), self.step)?;
        Ok(self)
    }

    fn partition(&self, step: u64) -> Result<Option<Partition>> {
        self.batch_size
            .map(|p| random_partition(self.state.n(), p, &self.rng, step))
            .transpose()
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.state.time
    }

    pub fn field(&self) -> &ForceField {
        &self.field
    }

    pub fn thermostat(&self) -> Thermostat {
        self.thermostat
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn schedule(&self) -> &StepSchedule {
        &self.schedule
    }

    /// Force at the current time with the current partition.
    pub fn current_force(&self) -> &[Vec3] {
        &self.force
    }

    /// Step size of the next step.
    pub fn next_tau(&self) -> f64 {
        self.schedule.tau(self.step + 1)
    }

    pub fn step(&mut self) -> Result<()> {
        let k = self.step + 1;
        let tau = self.schedule.tau(k);
        let part = self.partition(k)?;
        match self.thermostat {
            Thermostat::Langevin { gamma } => match self.noise {
                NoiseSource::Keyed => baoab_step(
                    &mut self.state,
                    &self.field,
                    &mut self.force,
                    part.as_ref(),
                    tau,
                    gamma,
                    self.beta,
                    &self.rng,
                    k,
                )?,
                NoiseSource::Tape { tape, fine_per_step } => {
                    let beta = self.beta;
                    baoab_step_with_noise(
                        &mut self.state,
                        &self.field,
                        &mut self.force,
                        part.as_ref(),
                        tau,
                        gamma,
                        |i| tape.coarse_noise(i, k, fine_per_step, gamma, beta),
                        k,
                    )?
                }
            },
            Thermostat::Andersen { nu } => verlet_andersen_step(
                &mut self.state,
                &self.field,
                &mut self.force,
                part.as_ref(),
                tau,
                nu,
                1.0 / self.beta,
                &self.rng,
                k,
            )?,
            Thermostat::None => verlet_andersen_step(
                &mut self.state,
                &self.field,
                &mut self.force,
                part.as_ref(),
                tau,
                0.0,
                1.0 / self.beta,
                &self.rng,
                k,
            )?,
        }
        self.step = k;
        Ok(())
    }

    /// Step until the clock reaches `t` (within a small fraction of a step).
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        while self.state.time < t - 1e-6 * self.next_tau() {
            self.step()?;
        }
        Ok(())
    }
}
