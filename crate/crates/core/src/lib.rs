//! Random batch simulation of second-order interacting particle systems.
//!
//! Particles follow underdamped Langevin dynamics (or Newtonian dynamics
//! with an Andersen thermostat). Instead of the full `O(N^2)` pair sum, each
//! time step draws a random partition into batches of size `p` and lets
//! particles interact only inside their batch, with the pair sum reweighted
//! by `(N - 1) / (p - 1)`. Singular kernels such as Lennard-Jones are split
//! into a short-range part summed exactly over a cell list and a bounded
//! long-range part that goes through the batches.
//!
//! Module map:
//!
//! - [`state`]: particle state, periodic box, initial conditions
//! - [`rng`]: counter-based random streams
//! - [`batching`]: random partitions and the batch-force error functionals
//! - [`kernels`]: the bounded test kernel, Lennard-Jones and its split
//! - [`neighbor`]: cell lists
//! - [`forces`]: full, batched and split force assembly
//! - [`integrators`]: BAOAB, Verlet with Andersen collisions, Euler-Maruyama
//! - [`observables`]: pressure, temperature, weak and strong errors
//! - [`experiments`]: scenario files and the experiment runners behind the `rbm` binary

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod batching;
pub mod error;
pub mod experiments;
pub mod forces;
pub mod integrators;
pub mod kernels;
pub mod neighbor;
pub mod observables;
pub mod rng;
pub mod state;

pub use error::{Error, Result};
