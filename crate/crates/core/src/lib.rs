//! Numerical toolkit for hierarchical controller synthesis on jump-diffusion systems.
//!
//! Two halves share one Monte Carlo substrate:
//!
//! * [`renewal`] and [`pattern`] cover renewal-theory limits and the expected
//!   waiting times, inter-occurrence times and race probabilities of symbol
//!   patterns in iid and Markov streams.
//! * [`impulse`] synthesizes impulse-control policies for 1-D jump-diffusions
//!   from a quasi-variational inequality and verifies them by simulation.
//!
//! [`sde`] holds the jump-diffusion simulator and the Itô / generator / Dynkin
//! machinery, and [`cli`] is the scenario-driven front end used by the binary.
//!
//! Every stochastic routine takes a [`RandomStream`]; replication `i` of a
//! Monte Carlo run always draws from child stream `i`, and reductions use a
//! fixed pairwise order, so results do not depend on the rayon thread count.

pub mod cli;
pub mod error;
pub mod impulse;
pub mod linalg;
pub mod pattern;
pub mod quadrature;
pub mod renewal;
pub mod rng;
pub mod sde;
pub mod stats;

pub use error::{Error, Result};
pub use rng::{derive_stream, RandomStream};
pub use stats::EstimateWithCI;
