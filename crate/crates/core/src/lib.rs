//! Evolutionary multitasking for neural control policies.
//!
//! A single population of genomes in a unified search space evolves the
//! weights of several small feed-forward policies at once, one per
//! reinforcement-learning task. The first layers of every task network are
//! shared in the genome, so useful structure found for one task is available
//! to the others through crossover.
//!
//! * [`env`]: cart-pole, acrobot and pendulum simulators.
//! * [`policy`]: dense networks over flat weight vectors.
//! * [`genome`]: the unified space and its per-task decoding.
//! * [`mfea`]: the multifactorial evolutionary algorithm.
//! * [`evaluator`]: episodic fitness and the held-out test protocol.
//! * [`harness`]: experiment configs, runs and CSV artifacts.

pub mod env;
pub mod error;
pub mod evaluator;
pub mod exec;
pub mod genome;
pub mod harness;
pub mod mfea;
pub mod policy;
pub mod seeds;
pub mod stats;

pub use error::{Error, Result};
pub use exec::Execution;
