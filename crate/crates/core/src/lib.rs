//! Simulation and analysis of signSGD with majority vote under Byzantine
//! workers.
//!
//! * [`sign`]: three-valued sign algebra and the majority vote
//! * [`rng`]: counter-keyed random streams
//! * [`oracle`]: objectives and stochastic gradient oracles
//! * [`adversary`]: attack strategies
//! * [`bounds`]: closed-form bounds, thresholds and the case-analysis check
//! * [`sim`]: the training loop, Monte Carlo estimators and sweeps
//! * [`cli`]: configuration, CSV/SVG emission and subcommands

pub mod adversary;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod oracle;
pub mod rng;
pub mod sign;
pub mod sim;

pub use adversary::{AdversaryKnowledge, AttackStrategy};
pub use error::{Error, Result};
pub use oracle::{BatchSchedule, NoiseFamily, NoiseModel, Objective};
pub use rng::{derive_stream, RngStream};
pub use sign::{majority_vote, sign_of, GradVector, Sign, SignVector, VoteTally};
