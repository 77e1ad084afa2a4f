//! The training loop, Monte Carlo estimators and parameter sweeps.

mod config;
mod monte_carlo;
mod run;
mod sweep;

pub use config::{FleetConfig, InitialPoint, LrSchedule, RunConfig, REQUIRES_HONEST_WORKER};
pub use monte_carlo::{estimate_p, estimate_vote_failure, SignAccuracy, VoteFailureEstimate};
pub use run::{frozen_vote_rounds, run, vote_round, RunResult, StepRecord, VoteRound};
pub use sweep::{sweep, AxisValue, SweepAxis, SweepPoint};
