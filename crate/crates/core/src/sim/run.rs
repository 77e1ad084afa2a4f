use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{FleetConfig, RunConfig};
use crate::adversary::AdversaryKnowledge;
use crate::error::Result;
use crate::oracle::{stochastic_gradient, true_gradient, Objective};
use crate::rng::{derive_stream, SUBSTREAM_GRADIENT};
use crate::sign::{majority_vote, sign_of, GradVector, Sign, SignVector, VoteTally};

/// Outcome of one synchronous voting round at a fixed iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct VoteRound {
    pub tally: VoteTally,
    pub aggregate: SignVector,
    /// Coordinates with `g_i != 0` whose aggregate sign is the opposite of
    /// `sign(g_i)`. Ties are not counted here.
    pub flipped: usize,
    pub ties: usize,
}

fn worker_estimate(
    obj: &Objective,
    fleet: &FleetConfig,
    x: &GradVector,
    n: usize,
    seed: u64,
    worker: usize,
    step: usize,
) -> Result<GradVector> {
    let mut stream = derive_stream(seed, worker as u64, step as u64, SUBSTREAM_GRADIENT);
    stochastic_gradient(obj, x, &fleet.noise, n, &mut stream)
}

/// One round: honest workers `0..q-b` and Byzantine workers `q-b..q` vote on
/// the iterate `x`, and the server tallies.
///
/// Worker `w` draws its noise from stream `(seed, w, step, 0)`, so honest
/// votes at a given `(seed, step, x)` do not depend on the attack.
pub fn vote_round(obj: &Objective, fleet: &FleetConfig, x: &GradVector, step: usize, seed: u64) -> Result<VoteRound> {
    fleet.validate()?;
    let g = true_gradient(obj, x)?;
    let n = fleet.batch.size_at(step);
    let honest = fleet.honest_count();
    let b = fleet.byzantine_count;

    let honest_votes: Vec<SignVector> = (0..honest)
        .into_par_iter()
        .map(|w| worker_estimate(obj, fleet, x, n, seed, w, step).map(|e| sign_of(&e)))
        .collect::<Result<_>>()?;

    let own_estimates: Vec<GradVector> = if b > 0 && fleet.attack.needs_own_estimates() {
        (honest..fleet.q)
            .into_par_iter()
            .map(|w| worker_estimate(obj, fleet, x, n, seed, w, step))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let knowledge = AdversaryKnowledge {
        true_gradient: Some(&g),
        honest_votes: &honest_votes,
        own_estimates: &own_estimates,
    };
    let byzantine_votes = fleet.attack.votes(&knowledge, b)?;
    let (tally, aggregate) = majority_vote(honest_votes.iter().chain(&byzantine_votes))?;

    let mut flipped = 0;
    let mut ties = 0;
    for (out, gi) in aggregate.iter().zip(g.as_slice()) {
        if out == Sign::Zero {
            ties += 1;
        } else if *gi != 0.0 && out != Sign::of_f64(*gi) {
            flipped += 1;
        }
    }
    Ok(VoteRound { tally, aggregate, flipped, ties })
}

/// Repeated rounds at a frozen iterate, one per step index in `0..steps`.
pub fn frozen_vote_rounds(
    obj: &Objective,
    fleet: &FleetConfig,
    x: &GradVector,
    steps: usize,
    seed: u64,
) -> Result<Vec<VoteRound>> {
    (0..steps).map(|t| vote_round(obj, fleet, x, t, seed)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    /// `f(x_t)` before the update of this step.
    pub objective: f64,
    /// `||g(x_t)||_1`
    pub grad_l1: f64,
    pub lr: f64,
    pub flipped_coords: usize,
    pub tie_coords: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub config: RunConfig,
    pub trajectory: Vec<StepRecord>,
    /// `f(x_T)` after the last update.
    pub final_objective: f64,
    pub final_x: GradVector,
    pub wall_time_seconds: f64,
}

impl RunResult {
    /// Mean over steps of `flipped_coords / dim`.
    pub fn mean_flip_rate(&self) -> f64 {
        let dim = self.config.objective.dim() as f64;
        let total: f64 = self.trajectory.iter().map(|r| r.flipped_coords as f64 / dim).sum();
        total / self.trajectory.len() as f64
    }

    pub fn initial_objective(&self) -> f64 {
        self.trajectory[0].objective
    }
}

/// Run signSGD with majority vote for `config.iterations` steps.
///
/// Every worker applies `x_{t+1} = x_t - eta_t (sign(O_t) + lambda x_t)`.
pub fn run(config: &RunConfig) -> Result<RunResult> {
    config.validate()?;
    let started = Instant::now();
    let obj = &config.objective;
    let mut x = config.x0.materialize(obj.dim())?;
    let mut trajectory = Vec::with_capacity(config.iterations);

    for t in 0..config.iterations {
        let lr = config.lr_at(t);
        let round = vote_round(obj, &config.fleet, &x, t, config.master_seed)?;
        trajectory.push(StepRecord {
            step: t,
            objective: obj.value_unchecked(x.as_slice()),
            grad_l1: true_gradient(obj, &x)?.l1_norm(),
            lr,
            flipped_coords: round.flipped,
            tie_coords: round.ties,
        });
        let lambda = config.weight_decay;
        let next: Vec<f64> = x
            .as_slice()
            .iter()
            .zip(round.aggregate.iter())
            .map(|(xi, s)| xi - lr * (s.as_f64() + lambda * xi))
            .collect();
        x = GradVector::new(next)?;
    }

    Ok(RunResult {
        config: config.clone(),
        final_objective: obj.value_unchecked(x.as_slice()),
        final_x: x,
        trajectory,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::AttackStrategy;
    use crate::oracle::{BatchSchedule, NoiseModel};
    use crate::sim::config::{InitialPoint, LrSchedule};

    fn noiseless(q: usize, b: usize, dim: usize) -> RunConfig {
        RunConfig {
            objective: Objective::quadratic(dim).unwrap(),
            fleet: FleetConfig {
                q,
                byzantine_count: b,
                attack: AttackStrategy::OmniscientOptimal,
                batch: BatchSchedule::constant(1).unwrap(),
                noise: NoiseModel::gaussian(0.0).unwrap(),
            },
            iterations: 30,
            ..RunConfig::default()
        }
    }

    #[test]
    fn noiseless_sign_descent_hits_origin_in_ten_steps() {
        let mut c = noiseless(1, 0, 2);
        c.iterations = 10;
        c.initial_lr = 1.0;
        c.lr_schedule = LrSchedule::Constant;
        c.x0 = InitialPoint::Values(vec![10.0, -10.0]);
        let r = run(&c).unwrap();
        for (t, rec) in r.trajectory.iter().enumerate() {
            let v = 10.0 - t as f64;
            assert_eq!(rec.objective, v * v);
        }
        assert_eq!(r.final_x.as_slice(), &[0.0, 0.0]);
        assert_eq!(r.final_objective, 0.0);
        let mut c9 = c.clone();
        c9.iterations = 9;
        assert!(run(&c9).unwrap().final_x.as_slice().iter().all(|v| v.abs() == 1.0));
    }

    #[test]
    fn honest_majority_matches_adversary_free_run() {
        let attacked = run(&noiseless(27, 13, 50)).unwrap();
        let clean = run(&noiseless(27, 0, 50)).unwrap();
        assert_eq!(attacked.trajectory.iter().map(|r| r.flipped_coords).sum::<usize>(), 0);
        assert_eq!(attacked.final_x, clean.final_x);
        assert_eq!(
            attacked.trajectory.iter().map(|r| r.objective).collect::<Vec<_>>(),
            clean.trajectory.iter().map(|r| r.objective).collect::<Vec<_>>()
        );
    }

    #[test]
    fn adversarial_majority_diverges() {
        let r = run(&noiseless(27, 14, 50)).unwrap();
        assert!(r.trajectory.iter().all(|s| s.flipped_coords == 50));
        assert!(r.trajectory.windows(2).all(|w| w[1].objective > w[0].objective));
        assert!(r.final_objective > r.trajectory.last().unwrap().objective);
    }

    #[test]
    fn update_rule_with_weight_decay() {
        let mut c = RunConfig {
            objective: Objective::quadratic(20).unwrap(),
            iterations: 1,
            weight_decay: 0.1,
            master_seed: 9,
            ..RunConfig::default()
        };
        c.fleet.byzantine_count = 4;
        c.fleet.attack = AttackStrategy::BlindFlip;
        c.x0 = InitialPoint::Values((0..20).map(|i| i as f64 / 7.0 - 1.3).collect());
        let x0 = c.x0.materialize(20).unwrap();
        let round = vote_round(&c.objective, &c.fleet, &x0, 0, 9).unwrap();
        let r = run(&c).unwrap();
        for i in 0..20 {
            let expected = x0[i] - 1.0 * (round.aggregate[i].as_f64() + 0.1 * x0[i]);
            assert_eq!(r.final_x[i], expected);
        }
    }

    #[test]
    fn infeasible_fleet_rejected_before_running() {
        let c = noiseless(5, 5, 3);
        assert!(matches!(run(&c), Err(crate::Error::Infeasible { .. })));
    }

    #[test]
    fn ties_counted_separately() {
        // one honest worker against one omniscient adversary, no noise: the
        // votes cancel on every coordinate
        let obj = Objective::quadratic(4).unwrap();
        let fleet = FleetConfig {
            q: 2,
            byzantine_count: 1,
            attack: AttackStrategy::OmniscientOptimal,
            batch: BatchSchedule::constant(1).unwrap(),
            noise: NoiseModel::gaussian(0.0).unwrap(),
        };
        let x = GradVector::new(vec![1.0, -1.0, 0.0, 2.0]).unwrap();
        let round = vote_round(&obj, &fleet, &x, 0, 0).unwrap();
        assert_eq!(round.flipped, 0);
        assert_eq!(round.ties, 4);
    }

    #[test]
    fn thread_count_does_not_change_trajectory() {
        let mut c = RunConfig { iterations: 20, master_seed: 77, ..RunConfig::default() };
        c.objective = Objective::quadratic(200).unwrap();
        c.fleet.byzantine_count = 9;
        c.fleet.attack = AttackStrategy::AdversaryServer;
        let on = |threads| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| run(&c).unwrap())
        };
        let a = on(1);
        let b = on(8);
        assert_eq!(a.trajectory, b.trajectory);
        assert_eq!(a.final_x, b.final_x);
    }
}
