//! Byzantine vote strategies.
//!
//! Each strategy is a pure function of [`AdversaryKnowledge`], which only
//! carries the state of the current step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sign::{majority_vote, sign_of, GradVector, SignVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackStrategy {
    /// Byzantine workers follow the protocol and vote their own estimate.
    None,
    /// Every adversary sends `-sign(g(x_t))`.
    #[default]
    OmniscientOptimal,
    /// Every adversary negates the sign of its own noisy estimate.
    BlindFlip,
    /// Adversaries majority-vote their own estimates, then all send the
    /// negated result.
    AdversaryServer,
}


impl AttackStrategy {
    pub const ALL: [AttackStrategy; 4] = [
        AttackStrategy::None,
        AttackStrategy::OmniscientOptimal,
        AttackStrategy::BlindFlip,
        AttackStrategy::AdversaryServer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AttackStrategy::None => "none",
            AttackStrategy::OmniscientOptimal => "omniscient_optimal",
            AttackStrategy::BlindFlip => "blind_flip",
            AttackStrategy::AdversaryServer => "adversary_server",
        }
    }

    pub fn parse(s: &str) -> Option<AttackStrategy> {
        Self::ALL.into_iter().find(|a| a.name() == s)
    }

    pub fn needs_own_estimates(self) -> bool {
        !matches!(self, AttackStrategy::OmniscientOptimal)
    }

    /// Votes of `b` Byzantine workers; empty when `b == 0`.
    pub fn votes(self, knowledge: &AdversaryKnowledge<'_>, b: usize) -> Result<Vec<SignVector>> {
        if b == 0 {
            return Ok(Vec::new());
        }
        match self {
            AttackStrategy::None => honest_votes(knowledge, b),
            AttackStrategy::OmniscientOptimal => omniscient_optimal_votes(knowledge, b),
            AttackStrategy::BlindFlip => blind_flip_votes(knowledge, b),
            AttackStrategy::AdversaryServer => adversary_server_votes(knowledge, b),
        }
    }
}

impl std::fmt::Display for AttackStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// What the adversaries can see at step `t`.
///
/// `honest_votes` is exposed but none of the built-in strategies consume it.
#[derive(Debug, Clone, Copy, Default)]
pub struct AdversaryKnowledge<'a> {
    pub true_gradient: Option<&'a GradVector>,
    pub honest_votes: &'a [SignVector],
    pub own_estimates: &'a [GradVector],
}

fn check_b(b: usize) -> Result<()> {
    if b == 0 {
        return Err(Error::input("adversary count b must be >= 1"));
    }
    Ok(())
}

fn own_estimates<'a>(knowledge: &AdversaryKnowledge<'a>, b: usize) -> Result<&'a [GradVector]> {
    if knowledge.own_estimates.len() < b {
        return Err(Error::input(format!(
            "{} own estimates supplied for {b} adversaries",
            knowledge.own_estimates.len()
        )));
    }
    Ok(&knowledge.own_estimates[..b])
}

fn honest_votes(knowledge: &AdversaryKnowledge<'_>, b: usize) -> Result<Vec<SignVector>> {
    Ok(own_estimates(knowledge, b)?.iter().map(sign_of).collect())
}

/// `b` identical copies of `-sign(g(x_t))`.
pub fn omniscient_optimal_votes(knowledge: &AdversaryKnowledge<'_>, b: usize) -> Result<Vec<SignVector>> {
    check_b(b)?;
    let g = knowledge.true_gradient.ok_or(Error::Capability("omniscient attack needs the true gradient"))?;
    let vote = sign_of(g).negated();
    Ok(vec![vote; b])
}

/// Adversary `j` sends `-sign(own_estimates[j])`.
pub fn blind_flip_votes(knowledge: &AdversaryKnowledge<'_>, b: usize) -> Result<Vec<SignVector>> {
    check_b(b)?;
    Ok(own_estimates(knowledge, b)?.iter().map(|e| sign_of(e).negated()).collect())
}

/// Majority vote over the adversaries' own signs, negated and sent by all.
pub fn adversary_server_votes(knowledge: &AdversaryKnowledge<'_>, b: usize) -> Result<Vec<SignVector>> {
    check_b(b)?;
    let signs: Vec<SignVector> = own_estimates(knowledge, b)?.iter().map(sign_of).collect();
    let (_, consensus) = majority_vote(&signs)?;
    Ok(vec![consensus.negated(); b])
}
