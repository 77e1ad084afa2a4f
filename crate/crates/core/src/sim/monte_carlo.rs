//! Monte Carlo counterparts of the closed-form bounds.

use rand::Rng;
use serde::Serialize;

use crate::bounds::{adversary_count, exact_vote_failure, failure_cutoff};
use crate::error::{Error, Result};
use crate::oracle::NoiseModel;
use crate::rng::RngStream;
use crate::sign::Sign;

/// Empirical probability that a batch-averaged estimate has the right sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignAccuracy {
    pub p_hat: f64,
    pub std_err: f64,
    pub samples: u64,
    /// `g_i = 0`: there is no true sign, so `p_hat` is the frequency of
    /// positive estimates.
    pub degenerate: bool,
}

impl SignAccuracy {
    pub fn wrong_sign_rate(&self) -> f64 {
        1.0 - self.p_hat
    }
}

fn binomial_se(p_hat: f64, n: u64) -> f64 {
    (p_hat * (1.0 - p_hat) / n as f64).sqrt()
}

/// Estimate `P[sign(g_i + noise_mean) = sign(g_i)]` from `samples` draws.
pub fn estimate_p(noise: &NoiseModel, g_i: f64, n: usize, samples: u64, stream: &mut RngStream) -> Result<SignAccuracy> {
    noise.validate()?;
    if n == 0 || samples == 0 {
        return Err(Error::input("estimate_p needs n >= 1 and samples >= 1"));
    }
    if !g_i.is_finite() {
        return Err(Error::input(format!("g_i must be finite, got {g_i}")));
    }
    let degenerate = g_i == 0.0;
    let reference = if degenerate { Sign::Pos } else { Sign::of_f64(g_i) };
    let mut hits = 0u64;
    for _ in 0..samples {
        if Sign::of_f64(g_i + noise.sample_mean(n, stream)) == reference {
            hits += 1;
        }
    }
    let p_hat = hits as f64 / samples as f64;
    Ok(SignAccuracy { p_hat, std_err: binomial_se(p_hat, samples), samples, degenerate })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VoteFailureEstimate {
    pub rate: f64,
    pub std_err: f64,
    pub trials: u64,
    /// Exact `P[Z < q/2]` for `Z ~ Binomial(honest, p)`.
    pub exact: f64,
    pub honest: u64,
    pub byzantine: u64,
}

impl VoteFailureEstimate {
    /// Standard error implied by the exact probability; nonzero whenever
    /// the event is possible, unlike the empirical one.
    pub fn exact_std_err(&self) -> f64 {
        binomial_se(self.exact, self.trials)
    }
}

/// Simulate the vote on one coordinate under the optimal attack: each of the
/// `q - floor(alpha q)` honest workers is independently correct with
/// probability `p`, every adversary is wrong, and the vote fails when fewer
/// than `q/2` votes are correct.
pub fn estimate_vote_failure(q: u64, alpha: f64, p: f64, trials: u64, stream: &mut RngStream) -> Result<VoteFailureEstimate> {
    if q == 0 || trials == 0 {
        return Err(Error::input("estimate_vote_failure needs q >= 1 and trials >= 1"));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::input(format!("alpha must lie in [0, 1), got {alpha}")));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::input(format!("p must lie in (0, 1], got {p}")));
    }
    let byzantine = adversary_count(q, alpha);
    let honest = q - byzantine;
    let cutoff = failure_cutoff(q).expect("q >= 1");
    let mut failures = 0u64;
    for _ in 0..trials {
        let correct = (0..honest).filter(|_| stream.random_bool(p)).count() as u64;
        if correct <= cutoff {
            failures += 1;
        }
    }
    let rate = failures as f64 / trials as f64;
    Ok(VoteFailureEstimate {
        rate,
        std_err: binomial_se(rate, trials),
        trials,
        exact: exact_vote_failure(q, byzantine, p),
        honest,
        byzantine,
    })
}
