//! Exact binomial tails for the vote-failure event.

/// `P[X <= k]` for `X ~ Binomial(n, p)`.
///
/// Terms are accumulated in log space, which stays accurate for the worker
/// counts the simulator handles (up to a few thousand).
pub fn binomial_cdf(n: u64, p: f64, k: u64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "p = {p} outside [0, 1]");
    if k >= n {
        return 1.0;
    }
    if p == 0.0 {
        return 1.0;
    }
    if p == 1.0 {
        return 0.0;
    }
    let (ln_p, ln_q) = (p.ln(), (-p).ln_1p());
    let mut ln_choose = 0.0f64;
    let mut total = 0.0f64;
    for i in 0..=k {
        if i > 0 {
            ln_choose += ((n - i + 1) as f64).ln() - (i as f64).ln();
        }
        total += (ln_choose + i as f64 * ln_p + (n - i) as f64 * ln_q).exp();
    }
    total.min(1.0)
}

/// Largest number of correct votes that still loses a `q`-voter majority,
/// i.e. the largest integer below `q / 2`.
pub fn failure_cutoff(q: u64) -> Option<u64> {
    if q == 0 {
        None
    } else {
        Some((q - 1) / 2)
    }
}

/// Exact probability that `q - b` honest voters, each correct with
/// probability `p`, fail to outvote `b` adversaries who always vote wrong:
/// `P[Z < q/2]` with `Z ~ Binomial(q - b, p)`.
pub fn exact_vote_failure(q: u64, b: u64, p: f64) -> f64 {
    assert!(b <= q);
    match failure_cutoff(q) {
        None => 0.0,
        Some(k) => binomial_cdf(q - b, p, k),
    }
}
