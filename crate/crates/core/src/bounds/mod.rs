//! Closed-form bounds and thresholds for majority vote under omniscient
//! adversaries.
//!
//! Notation: `q` workers in total, a fraction `alpha` of them Byzantine,
//! honest workers guess a coordinate's sign correctly with probability `p`,
//! and `s` is the signal-to-noise ratio of that coordinate.

mod appendix;
mod binomial;

pub use appendix::{
    case_boundary, high_snr_expression, piecewise_bound, verify_appendix_cases, AppendixCheck, AppendixReport,
    AppendixViolation, Extremum,
};
pub use binomial::{binomial_cdf, exact_vote_failure, failure_cutoff};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const REQUIRES_P_ABOVE_HALF: &str = "p > 1/2";
pub const REQUIRES_ALPHA_BELOW_THRESHOLD: &str = "alpha < 1 - 1/(2p)";

/// Relative slack granted to [`lemma1_ratio_check`] for rounding in `p`.
const RATIO_CHECK_RTOL: f64 = 1e-9;

pub(crate) fn lemma1_bound_unchecked(s: f64) -> f64 {
    0.5 - s / (2.0 * (4.0 + s * s).sqrt())
}

/// Upper bound on the probability that a worker's estimate has the wrong
/// sign: `1/2 - s / (2 sqrt(4 + s^2))`.
pub fn lemma1_bound(s: f64) -> Result<f64> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::input(format!("snr must be >= 0, got {s}")));
    }
    if s.is_infinite() {
        return Ok(0.0);
    }
    Ok(lemma1_bound_unchecked(s))
}

/// Whether `p(1-p) / (p - 1/2)^2 <= 4 / s^2` holds.
///
/// Holds whenever `1 - p <= lemma1_bound(s)`, including the equality case up
/// to a relative rounding slack of 1e-9.
pub fn lemma1_ratio_check(p: f64, s: f64) -> Result<bool> {
    if !(p > 0.5 && p <= 1.0) {
        return Err(Error::input(format!("ratio check needs p in (1/2, 1], got {p}")));
    }
    if s.is_nan() || s <= 0.0 || s.is_infinite() {
        return Err(Error::input(format!("ratio check needs finite s > 0, got {s}")));
    }
    let ratio = p * (1.0 - p) / ((p - 0.5) * (p - 0.5));
    let rhs = 4.0 / (s * s);
    Ok(ratio <= rhs * (1.0 + RATIO_CHECK_RTOL))
}

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p > 1.0 {
        return Err(Error::input(format!("p must lie in (0, 1], got {p}")));
    }
    if p <= 0.5 {
        return Err(Error::Infeasible { condition: REQUIRES_P_ABOVE_HALF });
    }
    Ok(())
}

/// Strict upper bound `1 - 1/(2p)` on the tolerable adversary fraction.
pub fn alpha_threshold(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(1.0 - 1.0 / (2.0 * p))
}

/// Validate `(alpha, p)` against the feasible region.
pub fn check_feasible(alpha: f64, p: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::input(format!("alpha must lie in [0, 1), got {alpha}")));
    }
    let threshold = alpha_threshold(p)?;
    if alpha >= threshold || (1.0 - alpha) * p - 0.5 <= 0.0 {
        return Err(Error::Infeasible { condition: REQUIRES_ALPHA_BELOW_THRESHOLD });
    }
    Ok(())
}

/// Parse the shortest decimal rendering of `x` into `numerator / 10^k`.
///
/// Threshold counts are decided on this exact rational so that `p = 0.9`
/// means nine tenths, not the nearest binary float.
fn exact_decimal(x: f64) -> Option<(i128, i128)> {
    let text = format!("{x}");
    let (int, frac) = text.split_once('.').unwrap_or((&text, ""));
    if frac.len() > 30 || int.starts_with('-') {
        return None;
    }
    let den = 10i128.checked_pow(frac.len() as u32)?;
    let int: i128 = int.parse().ok()?;
    let frac_val: i128 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    Some((int.checked_mul(den)?.checked_add(frac_val)?, den))
}

/// Largest integer `K` with `K < (2p - 1)(q - K)`: how many omniscient
/// adversaries `q` workers can absorb. Zero when `p <= 1/2`.
///
/// Decided in exact arithmetic on the decimal value of `p`.
pub fn tolerable_byzantine_count(q: u64, p: f64) -> Result<u64> {
    if p.is_nan() || p > 1.0 {
        return Err(Error::input(format!("p must lie in (0, 1], got {p}")));
    }
    if p <= 0.5 || q == 0 {
        return Ok(0);
    }
    let (num, den) = exact_decimal(p).ok_or_else(|| Error::input(format!("p = {p} has no exact decimal form")))?;
    let overflow = || Error::input("q too large for exact threshold arithmetic");
    // K * den < (2 num - den)(q - K)  <=>  2 num K < (2 num - den) q
    let lhs_coef = num.checked_mul(2).ok_or_else(overflow)?;
    let rhs = (lhs_coef - den).checked_mul(q as i128).ok_or_else(overflow)?;
    if rhs <= 0 {
        return Ok(0);
    }
    Ok(((rhs - 1) / lhs_coef) as u64)
}

/// Cantelli bound on the per-coordinate vote failure probability under the
/// optimal attack:
/// `1/(2 sqrt q) * sqrt((1-alpha) p (1-p)) / ((1-alpha) p - 1/2)`.
///
/// The raw value is returned; it exceeds 1 (and is vacuous) near the
/// threshold.
pub fn vote_failure_bound(q: u64, alpha: f64, p: f64) -> Result<f64> {
    if q == 0 {
        return Err(Error::input("q must be >= 1"));
    }
    check_feasible(alpha, p)?;
    let honest = 1.0 - alpha;
    Ok(1.0 / (2.0 * (q as f64).sqrt()) * (honest * p * (1.0 - p)).sqrt() / (honest * p - 0.5))
}

/// The same bound after substituting the SNR relation:
/// `1/(4 s sqrt q) * sqrt(1-alpha) (p - 1/2) / ((1-alpha) p - 1/2)`.
pub fn vote_failure_bound_snr(q: u64, alpha: f64, p: f64, s: f64) -> Result<f64> {
    if q == 0 {
        return Err(Error::input("q must be >= 1"));
    }
    if s.is_nan() || s <= 0.0 || s.is_infinite() {
        return Err(Error::input(format!("snr must be finite and > 0, got {s}")));
    }
    check_feasible(alpha, p)?;
    let honest = 1.0 - alpha;
    Ok(1.0 / (4.0 * s * (q as f64).sqrt()) * honest.sqrt() * (p - 0.5) / (honest * p - 0.5))
}

/// Which fraction enters the convergence-rate right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateForm {
    /// `sqrt(1-alpha) (p - 1/2) / ((1-alpha) p - 1/2)`
    #[default]
    ProofFinal,
    /// `sqrt((1-alpha) p) / ((1-alpha) p - 1/2)`
    Statement,
}

/// The adversary/accuracy fraction `F` of the rate for the chosen form.
pub fn rate_fraction(alpha: f64, p: f64, form: RateForm) -> Result<f64> {
    check_feasible(alpha, p)?;
    let honest = 1.0 - alpha;
    let den = honest * p - 0.5;
    Ok(match form {
        RateForm::ProofFinal => honest.sqrt() * (p - 0.5) / den,
        RateForm::Statement => (honest * p).sqrt() / den,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundInputs {
    pub q: u64,
    pub alpha: f64,
    pub p: f64,
    #[serde(default)]
    pub s: Option<f64>,
    pub sigma_l1: f64,
    pub smoothness_l1: f64,
    pub f0_minus_fstar: f64,
    pub k_iters: u64,
}

impl BoundInputs {
    /// Inputs with the rate constants of the 1000-dimensional toy quadratic
    /// (`sigma = 1`, `L_i = 1`, `f(x0) = 500`, 500 iterations).
    pub fn toy(q: u64, alpha: f64, p: f64) -> Self {
        BoundInputs {
            q,
            alpha,
            p,
            s: None,
            sigma_l1: 1000.0,
            smoothness_l1: 1000.0,
            f0_minus_fstar: 500.0,
            k_iters: 500,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.q == 0 {
            return Err(Error::input("q must be >= 1"));
        }
        if self.k_iters == 0 {
            return Err(Error::input("k_iters must be >= 1"));
        }
        for (name, v) in [
            ("sigma_l1", self.sigma_l1),
            ("smoothness_l1", self.smoothness_l1),
            ("f0_minus_fstar", self.f0_minus_fstar),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::input(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if let Some(s) = self.s {
            if s.is_nan() || s < 0.0 {
                return Err(Error::input(format!("s must be >= 0, got {s}")));
            }
        }
        Ok(())
    }
}

/// `(4 / sqrt N) [ ||sigma||_1 / (4 sqrt Q) F + sqrt(||L||_1 (f0 - f*)) ]^2`
/// with `N = K^2` stochastic gradient calls per worker.
pub fn convergence_rate_rhs(inputs: &BoundInputs, form: RateForm) -> Result<f64> {
    inputs.validate()?;
    let fraction = rate_fraction(inputs.alpha, inputs.p, form)?;
    let k = inputs.k_iters as f64;
    let sqrt_n = k; // sqrt(K^2)
    let inner = inputs.sigma_l1 / (4.0 * (inputs.q as f64).sqrt()) * fraction
        + (inputs.smoothness_l1 * inputs.f0_minus_fstar).sqrt();
    Ok(4.0 / sqrt_n * inner * inner)
}

/// A probability bound with the raw value kept next to its clamp to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Probability {
    pub raw: f64,
    pub clamped: f64,
}

impl Probability {
    pub fn new(raw: f64) -> Self {
        Probability { raw, clamped: raw.clamp(0.0, 1.0) }
    }

    pub fn vacuous(&self) -> bool {
        self.raw > 1.0
    }
}

/// Every closed-form quantity for one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub inputs: BoundInputs,
    pub lemma1_wrong_sign_bound: Option<f64>,
    pub vote_failure_bound: Probability,
    pub vote_failure_bound_snr: Option<Probability>,
    /// Exact binomial failure probability with `floor(alpha q)` adversaries.
    pub exact_vote_failure: f64,
    pub rate_rhs_proof_form: f64,
    pub rate_rhs_statement_form: f64,
    pub alpha_threshold: f64,
    pub tolerable_byzantine_count: u64,
}

impl BoundReport {
    pub fn compute(inputs: BoundInputs) -> Result<Self> {
        inputs.validate()?;
        check_feasible(inputs.alpha, inputs.p)?;
        let (q, alpha, p) = (inputs.q, inputs.alpha, inputs.p);
        let snr_bound = match inputs.s {
            Some(s) if s > 0.0 && s.is_finite() => Some(Probability::new(vote_failure_bound_snr(q, alpha, p, s)?)),
            _ => None,
        };
        Ok(BoundReport {
            inputs,
            lemma1_wrong_sign_bound: inputs.s.map(lemma1_bound).transpose()?,
            vote_failure_bound: Probability::new(vote_failure_bound(q, alpha, p)?),
            vote_failure_bound_snr: snr_bound,
            exact_vote_failure: exact_vote_failure(q, adversary_count(q, alpha), p),
            rate_rhs_proof_form: convergence_rate_rhs(&inputs, RateForm::ProofFinal)?,
            rate_rhs_statement_form: convergence_rate_rhs(&inputs, RateForm::Statement)?,
            alpha_threshold: alpha_threshold(p)?,
            tolerable_byzantine_count: tolerable_byzantine_count(q, p)?,
        })
    }
}

/// `floor(alpha q)`, the adversary count for a fraction `alpha`.
///
/// A 1e-9 nudge absorbs representation error so `alpha = 1/3, q = 99`
/// yields 33.
pub fn adversary_count(q: u64, alpha: f64) -> u64 {
    let b = (alpha * q as f64 + 1e-9).floor();
    if b <= 0.0 {
        0
    } else {
        (b as u64).min(q)
    }
}
