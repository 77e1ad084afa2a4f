//! Empirical verification suites: the wrong-sign bound against Monte Carlo,
//! the case analysis on a grid, and the vote-failure bound against both a
//! Monte Carlo vote and the exact binomial tail.

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::bounds::{self, vote_failure_bound};
use crate::oracle::{NoiseFamily, NoiseModel};
use crate::rng::{derive_stream, SUBSTREAM_BERNOULLI, SUBSTREAM_SIGN_ACCURACY};
use crate::sim::{estimate_p, estimate_vote_failure};

pub const DEFAULT_SNR_GRID: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
/// Statistical slack, in standard errors.
pub const SLACK_SE: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lemma1,
    Appendix,
    Vote,
    All,
}

impl std::str::FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lemma1" => Ok(Suite::Lemma1),
            "appendix" => Ok(Suite::Appendix),
            "vote" => Ok(Suite::Vote),
            "all" => Ok(Suite::All),
            _ => Err(format!("unknown suite `{s}` (expected lemma1, appendix, vote or all)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {} {}: {}", self.suite, self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Budget {
    pub samples: u64,
    pub trials: u64,
    pub grid_max: f64,
    pub grid_step: f64,
    pub seed: u64,
    pub snr_grid: Vec<f64>,
    /// `(q, alpha, p)`; `None` runs the default grid.
    pub vote_points: Option<Vec<(u64, f64, f64)>>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            samples: 100_000,
            trials: 100_000,
            grid_max: 10.0,
            grid_step: 0.01,
            seed: 0,
            snr_grid: DEFAULT_SNR_GRID.to_vec(),
            vote_points: None,
        }
    }
}

/// `q in {9, 27, 99}`, `p in {0.7, 0.8, 0.9}`,
/// `alpha in {0, 0.2, threshold(p) - 0.05}`, feasible points only.
pub fn default_vote_grid() -> Vec<(u64, f64, f64)> {
    let mut points = Vec::new();
    for q in [9u64, 27, 99] {
        for p in [0.7, 0.8, 0.9] {
            let t = bounds::alpha_threshold(p).expect("p > 1/2");
            for alpha in [0.0, 0.2, t - 0.05] {
                if bounds::check_feasible(alpha, p).is_ok() {
                    points.push((q, alpha, p));
                }
            }
        }
    }
    points
}

pub fn lemma1_checks(budget: &Budget) -> Vec<Check> {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let cases: Vec<(usize, NoiseFamily, usize, f64)> = NoiseFamily::ALL
        .iter()
        .enumerate()
        .flat_map(|(fi, &family)| budget.snr_grid.iter().enumerate().map(move |(si, &s)| (fi, family, si, s)))
        .collect();
    cases
        .into_par_iter()
        .map(|(fi, family, si, s)| {
            let name = format!("{} S={s}", family.name());
            let noise = NoiseModel::new(family, 1.0).expect("sigma = 1");
            let bound = match bounds::lemma1_bound(s) {
                Ok(b) => b,
                Err(e) => return Check { suite: "lemma1", name, passed: false, detail: e.to_string() },
            };
            let mut stream = derive_stream(budget.seed, (fi * 1000 + si) as u64, 0, SUBSTREAM_SIGN_ACCURACY);
            let est = match estimate_p(&noise, s, 1, budget.samples, &mut stream) {
                Ok(e) => e,
                Err(e) => return Check { suite: "lemma1", name, passed: false, detail: e.to_string() },
            };
            let wrong = est.wrong_sign_rate();
            let slack = SLACK_SE * (bound * (1.0 - bound) / budget.samples as f64).sqrt();
            let mut passed = wrong <= bound + slack;
            let mut detail = format!("wrong_sign={wrong:.6} bound={bound:.6} margin={:.6}", bound - wrong);
            if family == NoiseFamily::Gaussian {
                let phi = normal.cdf(-s);
                let se = (phi * (1.0 - phi) / budget.samples as f64).sqrt();
                let within = (wrong - phi).abs() <= SLACK_SE * se;
                passed &= within;
                detail.push_str(&format!(" phi(-S)={phi:.6} z={:.2}", (wrong - phi) / se));
            }
            Check { suite: "lemma1", name, passed, detail }
        })
        .collect()
}

pub fn appendix_checks(budget: &Budget) -> Vec<Check> {
    let r = bounds::verify_appendix_cases(budget.grid_max, budget.grid_step);
    let high_violations = r.violations.iter().filter(|v| v.check == bounds::AppendixCheck::HighSnr).count();
    let low_violations = r.violations.iter().filter(|v| v.check == bounds::AppendixCheck::LowSnr).count();
    let pw_violations = r.violations.iter().filter(|v| v.check == bounds::AppendixCheck::PiecewiseDominated).count();
    let mut checks = vec![
        Check {
            suite: "appendix",
            name: "boundary value".into(),
            passed: (r.high_snr_at_boundary - 5.0 / 12.0).abs() <= 1e-3,
            detail: format!("expr(2/sqrt3)={:.6} (about 0.42)", r.high_snr_at_boundary),
        },
        Check {
            suite: "appendix",
            name: "high-SNR case <= 1/2".into(),
            passed: high_violations == 0,
            detail: format!(
                "{} points, min margin {:.6}, max {:?}, turning point {:?}, violations {high_violations}",
                r.grid_points, r.high_snr_min_margin, r.high_snr_max, r.high_snr_min
            ),
        },
        Check {
            suite: "appendix",
            name: "low-SNR case sqrt3 <= sqrt(4+S^2)".into(),
            passed: low_violations == 0,
            detail: format!("min margin {:?}, violations {low_violations}", r.low_snr_min_margin),
        },
        Check {
            suite: "appendix",
            name: "piecewise <= unified".into(),
            passed: pw_violations == 0,
            detail: format!("min margin {:.3e}, violations {pw_violations}", r.piecewise_min_margin),
        },
    ];
    for v in r.violations.iter().take(10) {
        checks.push(Check {
            suite: "appendix",
            name: format!("{:?} violation", v.check),
            passed: false,
            detail: format!("S={} lhs={} rhs={}", v.s, v.lhs, v.rhs),
        });
    }
    checks
}

pub fn vote_checks(budget: &Budget) -> Vec<Check> {
    let points = budget.vote_points.clone().unwrap_or_else(default_vote_grid);
    points
        .into_par_iter()
        .enumerate()
        .map(|(k, (q, alpha, p))| {
            let name = format!("q={q} alpha={alpha:.4} p={p}");
            let bound = match vote_failure_bound(q, alpha, p) {
                Ok(b) => b,
                Err(e) => return Check { suite: "vote", name, passed: false, detail: e.to_string() },
            };
            let mut stream = derive_stream(budget.seed, k as u64, 0, SUBSTREAM_BERNOULLI);
            let est = match estimate_vote_failure(q, alpha, p, budget.trials, &mut stream) {
                Ok(e) => e,
                Err(e) => return Check { suite: "vote", name, passed: false, detail: e.to_string() },
            };
            let under_bound = est.rate <= bound + SLACK_SE * est.std_err;
            let exact_se = est.exact_std_err();
            let matches_exact = (est.rate - est.exact).abs() <= SLACK_SE * exact_se;
            let vacuous = if bound > 1.0 { " (vacuous)" } else { "" };
            Check {
                suite: "vote",
                name,
                passed: under_bound && matches_exact,
                detail: format!(
                    "empirical={:.6} se={:.6} exact={:.6} raw_bound={bound:.6}{vacuous} honest={} byzantine={}",
                    est.rate, est.std_err, est.exact, est.honest, est.byzantine
                ),
            }
        })
        .collect()
}

pub fn run_suite(suite: Suite, budget: &Budget) -> Vec<Check> {
    match suite {
        Suite::Lemma1 => lemma1_checks(budget),
        Suite::Appendix => appendix_checks(budget),
        Suite::Vote => vote_checks(budget),
        Suite::All => {
            let mut all = lemma1_checks(budget);
            all.extend(appendix_checks(budget));
            all.extend(vote_checks(budget));
            all
        }
    }
}
