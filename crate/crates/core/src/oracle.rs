//! Objectives and stochastic gradient oracles.

use std::num::NonZeroUsize;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::sign::GradVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// `f(x) = 0.5 * <x, x>`
    Quadratic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Objective {
    #[serde(default = "default_kind")]
    pub kind: ObjectiveKind,
    #[serde(default = "default_dim")]
    pub dim: NonZeroUsize,
}

fn default_kind() -> ObjectiveKind {
    ObjectiveKind::Quadratic
}

fn default_dim() -> NonZeroUsize {
    NonZeroUsize::new(1000).unwrap()
}

impl Default for Objective {
    fn default() -> Self {
        Objective { kind: default_kind(), dim: default_dim() }
    }
}

impl Objective {
    pub fn quadratic(dim: usize) -> Result<Self> {
        let dim = NonZeroUsize::new(dim).ok_or_else(|| Error::input("objective dim must be > 0"))?;
        Ok(Objective { kind: ObjectiveKind::Quadratic, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim.get()
    }

    /// `||L||_1`, the sum of per-coordinate smoothness constants.
    pub fn smoothness_l1(&self) -> f64 {
        match self.kind {
            ObjectiveKind::Quadratic => self.dim() as f64,
        }
    }

    /// `f*`
    pub fn optimum_value(&self) -> f64 {
        match self.kind {
            ObjectiveKind::Quadratic => 0.0,
        }
    }

    pub fn value(&self, x: &GradVector) -> Result<f64> {
        x.check_dim(self.dim())?;
        Ok(self.value_unchecked(x.as_slice()))
    }

    pub(crate) fn value_unchecked(&self, x: &[f64]) -> f64 {
        match self.kind {
            ObjectiveKind::Quadratic => 0.5 * x.iter().map(|v| v * v).sum::<f64>(),
        }
    }
}

/// Exact gradient of the objective at `x`.
pub fn true_gradient(obj: &Objective, x: &GradVector) -> Result<GradVector> {
    x.check_dim(obj.dim())?;
    match obj.kind {
        ObjectiveKind::Quadratic => Ok(x.clone()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseFamily {
    Gaussian,
    Uniform,
    Laplace,
}

impl NoiseFamily {
    pub const ALL: [NoiseFamily; 3] = [NoiseFamily::Gaussian, NoiseFamily::Uniform, NoiseFamily::Laplace];

    pub fn name(self) -> &'static str {
        match self {
            NoiseFamily::Gaussian => "gaussian",
            NoiseFamily::Uniform => "uniform",
            NoiseFamily::Laplace => "laplace",
        }
    }
}

/// Zero-mean, symmetric, unimodal per-coordinate noise with standard
/// deviation `sigma` for a single sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    #[serde(default = "default_family")]
    pub family: NoiseFamily,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
}

fn default_family() -> NoiseFamily {
    NoiseFamily::Gaussian
}

fn default_sigma() -> f64 {
    1.0
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel { family: default_family(), sigma: default_sigma() }
    }
}

impl NoiseModel {
    pub fn new(family: NoiseFamily, sigma: f64) -> Result<Self> {
        let model = NoiseModel { family, sigma };
        model.validate()?;
        Ok(model)
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::new(NoiseFamily::Gaussian, sigma)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return Err(Error::input(format!("noise sigma must be finite and >= 0, got {}", self.sigma)));
        }
        Ok(())
    }

    /// One draw with variance `sigma^2`.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.family {
            NoiseFamily::Gaussian => {
                let z: f64 = StandardNormal.sample(rng);
                self.sigma * z
            }
            NoiseFamily::Uniform => {
                // U(-a, a) has variance a^2 / 3
                let u: f64 = rng.random();
                self.sigma * 3f64.sqrt() * (2.0 * u - 1.0)
            }
            NoiseFamily::Laplace => {
                // Laplace(0, b) has variance 2 b^2
                let e: f64 = Exp1.sample(rng);
                let b = self.sigma / std::f64::consts::SQRT_2;
                if rng.random::<bool>() {
                    b * e
                } else {
                    -b * e
                }
            }
        }
    }

    /// Mean of `n` independent draws.
    ///
    /// The Gaussian mean is drawn directly as `N(0, sigma^2 / n)`, which has
    /// exactly the same law as averaging `n` draws.
    #[inline]
    pub fn sample_mean<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> f64 {
        debug_assert!(n >= 1);
        if self.sigma == 0.0 {
            return 0.0;
        }
        match self.family {
            NoiseFamily::Gaussian => {
                let z: f64 = StandardNormal.sample(rng);
                self.sigma / (n as f64).sqrt() * z
            }
            _ => {
                let sum: f64 = (0..n).map(|_| self.sample(rng)).sum();
                sum / n as f64
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum BatchSchedule {
    Constant { size: NonZeroUsize },
    /// `n_t = t` for the 1-indexed step `t`.
    IterationCounter,
}

impl Default for BatchSchedule {
    fn default() -> Self {
        BatchSchedule::Constant { size: NonZeroUsize::MIN }
    }
}

impl BatchSchedule {
    pub fn constant(size: usize) -> Result<Self> {
        let size = NonZeroUsize::new(size).ok_or_else(|| Error::input("batch size must be >= 1"))?;
        Ok(BatchSchedule::Constant { size })
    }

    /// Batch size at the zero-indexed step `step`.
    pub fn size_at(&self, step: usize) -> usize {
        match *self {
            BatchSchedule::Constant { size } => size.get(),
            BatchSchedule::IterationCounter => step + 1,
        }
    }
}

/// `g(x)` plus the mean of `n` noise draws on every coordinate.
pub fn stochastic_gradient(
    obj: &Objective,
    x: &GradVector,
    noise: &NoiseModel,
    n: usize,
    stream: &mut RngStream,
) -> Result<GradVector> {
    if n == 0 {
        return Err(Error::input("batch size n must be >= 1"));
    }
    noise.validate()?;
    let g = true_gradient(obj, x)?;
    let entries = g.into_vec().into_iter().map(|gi| gi + noise.sample_mean(n, stream)).collect();
    Ok(GradVector::from_vec_unchecked(entries))
}

/// Signal-to-noise ratio of a batch-averaged coordinate estimate,
/// `|g_i| * sqrt(n) / sigma`.
pub fn snr(g_i: f64, sigma: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::input("batch size n must be >= 1"));
    }
    if !g_i.is_finite() || !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::input(format!("snr needs finite g_i and sigma >= 0, got ({g_i}, {sigma})")));
    }
    if sigma == 0.0 {
        return Err(Error::DivisionByZero("sigma = 0 (infinite SNR)"));
    }
    Ok(g_i.abs() * (n as f64).sqrt() / sigma)
}
