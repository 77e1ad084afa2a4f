use serde::{Deserialize, Serialize};

use crate::adversary::AttackStrategy;
use crate::error::{Error, Result};
use crate::oracle::{BatchSchedule, NoiseModel, Objective};
use crate::sign::GradVector;

pub const REQUIRES_HONEST_WORKER: &str = "byzantine_count < q";

/// The worker population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FleetConfig {
    #[serde(default = "default_q")]
    pub q: usize,
    #[serde(default)]
    pub byzantine_count: usize,
    #[serde(default)]
    pub attack: AttackStrategy,
    #[serde(default)]
    pub batch: BatchSchedule,
    #[serde(default)]
    pub noise: NoiseModel,
}

fn default_q() -> usize {
    27
}

impl Default for FleetConfig {
    fn default() -> Self {
        FleetConfig {
            q: default_q(),
            byzantine_count: 0,
            attack: AttackStrategy::default(),
            batch: BatchSchedule::default(),
            noise: NoiseModel::default(),
        }
    }
}

impl FleetConfig {
    pub fn honest_count(&self) -> usize {
        self.q - self.byzantine_count
    }

    /// Reported adversary fraction `b / q`.
    pub fn alpha(&self) -> f64 {
        self.byzantine_count as f64 / self.q as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.q == 0 {
            return Err(Error::input("q must be >= 1"));
        }
        if self.byzantine_count >= self.q {
            return Err(Error::Infeasible { condition: REQUIRES_HONEST_WORKER });
        }
        self.noise.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LrSchedule {
    Constant,
    /// `eta_t = eta_0 / sqrt(t + 1)`, `t` zero-indexed.
    #[default]
    InvSqrt,
}

impl LrSchedule {
    pub fn at(self, initial_lr: f64, step: usize) -> f64 {
        match self {
            LrSchedule::Constant => initial_lr,
            LrSchedule::InvSqrt => initial_lr / ((step + 1) as f64).sqrt(),
        }
    }
}

/// Starting iterate: an explicit vector or every coordinate set to one value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialPoint {
    Fill(f64),
    Values(Vec<f64>),
}

impl Default for InitialPoint {
    /// All ones: `f(x0) = d / 2`, i.e. 500 for the 1000-dimensional quadratic.
    fn default() -> Self {
        InitialPoint::Fill(1.0)
    }
}

impl InitialPoint {
    pub fn materialize(&self, dim: usize) -> Result<GradVector> {
        match self {
            InitialPoint::Fill(v) => GradVector::filled(dim, *v),
            InitialPoint::Values(values) => {
                let x = GradVector::new(values.clone())?;
                x.check_dim(dim)?;
                Ok(x)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub objective: Objective,
    #[serde(default)]
    pub fleet: FleetConfig,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_initial_lr")]
    pub initial_lr: f64,
    #[serde(default)]
    pub lr_schedule: LrSchedule,
    #[serde(default)]
    pub weight_decay: f64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub x0: InitialPoint,
}

fn default_iterations() -> usize {
    500
}

fn default_initial_lr() -> f64 {
    1.0
}

impl Default for RunConfig {
    /// The 1000-dimensional toy quadratic: 27 workers, unit Gaussian noise,
    /// 500 iterations, `eta_t = 1 / sqrt(t + 1)`, no weight decay.
    fn default() -> Self {
        RunConfig {
            objective: Objective::default(),
            fleet: FleetConfig::default(),
            iterations: default_iterations(),
            initial_lr: default_initial_lr(),
            lr_schedule: LrSchedule::default(),
            weight_decay: 0.0,
            master_seed: 0,
            x0: InitialPoint::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.fleet.validate()?;
        if self.iterations == 0 {
            return Err(Error::input("iterations must be >= 1"));
        }
        if !(self.initial_lr.is_finite() && self.initial_lr > 0.0) {
            return Err(Error::input(format!("initial_lr must be finite and > 0, got {}", self.initial_lr)));
        }
        if !(self.weight_decay.is_finite() && self.weight_decay >= 0.0) {
            return Err(Error::input(format!("weight_decay must be finite and >= 0, got {}", self.weight_decay)));
        }
        self.x0.materialize(self.objective.dim())?;
        Ok(())
    }

    pub fn lr_at(&self, step: usize) -> f64 {
        self.lr_schedule.at(self.initial_lr, step)
    }
}
