use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::config::RunConfig;
use super::run::{run, RunResult};
use crate::adversary::AttackStrategy;
use crate::error::{Error, Result};
use crate::oracle::BatchSchedule;
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    ByzantineCount,
    BatchSize,
    Attack,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::ByzantineCount => "byzantine_count",
            SweepAxis::BatchSize => "batch_size",
            SweepAxis::Attack => "attack",
        }
    }

    /// Parse one axis value: a count, a batch size (`t` for the iteration
    /// counter schedule) or an attack name.
    pub fn parse_value(self, text: &str) -> Result<AxisValue> {
        let text = text.trim();
        let bad = || Error::input(format!("invalid {} value `{text}`", self.name()));
        match self {
            SweepAxis::ByzantineCount => text.parse().map(AxisValue::ByzantineCount).map_err(|_| bad()),
            SweepAxis::BatchSize => {
                if text == "t" {
                    Ok(AxisValue::Batch(BatchSchedule::IterationCounter))
                } else {
                    let n: usize = text.parse().map_err(|_| bad())?;
                    Ok(AxisValue::Batch(BatchSchedule::constant(n)?))
                }
            }
            SweepAxis::Attack => AttackStrategy::parse(text).map(AxisValue::Attack).ok_or_else(bad),
        }
    }

    pub fn parse_values(self, list: &str) -> Result<Vec<AxisValue>> {
        list.split(',').filter(|s| !s.trim().is_empty()).map(|s| self.parse_value(s)).collect()
    }
}

impl FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "byzantine_count" => Ok(SweepAxis::ByzantineCount),
            "batch_size" => Ok(SweepAxis::BatchSize),
            "attack" => Ok(SweepAxis::Attack),
            _ => Err(Error::input(format!("unknown sweep axis `{s}`"))),
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisValue {
    ByzantineCount(usize),
    Batch(BatchSchedule),
    Attack(AttackStrategy),
}

impl AxisValue {
    pub fn axis(&self) -> SweepAxis {
        match self {
            AxisValue::ByzantineCount(_) => SweepAxis::ByzantineCount,
            AxisValue::Batch(_) => SweepAxis::BatchSize,
            AxisValue::Attack(_) => SweepAxis::Attack,
        }
    }

    /// `base` with this value substituted.
    pub fn apply(&self, base: &RunConfig) -> RunConfig {
        let mut c = base.clone();
        match *self {
            AxisValue::ByzantineCount(b) => c.fleet.byzantine_count = b,
            AxisValue::Batch(batch) => c.fleet.batch = batch,
            AxisValue::Attack(attack) => c.fleet.attack = attack,
        }
        c
    }
}

impl fmt::Display for AxisValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxisValue::ByzantineCount(b) => write!(f, "{b}"),
            AxisValue::Batch(BatchSchedule::Constant { size }) => write!(f, "{size}"),
            AxisValue::Batch(BatchSchedule::IterationCounter) => f.write_str("t"),
            AxisValue::Attack(a) => f.write_str(a.name()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: AxisValue,
    pub repeat: usize,
    pub seed: u64,
    /// Infeasible points are kept as errors; the sweep carries on.
    pub result: Result<RunResult>,
}

/// Run every `(value, repeat)` pair, ordered by value then repeat.
///
/// Repeat `r` runs with seed `derive_seed(base.master_seed, r)` at every
/// value, so points along the axis share their noise draws.
pub fn sweep(base: &RunConfig, values: &[AxisValue], repeats: usize) -> Result<Vec<SweepPoint>> {
    if repeats == 0 {
        return Err(Error::input("repeats must be >= 1"));
    }
    if values.is_empty() {
        return Err(Error::input("sweep needs at least one axis value"));
    }
    let pairs: Vec<(AxisValue, usize)> =
        values.iter().flat_map(|&v| (0..repeats).map(move |r| (v, r))).collect();
    Ok(pairs
        .into_par_iter()
        .map(|(value, repeat)| {
            let seed = derive_seed(base.master_seed, repeat as u64);
            let mut config = value.apply(base);
            config.master_seed = seed;
            SweepPoint { value, repeat, seed, result: run(&config) }
        })
        .collect())
}
