//! Sign algebra and the server-side majority vote.
//!
//! Signs are three-valued: `sign(0) = 0`. A tied tally therefore broadcasts
//! a zero component and the corresponding coordinate does not move.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One coordinate of a transmitted sign vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(i8)]
pub enum Sign {
    Neg = -1,
    Zero = 0,
    Pos = 1,
}

impl Sign {
    #[inline]
    pub fn of_f64(v: f64) -> Sign {
        if v > 0.0 {
            Sign::Pos
        } else if v < 0.0 {
            Sign::Neg
        } else {
            Sign::Zero
        }
    }

    #[inline]
    pub fn of_i64(v: i64) -> Sign {
        match v.signum() {
            1 => Sign::Pos,
            -1 => Sign::Neg,
            _ => Sign::Zero,
        }
    }

    #[inline]
    pub fn value(self) -> i8 {
        self as i8
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self as i8 as f64
    }

    #[inline]
    pub fn flip(self) -> Sign {
        match self {
            Sign::Neg => Sign::Pos,
            Sign::Zero => Sign::Zero,
            Sign::Pos => Sign::Neg,
        }
    }

    pub fn try_from_i8(v: i8) -> Result<Sign> {
        match v {
            -1 => Ok(Sign::Neg),
            0 => Ok(Sign::Zero),
            1 => Ok(Sign::Pos),
            _ => Err(Error::input(format!("sign value {v} outside {{-1, 0, 1}}"))),
        }
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self.flip()
    }
}

/// A vector of signs, as pushed by a worker or broadcast by the server.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignVector(Vec<Sign>);

impl SignVector {
    pub fn new(entries: Vec<Sign>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::input("sign vector must have dim > 0"));
        }
        Ok(SignVector(entries))
    }

    pub fn from_i8(values: &[i8]) -> Result<Self> {
        let entries = values.iter().map(|&v| Sign::try_from_i8(v)).collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn filled(dim: usize, sign: Sign) -> Result<Self> {
        Self::new(vec![sign; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Sign] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Sign> + '_ {
        self.0.iter().copied()
    }

    pub fn to_i8(&self) -> Vec<i8> {
        self.0.iter().map(|s| s.value()).collect()
    }

    /// Coordinate-wise negation.
    pub fn negated(&self) -> SignVector {
        SignVector(self.0.iter().map(|s| s.flip()).collect())
    }

    pub fn zero_count(&self) -> usize {
        self.0.iter().filter(|&&s| s == Sign::Zero).count()
    }
}

impl std::ops::Index<usize> for SignVector {
    type Output = Sign;
    fn index(&self, i: usize) -> &Sign {
        &self.0[i]
    }
}

/// A dense real vector with finite entries: iterates, true gradients and
/// their stochastic estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct GradVector(Vec<f64>);

impl GradVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::input("vector must have dim > 0"));
        }
        if let Some(index) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(GradVector(entries))
    }

    pub fn filled(dim: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; dim])
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::filled(dim, 0.0)
    }

    /// Construct without validation. Callers must uphold finiteness and
    /// non-emptiness.
    pub(crate) fn from_vec_unchecked(entries: Vec<f64>) -> Self {
        debug_assert!(!entries.is_empty());
        debug_assert!(entries.iter().all(|v| v.is_finite()));
        GradVector(entries)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn l1_norm(&self) -> f64 {
        self.0.iter().map(|v| v.abs()).sum()
    }

    pub fn dot(&self, other: &GradVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(Error::DimensionMismatch { expected, found: self.dim() });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for GradVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        GradVector::new(v)
    }
}

impl From<GradVector> for Vec<f64> {
    fn from(v: GradVector) -> Vec<f64> {
        v.0
    }
}

impl std::ops::Index<usize> for GradVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Per-coordinate signed vote counts at the server.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteTally {
    sums: Vec<i64>,
    voters: usize,
}

impl VoteTally {
    pub fn sums(&self) -> &[i64] {
        &self.sums
    }

    pub fn voters(&self) -> usize {
        self.voters
    }

    pub fn dim(&self) -> usize {
        self.sums.len()
    }

    pub fn sign(&self) -> SignVector {
        SignVector(self.sums.iter().map(|&s| Sign::of_i64(s)).collect())
    }
}

/// Coordinate-wise sign with `sign(0) = 0`.
pub fn sign_of(v: &GradVector) -> SignVector {
    SignVector(v.0.iter().map(|&x| Sign::of_f64(x)).collect())
}

/// Coordinate-wise sign of a raw slice, rejecting non-finite entries.
pub fn sign_of_slice(v: &[f64]) -> Result<SignVector> {
    if let Some(index) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    SignVector::new(v.iter().map(|&x| Sign::of_f64(x)).collect())
}

/// Sum the votes coordinate-wise and return the tally with its sign.
pub fn majority_vote<'a, I>(votes: I) -> Result<(VoteTally, SignVector)>
where
    I: IntoIterator<Item = &'a SignVector>,
{
    let mut iter = votes.into_iter();
    let first = iter.next().ok_or_else(|| Error::input("majority vote needs at least one voter"))?;
    let dim = first.dim();
    let mut sums: Vec<i64> = first.iter().map(|s| s.value() as i64).collect();
    let mut voters = 1usize;
    for v in iter {
        if v.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.dim() });
        }
        for (acc, s) in sums.iter_mut().zip(v.iter()) {
            *acc += s.value() as i64;
        }
        voters += 1;
    }
    let tally = VoteTally { sums, voters };
    let out = tally.sign();
    Ok((tally, out))
}
