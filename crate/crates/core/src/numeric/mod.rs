//! Exact numeric Collatz computation.
//!
//! Terms are walked in `u128` while they fit and spill over to [`BigUint`]
//! otherwise, so every function here is exact for arbitrarily large inputs.

mod term;
mod verify;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

pub use verify::{verify_range, CacheStats, RangeOptions, VerifyReport};

pub(crate) use term::Term;

/// Default number of function applications allowed per start value.
pub const DEFAULT_MAX_STEPS: u64 = 10_000_000;

/// Environment variable that overrides [`DEFAULT_MAX_STEPS`].
pub const MAX_STEPS_ENV: &str = "COLLATZ_SIEVE_MAX_STEPS";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("sequence start must be a positive integer")]
    ZeroStart,
    #[error("pre-proven order is undefined for n = 1")]
    PsoUndefined,
    #[error("n = {n} did not reach its target within {steps} steps")]
    BudgetExceeded { n: BigUint, steps: u64 },
    #[error("invalid range {lo}..={hi}")]
    InvalidRange { lo: u64, hi: u64 },
}

/// Step budget from [`MAX_STEPS_ENV`], falling back to [`DEFAULT_MAX_STEPS`].
pub fn default_max_steps() -> u64 {
    std::env::var(MAX_STEPS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_MAX_STEPS)
}

/// One application of the Collatz function.
pub fn collatz_step(n: &BigUint) -> BigUint {
    debug_assert!(!n.is_zero(), "collatz_step is defined for n >= 1");
    if n.bit(0) {
        n * 3u32 + 1u32
    } else {
        n >> 1
    }
}

/// Terms `Col^1(n) ..= Col^m(n)` where `Col^m(n) = 1` for the first time.
///
/// The start value is not included, so `trajectory(1)` is empty.
pub fn trajectory(n: &BigUint, max_steps: u64) -> Result<Vec<BigUint>, NumericError> {
    let mut term = start(n)?;
    let mut out = Vec::new();
    while !term.is_one() {
        if out.len() as u64 >= max_steps {
            return Err(budget(n, max_steps));
        }
        term.step();
        out.push(term.to_biguint());
    }
    Ok(out)
}

/// Total sequence order: applications until the first 1. `tso(1) = 0`.
pub fn tso(n: &BigUint, max_steps: u64) -> Result<u64, NumericError> {
    tso_term(start(n)?, max_steps).ok_or_else(|| budget(n, max_steps))
}

/// Pre-proven sequence order and the term reached at that order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pso {
    pub order: u64,
    #[serde(serialize_with = "crate::serde_big::ser")]
    pub pst: BigUint,
}

/// Smallest `k` with `Col^k(n) < n`.
pub fn pso(n: &BigUint, max_steps: u64) -> Result<Pso, NumericError> {
    let seg = segment(&start(n)?, max_steps).map_err(|e| e.with_start(n))?;
    Ok(Pso {
        order: seg.order,
        pst: seg.pst.to_biguint(),
    })
}

/// Largest value over `n` and its trajectory.
pub fn peak(n: &BigUint, max_steps: u64) -> Result<BigUint, NumericError> {
    let mut term = start(n)?;
    let mut best = term.clone();
    let mut steps = 0u64;
    while !term.is_one() {
        if steps >= max_steps {
            return Err(budget(n, max_steps));
        }
        term.step();
        steps += 1;
        if term > best {
            best = term.clone();
        }
    }
    Ok(best.to_biguint())
}

/// Everything the numeric engine knows about one start value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SequenceSummary {
    #[serde(serialize_with = "crate::serde_big::ser")]
    pub n: BigUint,
    pub tso: u64,
    /// `None` for `n = 1`.
    pub pso: Option<u64>,
    #[serde(serialize_with = "crate::serde_big::ser_opt")]
    pub pst: Option<BigUint>,
    #[serde(serialize_with = "crate::serde_big::ser")]
    pub peak: BigUint,
}

pub fn summarize(n: &BigUint, max_steps: u64) -> Result<SequenceSummary, NumericError> {
    let tso = tso(n, max_steps)?;
    let (pso, pst) = if n.is_one() {
        (None, None)
    } else {
        let p = pso(n, max_steps)?;
        (Some(p.order), Some(p.pst))
    };
    Ok(SequenceSummary {
        n: n.clone(),
        tso,
        pso,
        pst,
        peak: peak(n, max_steps)?,
    })
}

/// The part of a trajectory up to and including the pre-proven term.
pub(crate) struct Segment {
    pub order: u64,
    pub pst: Term,
    /// Maximum over the start value and the terms up to `pst`.
    pub max: Term,
}

pub(crate) enum SegmentError {
    Undefined,
    Budget(u64),
}

impl SegmentError {
    fn with_start(self, n: &BigUint) -> NumericError {
        match self {
            SegmentError::Undefined => NumericError::PsoUndefined,
            SegmentError::Budget(steps) => budget(n, steps),
        }
    }
}

pub(crate) fn segment(n: &Term, max_steps: u64) -> Result<Segment, SegmentError> {
    if n.is_one() {
        return Err(SegmentError::Undefined);
    }
    let mut term = n.clone();
    let mut max = n.clone();
    let mut order = 0u64;
    loop {
        if order >= max_steps {
            return Err(SegmentError::Budget(max_steps));
        }
        term.step();
        order += 1;
        if &term < n {
            return Ok(Segment {
                order,
                pst: term,
                max,
            });
        }
        if term > max {
            max = term.clone();
        }
    }
}

pub(crate) fn tso_term(mut term: Term, max_steps: u64) -> Option<u64> {
    let mut steps = 0u64;
    while !term.is_one() {
        if steps >= max_steps {
            return None;
        }
        term.step();
        steps += 1;
    }
    Some(steps)
}

/// Convenience wrapper for machine-sized inputs; returns `(order, pst)`.
pub fn pso_u64(n: u64, max_steps: u64) -> Result<(u64, BigUint), NumericError> {
    let p = pso(&BigUint::from(n), max_steps)?;
    Ok((p.order, p.pst))
}

/// Convenience wrapper for machine-sized inputs.
pub fn tso_u64(n: u64, max_steps: u64) -> Result<u64, NumericError> {
    tso(&BigUint::from(n), max_steps)
}

/// `Col^k(n)`, failing only on a zero start.
pub fn iterate(n: &BigUint, k: u64) -> Result<BigUint, NumericError> {
    let mut term = start(n)?;
    for _ in 0..k {
        term.step();
    }
    Ok(term.to_biguint())
}

fn start(n: &BigUint) -> Result<Term, NumericError> {
    if n.is_zero() {
        Err(NumericError::ZeroStart)
    } else {
        Ok(Term::from_biguint(n))
    }
}

fn budget(n: &BigUint, steps: u64) -> NumericError {
    NumericError::BudgetExceeded {
        n: n.clone(),
        steps,
    }
}
