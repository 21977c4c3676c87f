//! Range checks of classical trajectory identities.
//!
//! Every check walks its range in ascending order and stops at the first
//! counterexample, so the witness is always the smallest failing value.

use std::collections::HashSet;

use num_bigint::BigUint;
use serde::Serialize;

use crate::numeric::{self, default_max_steps, iterate, trajectory, NumericError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropertyId {
    /// `n` and `6n + 2` (odd `n`) share their first term.
    SharedPair,
    /// `8x + 4` and `8x + 5` meet at the third term with equal TSO.
    Consecutive8485,
    /// `8x` and `8x + 2` (odd `x > 1`) meet at the fourth term with equal TSO.
    EightXEightXPlus2,
    /// `TSO((3n + 1) / 2) = TSO(n) - 2` for odd `n`.
    ThirdTerm,
    /// TSO recurrences of the even quartets and `4P + 1`.
    QuartetRecurrences,
    /// No trajectory revisits a value.
    NoRepeat,
}

impl PropertyId {
    pub const ALL: [PropertyId; 6] = [
        PropertyId::SharedPair,
        PropertyId::Consecutive8485,
        PropertyId::EightXEightXPlus2,
        PropertyId::ThirdTerm,
        PropertyId::QuartetRecurrences,
        PropertyId::NoRepeat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropertyId::SharedPair => "shared-pair",
            PropertyId::Consecutive8485 => "consecutive-84-85",
            PropertyId::EightXEightXPlus2 => "8x-8x2",
            PropertyId::ThirdTerm => "third-term",
            PropertyId::QuartetRecurrences => "quartet-recurrences",
            PropertyId::NoRepeat => "no-repeat",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    /// Run this check up to `limit`.
    pub fn check(self, limit: u64) -> Result<PropertyReport, NumericError> {
        match self {
            PropertyId::SharedPair => check_shared_pair(limit),
            PropertyId::Consecutive8485 => check_consecutive_84_85(limit),
            PropertyId::EightXEightXPlus2 => check_8x_8x2(limit),
            PropertyId::ThirdTerm => check_third_term(limit),
            PropertyId::QuartetRecurrences => check_quartet_recurrences(limit),
            PropertyId::NoRepeat => check_no_repeat(limit),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub n: u64,
    pub details: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub property: PropertyId,
    pub lo: u64,
    pub hi: u64,
    pub passed: bool,
    pub witness: Option<Witness>,
    pub checked: u64,
    /// Values in range skipped as special cases.
    pub vacuous: u64,
}

struct Audit {
    report: PropertyReport,
}

impl Audit {
    fn new(property: PropertyId, lo: u64, hi: u64) -> Self {
        Audit {
            report: PropertyReport {
                property,
                lo,
                hi,
                passed: true,
                witness: None,
                checked: 0,
                vacuous: 0,
            },
        }
    }

    /// Record one case; returns `false` once a counterexample is found.
    fn case(&mut self, n: u64, failure: Option<String>) -> bool {
        self.report.checked += 1;
        if let Some(details) = failure {
            self.report.passed = false;
            self.report.witness = Some(Witness { n, details });
            return false;
        }
        true
    }

    fn finish(self) -> PropertyReport {
        self.report
    }
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn tso(n: u64) -> Result<u64, NumericError> {
    numeric::tso(&big(n), default_max_steps())
}

/// `Col(n) = Col(6n + 2)` for odd `n <= limit`, so the two trajectories coincide.
pub fn check_shared_pair(limit: u64) -> Result<PropertyReport, NumericError> {
    let mut audit = Audit::new(PropertyId::SharedPair, 1, limit);
    let budget = default_max_steps();
    for n1 in (1..=limit).step_by(2) {
        let n2 = 6 * n1 + 2;
        let (a, b) = (iterate(&big(n1), 1)?, iterate(&big(n2), 1)?);
        let failure = if a != b {
            Some(format!("Col({n1}) = {a} but Col({n2}) = {b}"))
        } else if n1 > 1 && trajectory(&big(n1), budget)? != trajectory(&big(n2), budget)? {
            Some(format!("trajectories of {n1} and {n2} differ"))
        } else {
            None
        };
        if !audit.case(n1, failure) {
            break;
        }
    }
    Ok(audit.finish())
}

/// For `1 <= x <= limit`: `Col^3(8x+4) = Col^3(8x+5) = 6x+4` and equal TSO.
pub fn check_consecutive_84_85(limit: u64) -> Result<PropertyReport, NumericError> {
    let mut audit = Audit::new(PropertyId::Consecutive8485, 0, limit);
    audit.report.vacuous = 1; // x = 0
    for x in 1..=limit {
        let (a, b) = (8 * x + 4, 8 * x + 5);
        let (ta, tb) = (iterate(&big(a), 3)?, iterate(&big(b), 3)?);
        let meet = big(6 * x + 4);
        let failure = if ta != meet || tb != meet {
            Some(format!(
                "Col^3({a}) = {ta}, Col^3({b}) = {tb}, expected {meet}"
            ))
        } else {
            let (sa, sb) = (tso(a)?, tso(b)?);
            (sa != sb).then(|| format!("TSO({a}) = {sa} but TSO({b}) = {sb}"))
        };
        if !audit.case(x, failure) {
            break;
        }
    }
    Ok(audit.finish())
}

/// For odd `3 <= x <= limit`: `Col^4(8x) = Col^4(8x+2) = 3x+1` and equal TSO.
pub fn check_8x_8x2(limit: u64) -> Result<PropertyReport, NumericError> {
    let mut audit = Audit::new(PropertyId::EightXEightXPlus2, 1, limit);
    audit.report.vacuous = u64::from(limit >= 1); // x = 1
    for x in (3..=limit).step_by(2) {
        let (a, b) = (8 * x, 8 * x + 2);
        let (ta, tb) = (iterate(&big(a), 4)?, iterate(&big(b), 4)?);
        let meet = big(3 * x + 1);
        let failure = if ta != meet || tb != meet {
            Some(format!(
                "Col^4({a}) = {ta}, Col^4({b}) = {tb}, expected {meet}"
            ))
        } else {
            let (sa, sb) = (tso(a)?, tso(b)?);
            (sa != sb).then(|| format!("TSO({a}) = {sa} but TSO({b}) = {sb}"))
        };
        if !audit.case(x, failure) {
            break;
        }
    }
    Ok(audit.finish())
}

/// For odd `3 <= n <= limit`: `TSO((3n+1)/2) = TSO(n) - 2`.
pub fn check_third_term(limit: u64) -> Result<PropertyReport, NumericError> {
    let mut audit = Audit::new(PropertyId::ThirdTerm, 3, limit);
    for n in (3..=limit).step_by(2) {
        let n2 = (3 * n).div_ceil(2);
        let (t1, t2) = (tso(n)?, tso(n2)?);
        let failure = (t2 + 2 != t1).then(|| format!("TSO({n}) = {t1} but TSO({n2}) = {t2}"));
        if !audit.case(n, failure) {
            break;
        }
    }
    Ok(audit.finish())
}

/// For `1 <= P <= limit`: `TSO(4P) = 2 + TSO(P)`, `TSO(4P+2) = 1 + TSO(2P+1)`,
/// `TSO(4P+1) = 3 + TSO(3P+1)`, with `TSO(1) = 0`.
pub fn check_quartet_recurrences(limit: u64) -> Result<PropertyReport, NumericError> {
    let mut audit = Audit::new(PropertyId::QuartetRecurrences, 1, limit);
    for p in 1..=limit {
        let checks = [
            (4 * p, 2, p),
            (4 * p + 2, 1, 2 * p + 1),
            (4 * p + 1, 3, 3 * p + 1),
        ];
        let mut failure = None;
        for (n, offset, base) in checks {
            let (tn, tb) = (tso(n)?, tso(base)?);
            if tn != offset + tb {
                failure = Some(format!(
                    "TSO({n}) = {tn} but {offset} + TSO({base}) = {}",
                    offset + tb
                ));
                break;
            }
        }
        if !audit.case(p, failure) {
            break;
        }
    }
    Ok(audit.finish())
}

/// For `2 <= n <= limit`: `{n} ∪ trajectory(n)` has no repeated value.
pub fn check_no_repeat(limit: u64) -> Result<PropertyReport, NumericError> {
    let mut audit = Audit::new(PropertyId::NoRepeat, 2, limit);
    for n in 2..=limit {
        let distinct = distinct_values(n)?;
        let len = trajectory(&big(n), default_max_steps())?.len() + 1;
        let failure =
            (distinct != len).then(|| format!("{len} values but only {distinct} distinct"));
        if !audit.case(n, failure) {
            break;
        }
    }
    Ok(audit.finish())
}

/// Number of distinct values in `{n} ∪ trajectory(n)`.
pub fn distinct_values(n: u64) -> Result<usize, NumericError> {
    let traj = trajectory(&big(n), default_max_steps())?;
    let mut seen: HashSet<BigUint> = traj.into_iter().collect();
    seen.insert(big(n));
    Ok(seen.len())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LongTrajectory {
    pub n: u64,
    pub tso: u64,
}

/// The `k` largest TSO values in `1..=limit`, ties broken by smaller `n`.
pub fn top_tso(limit: u64, k: usize) -> Result<Vec<LongTrajectory>, NumericError> {
    let mut all = (1..=limit)
        .map(|n| Ok(LongTrajectory { n, tso: tso(n)? }))
        .collect::<Result<Vec<_>, NumericError>>()?;
    all.sort_by(|a, b| b.tso.cmp(&a.tso).then(a.n.cmp(&b.n)));
    all.truncate(k);
    Ok(all)
}
