use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

use super::{NodeStatus, SieveError, SieveResult};
use crate::affine::ResidueClass;
use crate::numeric::{self, default_max_steps};

/// A member whose numeric order disagrees with its leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub class: ResidueClass,
    pub x: BigUint,
    pub n: BigUint,
    pub expected: u64,
    pub actual: u64,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at x={} (n={}): leaf says PSO {}, numeric PSO is {}",
            self.class, self.x, self.n, self.expected, self.actual
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CrossCheckReport {
    pub leaves_checked: usize,
    pub members_checked: usize,
    /// Members `x <= x*` of eventually terminal leaves that were walked individually.
    pub exceptional_verified: usize,
}

/// Compare every resolved leaf against the numeric engine on its first
/// `samples_per_leaf` members with `n >= 3`.
pub fn leaf_cross_check(
    result: &SieveResult,
    samples_per_leaf: usize,
) -> Result<CrossCheckReport, SieveError> {
    let max_steps = default_max_steps();
    let mut report = CrossCheckReport::default();
    let three = BigUint::from(3u32);

    for leaf in result.leaves() {
        let (expected, first_x) = match &leaf.status {
            NodeStatus::Terminal { pso } => (*pso, BigUint::ZERO),
            NodeStatus::EventuallyTerminal { pso, threshold } => {
                let mut x = BigUint::ZERO;
                let mut walked = 0;
                while &x <= threshold && walked < samples_per_leaf {
                    let n = leaf.class.member(&x);
                    if n >= BigUint::from(2u32) {
                        numeric::pso(&n, max_steps)?;
                        report.exceptional_verified += 1;
                    }
                    walked += 1;
                    x += 1u32;
                }
                (*pso, threshold + BigUint::one())
            }
            _ => continue,
        };
        report.leaves_checked += 1;

        let mut x = first_x;
        let mut taken = 0;
        while taken < samples_per_leaf {
            let n = leaf.class.member(&x);
            if n >= three {
                let actual = numeric::pso(&n, max_steps)?.order;
                if actual != expected {
                    return Err(SieveError::MismatchFound(Box::new(Mismatch {
                        class: leaf.class.clone(),
                        x,
                        n,
                        expected,
                        actual,
                    })));
                }
                taken += 1;
                report.members_checked += 1;
            }
            x += 1u32;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::{sieve, SieveBudget};

    fn brute_pso(n: u64) -> u64 {
        let mut m = n;
        let mut k = 0;
        loop {
            m = if m % 2 == 1 { 3 * m + 1 } else { m / 2 };
            k += 1;
            if m < n {
                return k;
            }
        }
    }

    #[test]
    fn frozen_member_orders() {
        for n in [3u64, 19, 35, 51, 67] {
            assert_eq!(brute_pso(n), 6);
        }
        for n in [23u64, 55, 87, 119] {
            assert_eq!(brute_pso(n), 8);
        }
        assert_eq!(brute_pso(5), 3);
    }

    #[test]
    fn octet_leaves_pass() {
        let r = sieve(
            &ResidueClass::new(4u32, 3u32).unwrap(),
            &SieveBudget::new(13, 4096u32),
        )
        .unwrap();
        let report = leaf_cross_check(&r, 5).unwrap();
        assert_eq!(report.leaves_checked, r.terminal_leaves().count());
        assert_eq!(report.members_checked, 5 * report.leaves_checked);
    }

    #[test]
    fn quartet_leaf_skips_n_one() {
        let r = sieve(
            &ResidueClass::new(4u32, 1u32).unwrap(),
            &SieveBudget::new(10, 4u32),
        )
        .unwrap();
        let report = leaf_cross_check(&r, 1).unwrap();
        assert_eq!(report.members_checked, 1);
    }

    #[test]
    fn tampered_leaf_is_reported() {
        let mut r = sieve(
            &ResidueClass::new(4u32, 3u32).unwrap(),
            &SieveBudget::new(8, 64u32),
        )
        .unwrap();
        let leaf = r
            .nodes
            .iter_mut()
            .find(|n| n.class == ResidueClass::new(32u32, 23u32).unwrap())
            .unwrap();
        leaf.status = NodeStatus::Terminal { pso: 9 };
        let Err(SieveError::MismatchFound(m)) = leaf_cross_check(&r, 4) else {
            panic!("expected a mismatch");
        };
        assert_eq!(m.n, BigUint::from(23u32));
        assert_eq!((m.expected, m.actual), (9, 8));
    }
}
