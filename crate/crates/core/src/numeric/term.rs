use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

const SMALL_ODD_LIMIT: u128 = (u128::MAX - 1) / 3;

/// A trajectory value. `Big` only ever holds values above `u128::MAX`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Term {
    Small(u128),
    Big(BigUint),
}

impl Term {
    pub fn from_biguint(n: &BigUint) -> Self {
        match n.to_u128() {
            Some(v) => Term::Small(v),
            None => Term::Big(n.clone()),
        }
    }

    pub fn to_biguint(&self) -> BigUint {
        match self {
            Term::Small(v) => BigUint::from(*v),
            Term::Big(b) => b.clone(),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Term::Small(1))
    }

    pub fn step(&mut self) {
        match self {
            Term::Small(v) if *v & 1 == 0 => *v >>= 1,
            Term::Small(v) if *v <= SMALL_ODD_LIMIT => *v = 3 * *v + 1,
            Term::Small(v) => *self = Term::Big(BigUint::from(*v) * 3u32 + 1u32),
            Term::Big(b) => {
                if b.bit(0) {
                    *b = &*b * 3u32 + 1u32;
                } else {
                    *b >>= 1;
                    if let Some(v) = b.to_u128() {
                        *self = Term::Small(v);
                    }
                }
            }
        }
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Term::Small(a), Term::Small(b)) => a.cmp(b),
            (Term::Small(_), Term::Big(_)) => Ordering::Less,
            (Term::Big(_), Term::Small(_)) => Ordering::Greater,
            (Term::Big(a), Term::Big(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spills_and_returns() {
        let mut t = Term::Small(u128::MAX);
        t.step();
        assert!(matches!(t, Term::Big(_)));
        assert_eq!(t.to_biguint(), BigUint::from(u128::MAX) * 3u32 + 1u32);

        let mut t = Term::from_biguint(&(BigUint::from(1u32) << 128u32));
        assert!(matches!(t, Term::Big(_)));
        t.step();
        assert_eq!(t, Term::Small(1 << 127));
    }

    #[test]
    fn ordering_across_representations() {
        let big = Term::Big(BigUint::from(u128::MAX) + 1u32);
        assert!(Term::Small(u128::MAX) < big);
        assert!(big > Term::Small(0));
    }
}
