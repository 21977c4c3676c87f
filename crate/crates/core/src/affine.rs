//! Residue classes and Collatz terms as integer affine forms `U·x + V`.
//!
//! A class `{M·x + R : x >= 0}` is tracked together with the current term
//! of its trajectory written in the same variable `x`. Halving is only
//! applied when both coefficients are even, so forms stay integral; when the
//! coefficient of `x` is odd the parity of the term depends on `x` and the
//! class has to be split into `x = 2q` and `x = 2q + 1`.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AffineError {
    #[error("modulus must be a positive power of two, got {0}")]
    BadModulus(BigUint),
    #[error("remainder {remainder} is not below modulus {modulus}")]
    RemainderTooLarge {
        modulus: BigUint,
        remainder: BigUint,
    },
    #[error("affine term 0·x + 0 is not a sequence term")]
    ZeroTerm,
    #[error("parity of {0} depends on x; split the class first")]
    UndeterminedParity(AffineTerm),
}

/// `{M·x + R : x >= 0}` with `M` a power of two and `R < M`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResidueClass {
    #[serde(
        serialize_with = "crate::serde_big::ser",
        deserialize_with = "crate::serde_big::de"
    )]
    modulus: BigUint,
    #[serde(
        serialize_with = "crate::serde_big::ser",
        deserialize_with = "crate::serde_big::de"
    )]
    remainder: BigUint,
}

impl ResidueClass {
    pub fn new(
        modulus: impl Into<BigUint>,
        remainder: impl Into<BigUint>,
    ) -> Result<Self, AffineError> {
        let modulus = modulus.into();
        let remainder = remainder.into();
        if modulus.is_zero() || modulus.count_ones() != 1 {
            return Err(AffineError::BadModulus(modulus));
        }
        if remainder >= modulus {
            return Err(AffineError::RemainderTooLarge { modulus, remainder });
        }
        Ok(ResidueClass { modulus, remainder })
    }

    /// All non-negative integers.
    pub fn all() -> Self {
        ResidueClass {
            modulus: BigUint::one(),
            remainder: BigUint::zero(),
        }
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn remainder(&self) -> &BigUint {
        &self.remainder
    }

    /// `log2(M)`.
    pub fn depth(&self) -> u64 {
        self.modulus.bits() - 1
    }

    /// The member map `n(x) = M·x + R` as an affine form.
    pub fn n_form(&self) -> AffineTerm {
        AffineTerm {
            coeff: self.modulus.clone(),
            constant: self.remainder.clone(),
        }
    }

    pub fn member(&self, x: &BigUint) -> BigUint {
        &self.modulus * x + &self.remainder
    }

    pub fn contains(&self, n: &BigUint) -> bool {
        n % &self.modulus == self.remainder
    }

    /// Whether every member of `other` is a member of `self`.
    pub fn covers(&self, other: &ResidueClass) -> bool {
        other.modulus.is_multiple_of(&self.modulus) && self.contains(&other.remainder)
    }

    /// Natural density `1 / M`.
    pub fn density(&self) -> BigRational {
        BigRational::new(1.into(), self.modulus.clone().into())
    }

    /// Children for `x = 2q` and `x = 2q + 1`.
    pub fn halves(&self) -> (ResidueClass, ResidueClass) {
        let modulus = &self.modulus << 1u32;
        let odd = &self.modulus + &self.remainder;
        (
            ResidueClass {
                modulus: modulus.clone(),
                remainder: self.remainder.clone(),
            },
            ResidueClass {
                modulus,
                remainder: odd,
            },
        )
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}x+{}", self.modulus, self.remainder)
    }
}

/// `U·x + V` with non-negative integer coefficients, not both zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineTerm {
    #[serde(
        serialize_with = "crate::serde_big::ser",
        deserialize_with = "crate::serde_big::de"
    )]
    coeff: BigUint,
    #[serde(
        serialize_with = "crate::serde_big::ser",
        deserialize_with = "crate::serde_big::de"
    )]
    constant: BigUint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
    Undetermined,
}

/// Which substitution produced a child class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchParity {
    /// `x = 2q`
    Even,
    /// `x = 2q + 1`
    Odd,
}

impl fmt::Display for BranchParity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BranchParity::Even => "even",
            BranchParity::Odd => "odd",
        })
    }
}

impl AffineTerm {
    pub fn new(
        coeff: impl Into<BigUint>,
        constant: impl Into<BigUint>,
    ) -> Result<Self, AffineError> {
        let coeff = coeff.into();
        let constant = constant.into();
        if coeff.is_zero() && constant.is_zero() {
            return Err(AffineError::ZeroTerm);
        }
        Ok(AffineTerm { coeff, constant })
    }

    /// `U`
    pub fn coeff(&self) -> &BigUint {
        &self.coeff
    }

    /// `V`
    pub fn constant(&self) -> &BigUint {
        &self.constant
    }

    pub fn parity(&self) -> Parity {
        match (self.coeff.bit(0), self.constant.bit(0)) {
            (true, _) => Parity::Undetermined,
            (false, false) => Parity::Even,
            (false, true) => Parity::Odd,
        }
    }

    /// Apply the Collatz function symbolically.
    pub fn step(&self) -> Result<AffineTerm, AffineError> {
        match self.parity() {
            Parity::Even => Ok(AffineTerm {
                coeff: &self.coeff >> 1u32,
                constant: &self.constant >> 1u32,
            }),
            Parity::Odd => Ok(AffineTerm {
                coeff: &self.coeff * 3u32,
                constant: &self.constant * 3u32 + 1u32,
            }),
            Parity::Undetermined => Err(AffineError::UndeterminedParity(self.clone())),
        }
    }

    pub fn evaluate(&self, x: &BigUint) -> BigUint {
        &self.coeff * x + &self.constant
    }

    /// Rewrite for `x = 2q + offset` as a form in `q`.
    fn substitute(&self, branch: BranchParity) -> AffineTerm {
        let coeff = &self.coeff << 1u32;
        let constant = match branch {
            BranchParity::Even => self.constant.clone(),
            BranchParity::Odd => &self.coeff + &self.constant,
        };
        AffineTerm { coeff, constant }
    }
}

impl fmt::Display for AffineTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}x+{})", self.coeff, self.constant)
    }
}

/// One half of a split: the class, its member form and the current term,
/// all in the new variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitBranch {
    pub parity: BranchParity,
    pub class: ResidueClass,
    pub n_form: AffineTerm,
    pub term: AffineTerm,
}

/// Split on the parity of `x`. The even branch comes first.
pub fn split(
    class: &ResidueClass,
    n_form: &AffineTerm,
    term: &AffineTerm,
) -> Result<[SplitBranch; 2], AffineError> {
    if term.parity() != Parity::Undetermined {
        return Err(AffineError::UndeterminedParity(term.clone()));
    }
    let (even, odd) = class.halves();
    Ok([
        SplitBranch {
            parity: BranchParity::Even,
            class: even,
            n_form: n_form.substitute(BranchParity::Even),
            term: term.substitute(BranchParity::Even),
        },
        SplitBranch {
            parity: BranchParity::Odd,
            class: odd,
            n_form: n_form.substitute(BranchParity::Odd),
            term: term.substitute(BranchParity::Odd),
        },
    ])
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TerminalStatus {
    NotTerminal,
    /// Term is below the start for every `x >= 0`.
    Terminal {
        pso: u64,
    },
    /// Term is below the start for every `x > threshold`.
    EventuallyTerminal {
        pso: u64,
        threshold: BigUint,
    },
}

/// Compare the term `U·x + V` against the start `Nc·x + Nr`.
pub fn check_terminal(n_form: &AffineTerm, term: &AffineTerm, step_index: u64) -> TerminalStatus {
    let (nc, nr) = (&n_form.coeff, &n_form.constant);
    let (u, v) = (&term.coeff, &term.constant);
    if u <= nc && v < nr {
        TerminalStatus::Terminal { pso: step_index }
    } else if u < nc && v >= nr {
        TerminalStatus::EventuallyTerminal {
            pso: step_index,
            threshold: (v - nr) / (nc - u),
        }
    } else {
        TerminalStatus::NotTerminal
    }
}
