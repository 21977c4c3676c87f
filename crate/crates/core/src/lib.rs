//! Collatz stopping data, computed two ways.
//!
//! [`numeric`] walks individual trajectories exactly. [`affine`] and
//! [`sieve`] reason about whole residue classes `{M·x + R}` at once by
//! stepping an affine form of the class variable and splitting the class
//! whenever the parity of the current term depends on `x`. [`properties`]
//! audits classical identities over ranges, and [`reports`] renders tables,
//! coverage ledgers and tree exports.

pub mod affine;
pub mod numeric;
pub mod properties;
pub mod reports;
pub mod sieve;

mod serde_big;

pub use affine::{AffineError, AffineTerm, BranchParity, Parity, ResidueClass, TerminalStatus};
pub use numeric::{NumericError, Pso, SequenceSummary, VerifyReport};
pub use sieve::{SieveBudget, SieveError, SieveResult};
