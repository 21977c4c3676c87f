use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use super::SieveResult;

/// Exact density accounting over the terminal leaves of one sieve run.
///
/// `terminal + residual == base` always holds; with a base density of one
/// the residual is the unclassified fraction of the root class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageLedger {
    pub base: BigRational,
    pub by_pso: BTreeMap<u64, BigRational>,
    pub leaves_by_pso: BTreeMap<u64, usize>,
    pub terminal: BigRational,
    pub residual: BigRational,
}

pub fn coverage(result: &SieveResult, base_density: &BigRational) -> CoverageLedger {
    let mut by_pso: BTreeMap<u64, BigRational> = BTreeMap::new();
    let mut leaves_by_pso: BTreeMap<u64, usize> = BTreeMap::new();
    for leaf in result.terminal_leaves() {
        let pso = leaf.status.pso().expect("terminal leaves carry a PSO");
        let share = base_density * result.relative_density(leaf);
        *by_pso.entry(pso).or_insert_with(BigRational::zero) += share;
        *leaves_by_pso.entry(pso).or_default() += 1;
    }
    let terminal = by_pso.values().fold(BigRational::zero(), |acc, d| acc + d);
    CoverageLedger {
        base: base_density.clone(),
        residual: base_density - &terminal,
        by_pso,
        leaves_by_pso,
        terminal,
    }
}
