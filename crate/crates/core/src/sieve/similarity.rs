use std::collections::BTreeMap;

use num_rational::BigRational;

use super::{SieveError, SieveResult};

/// Relative densities of the terminal leaves found at one PSO level, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelProfile {
    pub pso: u64,
    pub densities: Vec<BigRational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarityReport {
    pub similar: bool,
    /// Smallest PSO level at which the two profiles differ.
    pub first_divergence: Option<u64>,
    pub a: Vec<LevelProfile>,
    pub b: Vec<LevelProfile>,
}

pub fn profile(result: &SieveResult) -> Vec<LevelProfile> {
    let mut levels: BTreeMap<u64, Vec<BigRational>> = BTreeMap::new();
    for leaf in result.terminal_leaves() {
        levels
            .entry(leaf.status.pso().expect("terminal"))
            .or_default()
            .push(result.relative_density(leaf));
    }
    levels
        .into_iter()
        .map(|(pso, mut densities)| {
            densities.sort();
            LevelProfile { pso, densities }
        })
        .collect()
}

/// Compare two runs level by level on the multiset of (relative density, PSO).
pub fn subtree_similarity(
    a: &SieveResult,
    b: &SieveResult,
) -> Result<SimilarityReport, SieveError> {
    let rel = |r: &SieveResult| (r.budget.max_steps, &r.budget.max_modulus / r.root.modulus());
    if rel(a) != rel(b) {
        return Err(SieveError::BudgetMismatch {
            a: a.budget.to_string(),
            b: b.budget.to_string(),
        });
    }
    let pa = profile(a);
    let pb = profile(b);
    let as_map = |p: &[LevelProfile]| -> BTreeMap<u64, Vec<BigRational>> {
        p.iter().map(|l| (l.pso, l.densities.clone())).collect()
    };
    let (ma, mb) = (as_map(&pa), as_map(&pb));
    let first_divergence = ma
        .keys()
        .chain(mb.keys())
        .copied()
        .collect::<std::collections::BTreeSet<u64>>()
        .into_iter()
        .find(|k| ma.get(k) != mb.get(k));
    Ok(SimilarityReport {
        similar: first_divergence.is_none(),
        first_divergence,
        a: pa,
        b: pb,
    })
}
