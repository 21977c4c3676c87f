//! FIFO exploration ("combing") of a residue class.
//!
//! Each queued class is stepped symbolically until its term drops below the
//! start for every member (a terminal leaf), its parity depends on the class
//! variable (the class is split, even half queued first), or a budget runs
//! out (an exhausted leaf). Leaves always partition the root class.

mod check;
mod coverage;
mod similarity;

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::affine::{
    check_terminal, split, AffineTerm, BranchParity, Parity, ResidueClass, TerminalStatus,
};
use crate::numeric::{self, NumericError};

pub use check::{leaf_cross_check, CrossCheckReport, Mismatch};
pub use coverage::{coverage, CoverageLedger};
pub use similarity::{subtree_similarity, LevelProfile, SimilarityReport};

/// Largest exceptional range `0..=x*` that is resolved member by member.
pub const EXCEPTION_SCAN_LIMIT: u64 = 4096;

#[derive(Debug, Error)]
pub enum SieveError {
    #[error(
        "sieve budgets must be positive (max_steps = {max_steps}, max_modulus = {max_modulus})"
    )]
    InvalidBudget {
        max_steps: u64,
        max_modulus: BigUint,
    },
    #[error("cross-check mismatch: {0}")]
    MismatchFound(Box<Mismatch>),
    #[error("results were explored with different budgets ({a} vs {b})")]
    BudgetMismatch { a: String, b: String },
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveBudget {
    /// Largest step index a class may reach.
    pub max_steps: u64,
    /// Largest modulus a split may produce.
    pub max_modulus: BigUint,
}

impl SieveBudget {
    pub fn new(max_steps: u64, max_modulus: impl Into<BigUint>) -> Self {
        SieveBudget {
            max_steps,
            max_modulus: max_modulus.into(),
        }
    }
}

impl std::fmt::Display for SieveBudget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "steps<={}, modulus<={}",
            self.max_steps, self.max_modulus
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExhaustReason {
    Steps,
    Modulus,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NodeStatus {
    /// Interior node; see `children`.
    Split,
    Terminal {
        pso: u64,
    },
    EventuallyTerminal {
        pso: u64,
        threshold: BigUint,
    },
    Exhausted(ExhaustReason),
}

impl NodeStatus {
    pub fn is_leaf(&self) -> bool {
        !matches!(self, NodeStatus::Split)
    }

    pub fn pso(&self) -> Option<u64> {
        match self {
            NodeStatus::Terminal { pso } | NodeStatus::EventuallyTerminal { pso, .. } => Some(*pso),
            _ => None,
        }
    }
}

/// What the numeric engine said about a member excluded from the symbolic claim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpecialOutcome {
    /// `n = 0`, only possible for remainder 0 at `x = 0`.
    NotNatural,
    /// `n = 1`.
    PsoUndefined,
    Pso(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialMember {
    pub x: BigUint,
    pub n: BigUint,
    pub outcome: SpecialOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveNode {
    pub id: usize,
    pub parent: Option<usize>,
    /// Substitution that created this node from its parent.
    pub branch: Option<BranchParity>,
    pub class: ResidueClass,
    pub n_form: AffineTerm,
    /// Term at the point the node was split or became a leaf.
    pub term: AffineTerm,
    pub step: u64,
    pub status: NodeStatus,
    pub children: Vec<usize>,
    /// Members checked numerically instead of symbolically.
    pub special: Vec<SpecialMember>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SieveStats {
    pub nodes_expanded: usize,
    pub max_modulus_reached: BigUint,
    pub terminal: usize,
    pub eventually_terminal: usize,
    pub exhausted: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveResult {
    pub root: ResidueClass,
    pub budget: SieveBudget,
    /// Nodes in creation order, which is also FIFO expansion order.
    pub nodes: Vec<SieveNode>,
    pub stats: SieveStats,
}

impl SieveResult {
    pub fn root_node(&self) -> &SieveNode {
        &self.nodes[0]
    }

    pub fn leaves(&self) -> impl Iterator<Item = &SieveNode> {
        self.nodes.iter().filter(|n| n.status.is_leaf())
    }

    pub fn terminal_leaves(&self) -> impl Iterator<Item = &SieveNode> {
        self.nodes
            .iter()
            .filter(|n| matches!(n.status, NodeStatus::Terminal { .. }))
    }

    /// Density of `leaf` relative to the root class.
    pub fn relative_density(&self, leaf: &SieveNode) -> BigRational {
        BigRational::new(
            self.root.modulus().clone().into(),
            leaf.class.modulus().clone().into(),
        )
    }

    /// Sum of relative leaf densities; exactly one for a well-formed result.
    pub fn leaf_density_sum(&self) -> BigRational {
        self.leaves()
            .map(|l| self.relative_density(l))
            .fold(BigRational::zero(), |acc, d| acc + d)
    }

    /// The leaf whose class contains `n`, if `n` is in the root class.
    pub fn leaf_for(&self, n: &BigUint) -> Option<&SieveNode> {
        if !self.root.contains(n) {
            return None;
        }
        let mut node = self.root_node();
        while !node.status.is_leaf() {
            node = node
                .children
                .iter()
                .map(|&c| &self.nodes[c])
                .find(|c| c.class.contains(n))?;
        }
        Some(node)
    }
}

/// Explore `root` breadth-first under `budget`.
pub fn sieve(root: &ResidueClass, budget: &SieveBudget) -> Result<SieveResult, SieveError> {
    if budget.max_steps == 0 || budget.max_modulus.is_zero() {
        return Err(SieveError::InvalidBudget {
            max_steps: budget.max_steps,
            max_modulus: budget.max_modulus.clone(),
        });
    }
    let n_form = root.n_form();
    let mut nodes = vec![SieveNode {
        id: 0,
        parent: None,
        branch: None,
        class: root.clone(),
        term: n_form.clone(),
        n_form,
        step: 0,
        status: NodeStatus::Split,
        children: Vec::new(),
        special: Vec::new(),
    }];
    let mut stats = SieveStats {
        max_modulus_reached: root.modulus().clone(),
        ..SieveStats::default()
    };
    let mut queue = VecDeque::from([0usize]);

    while let Some(id) = queue.pop_front() {
        stats.nodes_expanded += 1;
        let node = &mut nodes[id];
        let mut term = node.term.clone();
        let mut step = node.step;
        let outcome = loop {
            if term.parity() == Parity::Undetermined {
                if step >= budget.max_steps {
                    break Outcome::Leaf(NodeStatus::Exhausted(ExhaustReason::Steps));
                }
                if node.class.modulus() << 1u32 > budget.max_modulus {
                    break Outcome::Leaf(NodeStatus::Exhausted(ExhaustReason::Modulus));
                }
                break Outcome::Split;
            }
            if step >= budget.max_steps {
                break Outcome::Leaf(NodeStatus::Exhausted(ExhaustReason::Steps));
            }
            term = term.step().expect("parity is determined");
            step += 1;
            match check_terminal(&node.n_form, &term, step) {
                TerminalStatus::NotTerminal => {}
                TerminalStatus::Terminal { pso } => {
                    break Outcome::Leaf(NodeStatus::Terminal { pso })
                }
                TerminalStatus::EventuallyTerminal { pso, threshold } => {
                    break Outcome::Leaf(NodeStatus::EventuallyTerminal { pso, threshold })
                }
            }
        };
        node.term = term;
        node.step = step;

        match outcome {
            Outcome::Leaf(status) => {
                let (status, special) = resolve_leaf(&node.class, status)?;
                match status {
                    NodeStatus::Terminal { .. } => stats.terminal += 1,
                    NodeStatus::EventuallyTerminal { .. } => stats.eventually_terminal += 1,
                    NodeStatus::Exhausted(_) => stats.exhausted += 1,
                    NodeStatus::Split => unreachable!(),
                }
                node.status = status;
                node.special = special;
            }
            Outcome::Split => {
                node.status = NodeStatus::Split;
                let halves = split(&node.class, &node.n_form, &node.term)
                    .expect("split only on undetermined parity");
                let parent_step = node.step;
                for half in halves {
                    let child = nodes.len();
                    if half.class.modulus() > &stats.max_modulus_reached {
                        stats.max_modulus_reached = half.class.modulus().clone();
                    }
                    nodes[id].children.push(child);
                    nodes.push(SieveNode {
                        id: child,
                        parent: Some(id),
                        branch: Some(half.parity),
                        class: half.class,
                        n_form: half.n_form,
                        term: half.term,
                        step: parent_step,
                        status: NodeStatus::Split,
                        children: Vec::new(),
                        special: Vec::new(),
                    });
                    queue.push_back(child);
                }
            }
        }
    }

    Ok(SieveResult {
        root: root.clone(),
        budget: budget.clone(),
        nodes,
        stats,
    })
}

enum Outcome {
    Split,
    Leaf(NodeStatus),
}

/// Check members excluded from the symbolic claim against the numeric engine.
///
/// Tiny starts (`n` of 1 or 2) are always checked. An eventually terminal
/// class whose exceptional members `x <= x*` all either fall outside the
/// naturals, are `n = 1`, or numerically share the class order is promoted to
/// terminal.
fn resolve_leaf(
    class: &ResidueClass,
    status: NodeStatus,
) -> Result<(NodeStatus, Vec<SpecialMember>), SieveError> {
    match status {
        NodeStatus::Terminal { pso } => {
            let mut special = Vec::new();
            let r = class.remainder();
            if r.is_one() || r == &BigUint::from(2u32) {
                special.push(special_member(class, BigUint::zero())?);
            }
            Ok((NodeStatus::Terminal { pso }, special))
        }
        NodeStatus::EventuallyTerminal { pso, threshold } => {
            let Some(limit) = threshold.to_u64().filter(|&t| t <= EXCEPTION_SCAN_LIMIT) else {
                return Ok((
                    NodeStatus::EventuallyTerminal { pso, threshold },
                    Vec::new(),
                ));
            };
            let special = (0..=limit)
                .map(|x| special_member(class, BigUint::from(x)))
                .collect::<Result<Vec<_>, _>>()?;
            let agrees = special.iter().all(|m| match m.outcome {
                SpecialOutcome::NotNatural | SpecialOutcome::PsoUndefined => true,
                SpecialOutcome::Pso(k) => k == pso,
            });
            let status = if agrees {
                NodeStatus::Terminal { pso }
            } else {
                NodeStatus::EventuallyTerminal { pso, threshold }
            };
            Ok((status, special))
        }
        other => Ok((other, Vec::new())),
    }
}

fn special_member(class: &ResidueClass, x: BigUint) -> Result<SpecialMember, SieveError> {
    let n = class.member(&x);
    let outcome = if n.is_zero() {
        SpecialOutcome::NotNatural
    } else if n.is_one() {
        SpecialOutcome::PsoUndefined
    } else {
        SpecialOutcome::Pso(numeric::pso(&n, numeric::default_max_steps())?.order)
    };
    Ok(SpecialMember { x, n, outcome })
}
