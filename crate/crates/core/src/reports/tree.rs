use std::fmt::Write as _;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::ReportError;
use crate::affine::{AffineTerm, BranchParity, ResidueClass};
use crate::sieve::{ExhaustReason, NodeStatus, SieveResult, SpecialOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeFormat {
    Json,
    Dot,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExportStatus {
    Split,
    Terminal {
        pso: u64,
    },
    EventuallyTerminal {
        pso: u64,
        #[serde(
            serialize_with = "crate::serde_big::ser",
            deserialize_with = "crate::serde_big::de"
        )]
        threshold: BigUint,
    },
    ExhaustedSteps,
    ExhaustedModulus,
}

impl From<&NodeStatus> for ExportStatus {
    fn from(s: &NodeStatus) -> Self {
        match s {
            NodeStatus::Split => ExportStatus::Split,
            NodeStatus::Terminal { pso } => ExportStatus::Terminal { pso: *pso },
            NodeStatus::EventuallyTerminal { pso, threshold } => ExportStatus::EventuallyTerminal {
                pso: *pso,
                threshold: threshold.clone(),
            },
            NodeStatus::Exhausted(ExhaustReason::Steps) => ExportStatus::ExhaustedSteps,
            NodeStatus::Exhausted(ExhaustReason::Modulus) => ExportStatus::ExhaustedModulus,
        }
    }
}

impl ExportStatus {
    fn label(&self) -> String {
        match self {
            ExportStatus::Split => "split".into(),
            ExportStatus::Terminal { pso } => format!("terminal pso={pso}"),
            ExportStatus::EventuallyTerminal { pso, threshold } => {
                format!("eventually terminal pso={pso} x>{threshold}")
            }
            ExportStatus::ExhaustedSteps => "exhausted steps".into(),
            ExportStatus::ExhaustedModulus => "exhausted modulus".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportSpecial {
    #[serde(
        serialize_with = "crate::serde_big::ser",
        deserialize_with = "crate::serde_big::de"
    )]
    pub x: BigUint,
    #[serde(
        serialize_with = "crate::serde_big::ser",
        deserialize_with = "crate::serde_big::de"
    )]
    pub n: BigUint,
    /// PSO of `n`, or `None` when `n` is 0 or 1.
    pub pso: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub branch: Option<BranchParity>,
    pub class: ResidueClass,
    pub n_form: AffineTerm,
    pub term: AffineTerm,
    pub step: u64,
    pub status: ExportStatus,
    pub children: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub special: Vec<ExportSpecial>,
}

/// Flat, id-linked form of a sieve tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDocument {
    pub root: ResidueClass,
    pub max_steps: u64,
    #[serde(
        serialize_with = "crate::serde_big::ser",
        deserialize_with = "crate::serde_big::de"
    )]
    pub max_modulus: BigUint,
    pub nodes: Vec<ExportNode>,
}

impl TreeDocument {
    pub fn from_result(result: &SieveResult) -> Self {
        let nodes = result
            .nodes
            .iter()
            .map(|n| ExportNode {
                id: n.id,
                parent: n.parent,
                branch: n.branch,
                class: n.class.clone(),
                n_form: n.n_form.clone(),
                term: n.term.clone(),
                step: n.step,
                status: (&n.status).into(),
                children: n.children.clone(),
                special: n
                    .special
                    .iter()
                    .map(|s| ExportSpecial {
                        x: s.x.clone(),
                        n: s.n.clone(),
                        pso: match s.outcome {
                            SpecialOutcome::Pso(k) => Some(k),
                            _ => None,
                        },
                    })
                    .collect(),
            })
            .collect();
        TreeDocument {
            root: result.root.clone(),
            max_steps: result.budget.max_steps,
            max_modulus: result.budget.max_modulus.clone(),
            nodes,
        }
    }

    pub fn to_json(&self) -> Result<String, ReportError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self, ReportError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_dot(&self) -> String {
        let mut out =
            String::from("digraph sieve {\n  node [shape=box, fontname=\"monospace\"];\n");
        for n in &self.nodes {
            let label = format!("{}\\nstep={}\\n[{}]", n.class, n.step, n.status.label());
            let _ = writeln!(out, "  n{} [label=\"{}\"];", n.id, label);
        }
        for n in &self.nodes {
            for &c in &n.children {
                let branch = self.nodes[c]
                    .branch
                    .map_or_else(String::new, |b| b.to_string());
                let _ = writeln!(out, "  n{} -> n{} [label=\"{}\"];", n.id, c, branch);
            }
        }
        out.push_str("}\n");
        out
    }
}

pub fn export_tree(result: &SieveResult, format: TreeFormat) -> Result<String, ReportError> {
    let doc = TreeDocument::from_result(result);
    match format {
        TreeFormat::Json => doc.to_json(),
        TreeFormat::Dot => Ok(doc.to_dot()),
    }
}
