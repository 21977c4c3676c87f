use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::decimal::{exact_decimal, quarter_power_form};
use super::{Metadata, ReportDocument, Tabular};
use crate::sieve::{NodeStatus, SieveResult};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageRow {
    pub stage: String,
    /// `leaf`, `classified` or `residual`.
    pub kind: String,
    /// Leaf class; empty on total rows.
    pub class: String,
    pub pso: Option<u64>,
    pub leaves: usize,
    /// Exact density among all naturals, as `a/b`.
    pub density: String,
    /// Exact percentage in decimal.
    pub percent: String,
    /// Percentage written as `c*(25/2^k)`.
    pub form: String,
}

impl Tabular for CoverageRow {
    fn header() -> &'static [&'static str] {
        &[
            "stage", "kind", "class", "pso", "leaves", "density", "percent", "form",
        ]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.stage.clone(),
            self.kind.clone(),
            self.class.clone(),
            self.pso.map_or_else(String::new, |p| p.to_string()),
            self.leaves.to_string(),
            self.density.clone(),
            self.percent.clone(),
            self.form.clone(),
        ]
    }
}

fn row(
    stage: &str,
    kind: &str,
    class: String,
    pso: Option<u64>,
    leaves: usize,
    density: &BigRational,
) -> CoverageRow {
    let percent = density * BigRational::from_integer(BigInt::from(100));
    CoverageRow {
        stage: stage.to_string(),
        kind: kind.to_string(),
        class,
        pso,
        leaves,
        density: format!("{}/{}", density.numer(), density.denom()),
        // Leaf densities are dyadic, so both always terminate.
        percent: exact_decimal(&percent).unwrap_or_default(),
        form: quarter_power_form(&percent).unwrap_or_default(),
    }
}

/// Ledger of how much of the naturals each terminal leaf accounts for.
///
/// A stage may combine several sieve runs (for example one per quartet);
/// each run is scaled by the density of its root class. Every stage ends
/// with a classified total and the unclassified residual of its roots.
pub fn coverage_report(stages: &[(&str, &[SieveResult])]) -> ReportDocument<CoverageRow> {
    let mut rows = Vec::new();
    let mut meta = Metadata::new("coverage");
    for (stage, results) in stages {
        let roots: Vec<String> = results.iter().map(|r| r.root.to_string()).collect();
        meta = meta.param(&format!("{stage}.roots"), roots.join(" "));
        if let Some(first) = results.first() {
            meta = meta.param(&format!("{stage}.budget"), &first.budget);
        }
        let mut classified = BigRational::zero();
        let mut residual = BigRational::zero();
        let (mut classified_leaves, mut open_leaves) = (0, 0);
        for result in *results {
            let base = BigRational::new(BigInt::one(), result.root.modulus().clone().into());
            for leaf in result.leaves() {
                let density = &base * result.relative_density(leaf);
                match leaf.status {
                    NodeStatus::Terminal { pso } => {
                        rows.push(row(
                            stage,
                            "leaf",
                            leaf.class.to_string(),
                            Some(pso),
                            1,
                            &density,
                        ));
                        classified += density;
                        classified_leaves += 1;
                    }
                    _ => {
                        residual += density;
                        open_leaves += 1;
                    }
                }
            }
        }
        rows.push(row(
            stage,
            "classified",
            String::new(),
            None,
            classified_leaves,
            &classified,
        ));
        rows.push(row(
            stage,
            "residual",
            String::new(),
            None,
            open_leaves,
            &residual,
        ));
    }
    ReportDocument::new(meta, rows)
}
