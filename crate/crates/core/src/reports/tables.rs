use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::{Metadata, ReportDocument, ReportError, Tabular};
use crate::affine::ResidueClass;
use crate::numeric::{self, default_max_steps, NumericError};
use crate::sieve::SieveResult;

// Display conventions for n = 1: the table shows the walk into the 4-2-1
// cycle (three steps) and marks PSO as not applicable.
const ONE_DISPLAY_TSO: u64 = 3;
const ONE_DISPLAY_TRAJECTORY: &str = "4, 2, 1";

fn ser_pso<S: Serializer>(v: &Option<u64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(k) => s.serialize_u64(*k),
        None => s.serialize_str("NA"),
    }
}

fn pso_cell(v: Option<u64>) -> String {
    v.map_or_else(|| "NA".to_string(), |k| k.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SummaryRow {
    pub n: u64,
    #[serde(serialize_with = "ser_pso")]
    pub pso: Option<u64>,
    pub tso: u64,
}

impl Tabular for SummaryRow {
    fn header() -> &'static [&'static str] {
        &["n", "pso", "tso"]
    }

    fn record(&self) -> Vec<String> {
        vec![self.n.to_string(), pso_cell(self.pso), self.tso.to_string()]
    }
}

/// `(n, PSO, TSO)` for every `n` in `lo..=hi`.
pub fn table_summary(lo: u64, hi: u64) -> Result<ReportDocument<SummaryRow>, NumericError> {
    if lo == 0 || hi < lo {
        return Err(NumericError::InvalidRange { lo, hi });
    }
    let budget = default_max_steps();
    let rows = (lo..=hi)
        .map(|n| {
            if n == 1 {
                return Ok(SummaryRow {
                    n,
                    pso: None,
                    tso: ONE_DISPLAY_TSO,
                });
            }
            let big = BigUint::from(n);
            Ok(SummaryRow {
                n,
                pso: Some(numeric::pso(&big, budget)?.order),
                tso: numeric::tso(&big, budget)?,
            })
        })
        .collect::<Result<Vec<_>, NumericError>>()?;
    let meta = Metadata::new("summary").param("lo", lo).param("hi", hi);
    Ok(ReportDocument::new(meta, rows))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrajectoryRow {
    pub n: u64,
    pub parity: &'static str,
    pub trajectory: String,
    pub tso: u64,
}

impl Tabular for TrajectoryRow {
    fn header() -> &'static [&'static str] {
        &["n", "type", "trajectory", "tso"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.parity.to_string(),
            self.trajectory.clone(),
            self.tso.to_string(),
        ]
    }
}

/// Full trajectories for `n` in `lo..=hi`.
pub fn trajectory_table(lo: u64, hi: u64) -> Result<ReportDocument<TrajectoryRow>, NumericError> {
    if lo == 0 || hi < lo {
        return Err(NumericError::InvalidRange { lo, hi });
    }
    let budget = default_max_steps();
    let rows = (lo..=hi)
        .map(|n| {
            let parity = if n % 2 == 0 { "Even" } else { "Odd" };
            if n == 1 {
                return Ok(TrajectoryRow {
                    n,
                    parity,
                    trajectory: ONE_DISPLAY_TRAJECTORY.to_string(),
                    tso: ONE_DISPLAY_TSO,
                });
            }
            let terms = numeric::trajectory(&BigUint::from(n), budget)?;
            Ok(TrajectoryRow {
                n,
                parity,
                tso: terms.len() as u64,
                trajectory: terms
                    .iter()
                    .map(|t| t.to_string())
                    .collect::<Vec<_>>()
                    .join(", "),
            })
        })
        .collect::<Result<Vec<_>, NumericError>>()?;
    let meta = Metadata::new("trajectories")
        .param("lo", lo)
        .param("hi", hi);
    Ok(ReportDocument::new(meta, rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityFilter {
    Even,
    Odd,
    All,
}

impl ParityFilter {
    fn admits(self, x: u64) -> bool {
        match self {
            ParityFilter::Even => x.is_multiple_of(2),
            ParityFilter::Odd => x % 2 == 1,
            ParityFilter::All => true,
        }
    }
}

impl std::str::FromStr for ParityFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "even" => Ok(ParityFilter::Even),
            "odd" => Ok(ParityFilter::Odd),
            "all" => Ok(ParityFilter::All),
            other => Err(format!("unknown parity filter {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HistogramRow {
    pub pso: u64,
    pub count: u64,
    pub x_first: u64,
    pub x_last: u64,
}

impl Tabular for HistogramRow {
    fn header() -> &'static [&'static str] {
        &["pso", "count", "x_first", "x_last"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.pso.to_string(),
            self.count.to_string(),
            self.x_first.to_string(),
            self.x_last.to_string(),
        ]
    }
}

/// Member counts per PSO value over an `x` range of one class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub class: ResidueClass,
    pub x_lo: u64,
    pub x_hi: u64,
    pub filter: ParityFilter,
    pub rows: Vec<HistogramRow>,
    /// Members for which PSO is not defined (`n` of 0 or 1).
    pub undefined: u64,
    /// Number of `x` values processed.
    pub total: u64,
}

impl Histogram {
    pub fn counts(&self) -> BTreeMap<u64, u64> {
        self.rows.iter().map(|r| (r.pso, r.count)).collect()
    }

    pub fn to_document(&self) -> ReportDocument<HistogramRow> {
        let meta = Metadata::new("histogram")
            .param("class", &self.class)
            .param("x_lo", self.x_lo)
            .param("x_hi", self.x_hi)
            .param("parity", format!("{:?}", self.filter).to_lowercase())
            .param("total", self.total)
            .param("undefined", self.undefined);
        ReportDocument::new(meta, self.rows.clone())
    }
}

pub fn pso_histogram(
    class: &ResidueClass,
    x_lo: u64,
    x_hi: u64,
    filter: ParityFilter,
) -> Result<Histogram, NumericError> {
    let budget = default_max_steps();
    let mut tally: BTreeMap<u64, HistogramRow> = BTreeMap::new();
    let mut undefined = 0;
    let mut total = 0;
    if x_lo <= x_hi {
        for x in (x_lo..=x_hi).filter(|&x| filter.admits(x)) {
            total += 1;
            let n = class.member(&BigUint::from(x));
            if n.is_zero() || n.is_one() {
                undefined += 1;
                continue;
            }
            let pso = numeric::pso(&n, budget)?.order;
            tally
                .entry(pso)
                .and_modify(|r| {
                    r.count += 1;
                    r.x_last = x;
                })
                .or_insert(HistogramRow {
                    pso,
                    count: 1,
                    x_first: x,
                    x_last: x,
                });
        }
    }
    Ok(Histogram {
        class: class.clone(),
        x_lo,
        x_hi,
        filter,
        rows: tally.into_values().collect(),
        undefined,
        total,
    })
}

/// Number of terminal leaves per PSO value.
pub fn leaf_counts(result: &SieveResult) -> BTreeMap<u64, u64> {
    let mut out = BTreeMap::new();
    for leaf in result.terminal_leaves() {
        *out.entry(leaf.status.pso().expect("terminal")).or_insert(0) += 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonRow {
    pub pso: u64,
    pub computed: Option<u64>,
    pub reference: Option<u64>,
    pub agree: bool,
}

impl Tabular for ComparisonRow {
    fn header() -> &'static [&'static str] {
        &["pso", "computed", "reference", "agree"]
    }

    fn record(&self) -> Vec<String> {
        let cell = |v: Option<u64>| v.map_or_else(String::new, |v| v.to_string());
        vec![
            self.pso.to_string(),
            cell(self.computed),
            cell(self.reference),
            self.agree.to_string(),
        ]
    }
}

/// Side-by-side diff of computed counts against reference counts.
///
/// Only PSO values present in the reference are listed, plus any computed
/// value within the reference's PSO span.
pub fn compare_counts(
    computed: &BTreeMap<u64, u64>,
    reference: &BTreeMap<u64, Option<u64>>,
) -> Vec<ComparisonRow> {
    let Some((&lo, _)) = reference.first_key_value() else {
        return Vec::new();
    };
    let hi = *reference.keys().next_back().expect("non-empty");
    let mut keys: Vec<u64> = reference.keys().copied().collect();
    keys.extend(computed.keys().copied().filter(|k| (lo..=hi).contains(k)));
    keys.sort_unstable();
    keys.dedup();
    keys.into_iter()
        .map(|pso| {
            let c = computed.get(&pso).copied();
            let r = reference.get(&pso).copied().flatten();
            ComparisonRow {
                pso,
                computed: c,
                reference: r,
                agree: c.unwrap_or(0) == r.unwrap_or(0),
            }
        })
        .collect()
}

/// Read `pso -> count` from a CSV with a `pso` column. Blank, `-` and
/// non-numeric cells (e.g. counts marked as still in progress) map to `None`.
pub fn read_reference_column(
    path: &Path,
    column: &str,
) -> Result<BTreeMap<u64, Option<u64>>, ReportError> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| ReportError::MissingColumn(name.to_string()))
    };
    let (pso_at, col_at) = (find("pso")?, find(column)?);
    let mut out = BTreeMap::new();
    for record in rdr.records() {
        let record = record?;
        let pso_cell = &record[pso_at];
        let pso: u64 = pso_cell.parse().map_err(|_| ReportError::BadReference {
            column: "pso".to_string(),
            value: pso_cell.to_string(),
        })?;
        out.insert(pso, record[col_at].trim().parse().ok());
    }
    Ok(out)
}
