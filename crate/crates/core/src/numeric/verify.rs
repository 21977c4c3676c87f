//! Sequential-forward range verification.
//!
//! Every `n` in the range is walked only until it drops below itself; its
//! total order is then read back from the already verified smaller value.
//! Walking is pure and runs in parallel per chunk; the cache has a single
//! writer that fills it in ascending order of `n`.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use super::{default_max_steps, segment, NumericError, Segment, SegmentError, Term};

#[derive(Debug, Clone)]
pub struct RangeOptions {
    pub max_steps: u64,
    /// Number of start values walked in parallel before the cache is extended.
    pub chunk: usize,
}

impl Default for RangeOptions {
    fn default() -> Self {
        RangeOptions {
            max_steps: default_max_steps(),
            chunk: 1 << 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Extremum {
    pub value: u64,
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeakExtremum {
    #[serde(serialize_with = "crate::serde_big::ser")]
    pub value: BigUint,
    pub n: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    /// Lookups answered by the cache (including the `tso(1) = 0` seed).
    pub hits: u64,
    /// Lookups below the range start, answered by walking the recurrence.
    pub on_demand: u64,
    pub entries: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub lo: u64,
    pub hi: u64,
    pub verified: u64,
    pub max_pso: Extremum,
    pub max_tso: Extremum,
    pub max_peak: PeakExtremum,
    pub cache: CacheStats,
}

struct TsoCache {
    lo: u64,
    values: Vec<u64>,
    stats: CacheStats,
    max_steps: u64,
}

impl TsoCache {
    fn lookup(&mut self, m: u64) -> Result<u64, NumericError> {
        if m == 1 {
            self.stats.hits += 1;
            return Ok(0);
        }
        if m >= self.lo {
            self.stats.hits += 1;
            return Ok(self.values[(m - self.lo) as usize]);
        }
        self.stats.on_demand += 1;
        let mut total = 0;
        let mut cur = m;
        while cur != 1 {
            let seg = walk(cur, self.max_steps)?;
            total += seg.order;
            cur = pst_u64(&seg);
        }
        Ok(total)
    }

    fn push(&mut self, tso: u64) {
        self.values.push(tso);
        self.stats.entries += 1;
    }
}

/// Verify every `n` in `lo..=hi` reaches a value below itself, aggregating
/// the largest PSO, TSO and peak. Ties keep the smallest `n`.
pub fn verify_range(lo: u64, hi: u64, opts: &RangeOptions) -> Result<VerifyReport, NumericError> {
    if lo < 2 || hi < lo {
        return Err(NumericError::InvalidRange { lo, hi });
    }
    let len = usize::try_from(hi - lo + 1).map_err(|_| NumericError::InvalidRange { lo, hi })?;
    let mut cache = TsoCache {
        lo,
        values: Vec::with_capacity(len),
        stats: CacheStats::default(),
        max_steps: opts.max_steps,
    };
    let mut max_pso = Extremum { value: 0, n: lo };
    let mut max_tso = Extremum { value: 0, n: lo };
    let mut max_peak = (Term::Small(0), lo);

    let chunk = opts.chunk.max(1) as u64;
    let mut block_lo = lo;
    loop {
        let block_hi = hi.min(block_lo.saturating_add(chunk - 1));
        let segments: Vec<Result<Segment, NumericError>> = (block_lo..=block_hi)
            .into_par_iter()
            .map(|n| walk(n, opts.max_steps))
            .collect();

        for (n, seg) in (block_lo..=block_hi).zip(segments) {
            let seg = seg?;
            let pst = pst_u64(&seg);
            let tso = seg.order + cache.lookup(pst)?;
            cache.push(tso);

            if seg.order > max_pso.value {
                max_pso = Extremum {
                    value: seg.order,
                    n,
                };
            }
            if tso > max_tso.value {
                max_tso = Extremum { value: tso, n };
            }
            // Peaks reached after `pst` belong to a smaller start; only those
            // below the range need to be looked at here.
            let mut candidate = seg.max;
            if pst < lo && pst > 1 {
                let below = super::peak(&BigUint::from(pst), opts.max_steps)?;
                let below = Term::from_biguint(&below);
                if below > candidate {
                    candidate = below;
                }
            }
            if candidate > max_peak.0 {
                max_peak = (candidate, n);
            }
        }

        if block_hi == hi {
            break;
        }
        block_lo = block_hi + 1;
    }

    Ok(VerifyReport {
        lo,
        hi,
        verified: cache.values.len() as u64,
        max_pso,
        max_tso,
        max_peak: PeakExtremum {
            value: max_peak.0.to_biguint(),
            n: max_peak.1,
        },
        cache: cache.stats,
    })
}

fn walk(n: u64, max_steps: u64) -> Result<Segment, NumericError> {
    segment(&Term::Small(n as u128), max_steps).map_err(|e| match e {
        SegmentError::Undefined => NumericError::PsoUndefined,
        SegmentError::Budget(steps) => NumericError::BudgetExceeded {
            n: BigUint::from(n),
            steps,
        },
    })
}

fn pst_u64(seg: &Segment) -> u64 {
    match seg.pst {
        // pst < n <= u64::MAX
        Term::Small(v) => v as u64,
        Term::Big(_) => unreachable!("pre-proven term exceeds its start"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{pso_u64, tso_u64, DEFAULT_MAX_STEPS};

    fn opts(chunk: usize) -> RangeOptions {
        RangeOptions {
            max_steps: DEFAULT_MAX_STEPS,
            chunk,
        }
    }

    #[test]
    fn small_range_maxima() {
        let r = verify_range(2, 200, &opts(64)).unwrap();
        assert_eq!(r.verified, 199);
        assert_eq!(r.max_tso, Extremum { value: 124, n: 171 });
        assert_eq!(r.max_pso, Extremum { value: 96, n: 27 });
        assert_eq!(r.max_peak.value, BigUint::from(9232u32));
        assert_eq!(r.max_peak.n, 27);
    }

    #[test]
    fn single_even_number() {
        let r = verify_range(2, 2, &opts(8)).unwrap();
        assert_eq!(r.verified, 1);
        assert_eq!(r.max_pso, Extremum { value: 1, n: 2 });
        assert_eq!(r.max_tso, Extremum { value: 1, n: 2 });
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(matches!(
            verify_range(1, 10, &opts(8)),
            Err(NumericError::InvalidRange { .. })
        ));
        assert!(matches!(
            verify_range(10, 9, &opts(8)),
            Err(NumericError::InvalidRange { .. })
        ));
    }

    #[test]
    fn chunking_does_not_change_the_report() {
        let base = verify_range(2, 5000, &opts(1 << 20)).unwrap();
        for chunk in [1, 7, 100, 4999] {
            let r = verify_range(2, 5000, &opts(chunk)).unwrap();
            assert_eq!(
                (r.max_pso, r.max_tso, &r.max_peak),
                (base.max_pso, base.max_tso, &base.max_peak)
            );
        }
    }

    #[test]
    fn offset_ranges_use_on_demand_recurrence() {
        let r = verify_range(1000, 1200, &opts(50)).unwrap();
        assert!(r.cache.on_demand > 0);
        let brute = (1000..=1200u64)
            .map(|n| (tso_u64(n, DEFAULT_MAX_STEPS).unwrap(), n))
            .fold((0, 0), |acc, x| if x.0 > acc.0 { x } else { acc });
        assert_eq!((r.max_tso.value, r.max_tso.n), brute);
        let brute_peak = (1000..=1200u64)
            .map(|n| crate::numeric::peak(&BigUint::from(n), DEFAULT_MAX_STEPS).unwrap())
            .max()
            .unwrap();
        assert_eq!(r.max_peak.value, brute_peak);
    }

    #[test]
    fn budget_error_names_the_start() {
        let err = verify_range(
            2,
            100,
            &RangeOptions {
                max_steps: 20,
                chunk: 16,
            },
        )
        .unwrap_err();
        // 27 is the first start whose drop below itself takes more than 20 steps.
        let first = (2..=100u64)
            .find(|&n| pso_u64(n, DEFAULT_MAX_STEPS).unwrap().0 > 20)
            .unwrap();
        assert_eq!(
            err,
            NumericError::BudgetExceeded {
                n: BigUint::from(first),
                steps: 20
            }
        );
    }
}
