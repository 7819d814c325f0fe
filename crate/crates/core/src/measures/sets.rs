//! Measurable sets given as finite Boolean combinations of closed
//! conditions: halfspaces, polynomial sublevel sets, and 1-D interval
//! unions. Indicators evaluate exactly; in one dimension a set reduces to
//! an interval union for the exact measure path.

use serde::{Deserialize, Serialize};

use super::intervals::IntervalSet;
use super::roots;
use super::MeasureError;
use crate::poly::Polynomial;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetSpec {
    /// {x : ⟨normal, x⟩ ≤ offset}.
    Halfspace { normal: Vec<f64>, offset: f64 },
    /// {x : q(x) ≤ threshold}.
    Sublevel { poly: Polynomial, threshold: f64 },
    /// Finite union of closed intervals, 1-D only.
    Intervals { intervals: Vec<(f64, f64)> },
    Complement { of: Box<SetSpec> },
    Intersection { of: Vec<SetSpec> },
}

impl SetSpec {
    /// Verify every leaf matches the ambient dimension.
    pub fn check_dim(&self, n: usize) -> Result<(), MeasureError> {
        match self {
            SetSpec::Halfspace { normal, .. } => {
                if normal.len() != n {
                    return Err(MeasureError::DimensionMismatch { expected: n, got: normal.len() });
                }
            }
            SetSpec::Sublevel { poly, .. } => {
                if poly.dim() != n {
                    return Err(MeasureError::DimensionMismatch { expected: n, got: poly.dim() });
                }
            }
            SetSpec::Intervals { .. } => {
                if n != 1 {
                    return Err(MeasureError::DimensionMismatch { expected: n, got: 1 });
                }
            }
            SetSpec::Complement { of } => of.check_dim(n)?,
            SetSpec::Intersection { of } => {
                for s in of {
                    s.check_dim(n)?;
                }
            }
        }
        Ok(())
    }

    pub fn indicator(&self, x: &[f64]) -> Result<bool, MeasureError> {
        self.check_dim(x.len())?;
        Ok(self.indicator_unchecked(x))
    }

    pub fn indicator_unchecked(&self, x: &[f64]) -> bool {
        match self {
            SetSpec::Halfspace { normal, offset } => {
                let dot: f64 = normal.iter().zip(x).map(|(a, b)| a * b).sum();
                dot <= *offset
            }
            SetSpec::Sublevel { poly, threshold } => poly.eval_unchecked(x) <= *threshold,
            SetSpec::Intervals { intervals } => {
                intervals.iter().any(|&(lo, hi)| lo <= x[0] && x[0] <= hi)
            }
            SetSpec::Complement { of } => !of.indicator_unchecked(x),
            SetSpec::Intersection { of } => of.iter().all(|s| s.indicator_unchecked(x)),
        }
    }

    /// Exact reduction to an interval union inside the 1-D support
    /// [lo, hi] (hi may be infinite). Returns None when a sublevel leaf is
    /// not univariate, so the caller falls back to Monte-Carlo.
    pub fn to_interval_set(&self, lo: f64, hi: f64) -> Option<IntervalSet> {
        let set = match self {
            SetSpec::Halfspace { normal, offset } => {
                if normal.len() != 1 {
                    return None;
                }
                let a = normal[0];
                if a > 0.0 {
                    IntervalSet::new(vec![(f64::NEG_INFINITY, offset / a)])
                } else if a < 0.0 {
                    IntervalSet::new(vec![(offset / a, f64::INFINITY)])
                } else if *offset >= 0.0 {
                    IntervalSet::new(vec![(f64::NEG_INFINITY, f64::INFINITY)])
                } else {
                    IntervalSet::empty()
                }
            }
            SetSpec::Sublevel { poly, threshold } => {
                if poly.dim() != 1 {
                    return None;
                }
                sublevel_intervals(poly, *threshold, lo, hi)
            }
            SetSpec::Intervals { intervals } => IntervalSet::new(intervals.clone()),
            SetSpec::Complement { of } => {
                of.to_interval_set(lo, hi)?.complement_within(lo, hi)
            }
            SetSpec::Intersection { of } => {
                let mut acc = IntervalSet::full(lo, hi);
                for s in of {
                    acc = acc.intersect(&s.to_interval_set(lo, hi)?);
                }
                acc
            }
        };
        Some(set.clip(lo, hi))
    }
}

/// {t ∈ [lo, hi] : q(t) ≤ s} as intervals, by locating the roots of q - s
/// and classifying the sign between consecutive cuts.
fn sublevel_intervals(q: &Polynomial, s: f64, lo: f64, hi: f64) -> IntervalSet {
    let shifted = shift_by(q, s);
    // Scan a bounded window; beyond the Cauchy root bound the sign of the
    // shifted polynomial is constant, so the window sign extends.
    let bound = roots::root_bound(&shifted).max(1.0);
    let scan_lo = lo.max(-bound - 1.0);
    let scan_hi = hi.min(bound + 1.0);
    if !(scan_lo < scan_hi) {
        // Support lies entirely beyond the root bound; constant sign.
        let probe = if hi.is_finite() { 0.5 * (lo + hi) } else { lo + 1.0 };
        return if shifted.eval_unchecked(&[probe]) <= 0.0 {
            IntervalSet::full(lo, hi)
        } else {
            IntervalSet::empty()
        };
    }
    let mut cuts = vec![scan_lo];
    cuts.extend(roots::locate_roots(&shifted, scan_lo, scan_hi));
    cuts.push(scan_hi);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= (scan_hi - scan_lo) * 1e-13);

    let mut items = Vec::new();
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if shifted.eval_unchecked(&[mid]) <= 0.0 {
            items.push((w[0], w[1]));
        }
    }
    // Extend to the un-scanned tails where the sign is settled.
    if lo < scan_lo && shifted.eval_unchecked(&[scan_lo - 0.5]) <= 0.0 {
        items.push((lo, scan_lo));
    }
    if hi > scan_hi && shifted.eval_unchecked(&[scan_hi + 0.5]) <= 0.0 {
        items.push((scan_hi, hi));
    }
    IntervalSet::new(items)
}

fn shift_by(q: &Polynomial, s: f64) -> Polynomial {
    let mut coeffs: Vec<f64> = q.dense_coefficients().expect("univariate").to_vec();
    if coeffs.is_empty() {
        coeffs.push(0.0);
    }
    coeffs[0] -= s;
    Polynomial::univariate(&coeffs)
}
