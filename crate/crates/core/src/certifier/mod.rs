//! Instance-level certification of the inequalities: builds randomized
//! test instances, estimates both sides with confidence radii, and issues
//! per-instance verdicts that stay deterministic for a fixed seed.
//!
//! Verdict semantics are one-sided and conservative in both directions: a
//! claimed inequality is `Holds` only when the confidence intervals of the
//! two sides are disjoint in the claimed order, `Violated` only when they
//! are disjoint in the opposite order, and `HoldsWithinNoise` when they
//! overlap. Estimates whose quality flags fired yield `Inconclusive`.

pub mod search;
pub mod suites;
pub mod tightness;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::BoundError;
use crate::measures::MeasureError;
use crate::norms::{EstimateMode, NormEstimate, ProbEstimate, NormError};

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("no reports to fit a constant from")]
    EmptyInput,
    #[error("bad suite parameter: {0}")]
    BadSpec(String),
    #[error("instance {index} has non-positive restricted norm {value}")]
    NonPositiveLhs { index: usize, value: f64 },
    #[error("instance {index} lacks the estimates a fit needs")]
    MissingFitFields { index: usize },
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Poly(#[from] crate::poly::PolyError),
}

/// Outcome of comparing the two estimated sides of one inequality instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    HoldsWithinNoise,
    Violated,
    Inconclusive,
}

/// Estimate snapshot embedded in reports: value, confidence radius, how it
/// was produced, and whether a quality flag fired.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportedEstimate {
    pub value: f64,
    pub radius: f64,
    pub mode: EstimateMode,
    pub samples_used: usize,
    pub flagged: bool,
}

impl ReportedEstimate {
    pub fn lower(&self) -> f64 {
        self.value - self.radius
    }

    pub fn upper(&self) -> f64 {
        self.value + self.radius
    }

    /// An exactly known quantity: zero radius, no sampling.
    pub fn exact(value: f64) -> Self {
        ReportedEstimate { value, radius: 0.0, mode: EstimateMode::Exact, samples_used: 0, flagged: false }
    }

    /// A bound value with a point estimate and a propagated interval
    /// [lo, hi]: the radius symmetrically covers the whole hull, so the
    /// stored interval contains [lo, hi] and verdicts stay conservative.
    pub fn from_point_hull(
        point: f64,
        lo: f64,
        hi: f64,
        mode: EstimateMode,
        samples_used: usize,
        flagged: bool,
    ) -> Self {
        let radius = (hi - point).max(point - lo).max(0.0);
        ReportedEstimate {
            value: point,
            radius,
            mode,
            samples_used,
            flagged: flagged || !radius.is_finite(),
        }
    }
}

impl From<&NormEstimate> for ReportedEstimate {
    fn from(e: &NormEstimate) -> Self {
        ReportedEstimate {
            value: e.value,
            radius: e.radius,
            mode: e.mode,
            samples_used: e.samples_used,
            flagged: e.flagged(),
        }
    }
}

impl From<&ProbEstimate> for ReportedEstimate {
    fn from(e: &ProbEstimate) -> Self {
        ReportedEstimate {
            value: e.value,
            radius: e.radius,
            mode: e.mode,
            samples_used: e.samples_used,
            flagged: !e.radius.is_finite(),
        }
    }
}

/// What a single certified instance was made of.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDescriptor {
    /// Which suite produced the instance.
    pub suite: String,
    /// Ambient dimension.
    pub n: usize,
    /// Polynomial degree.
    pub d: usize,
    /// Norm exponent; absent for sup-norm suites.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<f64>,
    /// Body / measure label ("box", "ball", "simplex", ...).
    pub body: String,
    /// Restriction-set label within the cell's family.
    pub set: String,
    /// Index of the random polynomial within its cell.
    pub poly_index: usize,
    /// Level-set threshold, for suites that sweep one.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub threshold: Option<f64>,
    /// Master seed the instance derives from.
    pub seed: u64,
}

/// One certified inequality instance: both sides with radii, the margin,
/// the verdict, and the per-instance fitted constant when defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub instance: InstanceDescriptor,
    /// The side the inequality claims is large (restricted norm, or the
    /// level-set measure for the anti-concentration suite).
    pub lhs: ReportedEstimate,
    /// The bound side, with the measure and norm uncertainty propagated
    /// through the bound formula into an interval.
    pub rhs: ReportedEstimate,
    /// Unrestricted p-norm of the instance polynomial, when one exists.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub full_norm: Option<ReportedEstimate>,
    /// Measure of the restriction set, when one exists.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mu_a: Option<ReportedEstimate>,
    /// lhs.value - rhs.value; positive means the claimed direction held
    /// with room to spare (for upper-bound suites the sign convention is
    /// rhs.value - lhs.value instead, so positive is always good).
    pub margin: f64,
    pub verdict: Verdict,
    /// Smallest constant making this instance tight, from conservative
    /// interval ends; absent when the instance cannot support a fit.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub c_hat: Option<f64>,
    /// Both branch values of the restricted-norm factor at the point
    /// estimates, so behaviour at the regime boundary pd = 1 is visible.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub branch_factors: Option<(f64, f64)>,
    /// Weaker one-dimensional comparison factor at p = 1.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ak_factor: Option<f64>,
    /// Wall-clock cost of the instance; zero under a fixed clock.
    pub wall_ms: u64,
}

/// Verdict for a claim lhs ≥ rhs given both confidence intervals.
pub fn verdict_for_lower_bound(
    lhs: &ReportedEstimate,
    rhs: &ReportedEstimate,
    flagged: bool,
) -> Verdict {
    if flagged || lhs.flagged || rhs.flagged {
        return Verdict::Inconclusive;
    }
    if lhs.lower() >= rhs.upper() {
        Verdict::Holds
    } else if lhs.upper() < rhs.lower() {
        Verdict::Violated
    } else {
        Verdict::HoldsWithinNoise
    }
}

/// Verdict for a claim lhs ≤ rhs.
pub fn verdict_for_upper_bound(
    lhs: &ReportedEstimate,
    rhs: &ReportedEstimate,
    flagged: bool,
) -> Verdict {
    if flagged || lhs.flagged || rhs.flagged {
        return Verdict::Inconclusive;
    }
    if lhs.upper() <= rhs.lower() {
        Verdict::Holds
    } else if lhs.lower() > rhs.upper() {
        Verdict::Violated
    } else {
        Verdict::HoldsWithinNoise
    }
}

/// Per-instance confidence for a family-wise level: each of `pieces`
/// sub-estimates runs at 1 - (1 - confidence)/pieces.
pub fn bonferroni(confidence: f64, pieces: usize) -> f64 {
    1.0 - (1.0 - confidence) / pieces.max(1) as f64
}

/// Tally of verdicts across a report set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub holds: usize,
    pub holds_within_noise: usize,
    pub violated: usize,
    pub inconclusive: usize,
    pub total: usize,
}

impl VerdictCounts {
    pub fn tally(reports: &[InequalityReport]) -> Self {
        let mut counts = VerdictCounts::default();
        for r in reports {
            counts.total += 1;
            match r.verdict {
                Verdict::Holds => counts.holds += 1,
                Verdict::HoldsWithinNoise => counts.holds_within_noise += 1,
                Verdict::Violated => counts.violated += 1,
                Verdict::Inconclusive => counts.inconclusive += 1,
            }
        }
        counts
    }
}

/// Smallest constant that makes the restricted-norm inequality tight for
/// one instance, inverted from the applicable regime and evaluated at the
/// conservative interval ends (small restricted norm, large full norm,
/// large set measure).
pub fn instance_c_hat(p: f64, d: usize, lhs_lo: f64, norm_hi: f64, mu_a_hi: f64) -> f64 {
    let df = d as f64;
    if p * df < 1.0 {
        let core = (df * p + 1.0).powf(-1.0 / p) * norm_hi / lhs_lo;
        mu_a_hi * core.powf(1.0 / df)
    } else {
        let core = (p + 1.0 / df).powf(-1.0 / p) * norm_hi / lhs_lo;
        mu_a_hi / (p * df) * core.powf(1.0 / df)
    }
}

/// Largest per-instance fitted constant over a report set: the smallest c
/// certified to work for every instance at the stated confidence.
pub fn fit_empirical_constant(reports: &[InequalityReport]) -> Result<f64, CertifyError> {
    if reports.is_empty() {
        return Err(CertifyError::EmptyInput);
    }
    let mut best = 0.0f64;
    for (index, r) in reports.iter().enumerate() {
        if r.lhs.value <= 0.0 {
            return Err(CertifyError::NonPositiveLhs { index, value: r.lhs.value });
        }
        let (norm, mu, p) = match (&r.full_norm, &r.mu_a, r.instance.p) {
            (Some(n), Some(m), Some(p)) => (n, m, p),
            _ => return Err(CertifyError::MissingFitFields { index }),
        };
        let lhs_lo = r.lhs.lower();
        if lhs_lo <= 0.0 {
            return Err(CertifyError::NonPositiveLhs { index, value: lhs_lo });
        }
        let c_i = instance_c_hat(
            p,
            r.instance.d,
            lhs_lo,
            norm.upper(),
            mu.upper().min(1.0),
        );
        if c_i > best {
            best = c_i;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn est(value: f64, radius: f64) -> ReportedEstimate {
        ReportedEstimate {
            value,
            radius,
            mode: EstimateMode::MonteCarlo,
            samples_used: 1000,
            flagged: false,
        }
    }

    #[test]
    fn lower_bound_verdicts() {
        assert_eq!(verdict_for_lower_bound(&est(1.0, 0.1), &est(0.5, 0.1), false), Verdict::Holds);
        assert_eq!(
            verdict_for_lower_bound(&est(0.6, 0.2), &est(0.5, 0.2), false),
            Verdict::HoldsWithinNoise
        );
        assert_eq!(
            verdict_for_lower_bound(&est(0.1, 0.05), &est(0.5, 0.05), false),
            Verdict::Violated
        );
        assert_eq!(
            verdict_for_lower_bound(&est(1.0, 0.1), &est(0.5, 0.1), true),
            Verdict::Inconclusive
        );
    }

    #[test]
    fn upper_bound_verdicts_mirror() {
        assert_eq!(verdict_for_upper_bound(&est(0.2, 0.05), &est(0.8, 0.05), false), Verdict::Holds);
        assert_eq!(
            verdict_for_upper_bound(&est(0.9, 0.02), &est(0.5, 0.02), false),
            Verdict::Violated
        );
    }

    #[test]
    fn violated_needs_disjoint_intervals() {
        // Overlapping intervals can never produce a violation verdict.
        let lhs = est(0.45, 0.1);
        let rhs = est(0.5, 0.1);
        assert_ne!(verdict_for_lower_bound(&lhs, &rhs, false), Verdict::Violated);
        assert!(lhs.value + lhs.radius >= rhs.value - rhs.radius);
    }

    #[test]
    fn bonferroni_splits_error_budget() {
        assert!((bonferroni(0.99, 3) - (1.0 - 0.01 / 3.0)).abs() < 1e-15);
        assert_eq!(bonferroni(0.99, 1), 0.99);
    }

    #[test]
    fn c_hat_constant_field_oracle() {
        // Constant field, exact estimates: lhs = full norm, so the fit
        // reduces to μ(A)·(dp+1)^{-1/(pd)} in the low regime.
        let p = 0.5;
        let mu = 0.5;
        let c = instance_c_hat(p, 1, 2.0, 2.0, mu);
        let expect = mu * (1.0f64 * p + 1.0).powf(-1.0 / p);
        assert!((c - expect).abs() < 1e-14);
    }

    #[test]
    fn c_hat_known_instance() {
        // Identity map on [0,1] uniform, A = [1/2, 1]: restricted mean 3/4,
        // full mean 1/2, μ(A) = 1/2, p = d = 1 (high regime):
        // ĉ = μ(A)/(pd) · (p+1/d)^{-1/p}·norm/lhs = 0.5·(0.5·0.5/0.75) = 1/6.
        let c = instance_c_hat(1.0, 1, 0.75, 0.5, 0.5);
        assert!((c - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn fit_takes_max_and_validates() {
        let mk = |lhs: f64, norm: f64, mu: f64, p: f64, d: usize| InequalityReport {
            instance: InstanceDescriptor {
                suite: "restricted_norm".into(),
                n: 1,
                d,
                p: Some(p),
                body: "interval".into(),
                set: "right_half".into(),
                poly_index: 0,
                threshold: None,
                seed: 7,
            },
            lhs: ReportedEstimate::exact(lhs),
            rhs: ReportedEstimate::exact(0.0),
            full_norm: Some(ReportedEstimate::exact(norm)),
            mu_a: Some(ReportedEstimate::exact(mu)),
            margin: lhs,
            verdict: Verdict::Holds,
            c_hat: None,
            branch_factors: None,
            ak_factor: None,
            wall_ms: 0,
        };
        let reports = vec![mk(0.75, 0.5, 0.5, 1.0, 1), mk(2.0, 2.0, 0.5, 0.5, 1)];
        let fitted = fit_empirical_constant(&reports).unwrap();
        let first: f64 = 1.0 / 6.0;
        let second = 0.5 * 1.5f64.powf(-2.0);
        assert!((fitted - first.max(second)).abs() < 1e-14);

        assert!(matches!(fit_empirical_constant(&[]), Err(CertifyError::EmptyInput)));
        let bad = vec![mk(0.0, 0.5, 0.5, 1.0, 1)];
        assert!(matches!(
            fit_empirical_constant(&bad),
            Err(CertifyError::NonPositiveLhs { .. })
        ));
    }

    #[test]
    fn verdict_counts_tally() {
        let mk = |v: Verdict| InequalityReport {
            instance: InstanceDescriptor {
                suite: "s".into(),
                n: 1,
                d: 1,
                p: Some(1.0),
                body: "b".into(),
                set: "a".into(),
                poly_index: 0,
                threshold: None,
                seed: 0,
            },
            lhs: ReportedEstimate::exact(1.0),
            rhs: ReportedEstimate::exact(0.0),
            full_norm: None,
            mu_a: None,
            margin: 1.0,
            verdict: v,
            c_hat: None,
            branch_factors: None,
            ak_factor: None,
            wall_ms: 0,
        };
        let reports = vec![
            mk(Verdict::Holds),
            mk(Verdict::Holds),
            mk(Verdict::HoldsWithinNoise),
            mk(Verdict::Violated),
        ];
        let t = VerdictCounts::tally(&reports);
        assert_eq!((t.holds, t.holds_within_noise, t.violated, t.inconclusive, t.total), (2, 1, 1, 0, 4));
    }
}
