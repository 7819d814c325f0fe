//! Estimation of ‖f‖_p = (∫ ‖f‖_Y^p dμ)^{1/p}, restricted norms
//! ‖f‖_{p,A} = ((1/μ(A)) ∫_A ‖f‖_Y^p dμ)^{1/p}, the geometric-mean norm
//! ‖f‖_0 = lim_{p→0} ‖f‖_p, level-set measures μ(|f| ≤ t), and set
//! measures μ(A). Monte-Carlo estimates carry delta-method confidence
//! radii; 1-D instances against the uniform-interval and exponential
//! measures run through exact quadrature instead.
//!
//! Zero samples under p ≤ 0 are excluded from the mean and counted:
//! polynomial zero sets are null for every measure here, so exact zeros
//! signal a degenerate instance, reported through the `excess_zeros` flag
//! rather than poisoning the estimate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measures::{
    quadrature_1d, Domain1D, IntervalSet, MeasureError, MeasureSpec, Points, SetSpec,
    HALFLINE_TRUNCATION,
};
use crate::measures::roots;
use crate::poly::{Polynomial, ScalarField};
use crate::special::z_for_confidence;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormError {
    #[error("exponent p = {p} is inadmissible for degree {d}: need p > -1/d")]
    InadmissibleExponent { p: f64, d: usize },
    #[error("field is zero on every sample; norms with p ≤ 0 are undefined")]
    ZeroField,
    #[error("set has no accepted samples at this budget (measure indistinguishable from 0)")]
    EmptySet,
    #[error("threshold must be nonnegative, got {0}")]
    NegativeThreshold(f64),
    #[error("dimension mismatch: field on R^{field}, measure on R^{measure}")]
    DimensionMismatch { field: usize, measure: usize },
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMode {
    Exact,
    MonteCarlo,
}

/// A norm value with an error bar. Exact-path estimates have radius 0
/// (quadrature tolerance is orders below every comparison made with it).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub radius: f64,
    pub confidence: f64,
    pub mode: EstimateMode,
    pub samples_used: usize,
    pub p: f64,
    /// Samples with f = 0 excluded under p ≤ 0.
    pub zeros_rejected: usize,
    /// More than 0.1% of samples were exact zeros.
    pub excess_zeros: bool,
    /// Sample kurtosis of |f|^p exceeded the heavy-tail threshold
    /// (negative p near -1/d converges slowly; flagged, not certified).
    pub heavy_tail: bool,
}

impl NormEstimate {
    pub fn lower(&self) -> f64 {
        (self.value - self.radius).max(0.0)
    }

    pub fn upper(&self) -> f64 {
        self.value + self.radius
    }

    pub fn flagged(&self) -> bool {
        self.excess_zeros || self.heavy_tail || !self.radius.is_finite()
    }

    fn exact(value: f64, p: f64) -> Self {
        NormEstimate {
            value,
            radius: 0.0,
            confidence: 1.0,
            mode: EstimateMode::Exact,
            samples_used: 0,
            p,
            zeros_rejected: 0,
            excess_zeros: false,
            heavy_tail: false,
        }
    }
}

/// A probability in [0, 1] with an error bar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbEstimate {
    pub value: f64,
    pub radius: f64,
    pub confidence: f64,
    pub mode: EstimateMode,
    pub samples_used: usize,
}

impl ProbEstimate {
    pub fn lower(&self) -> f64 {
        (self.value - self.radius).max(0.0)
    }

    pub fn upper(&self) -> f64 {
        (self.value + self.radius).min(1.0)
    }

    pub fn exact(value: f64) -> Self {
        ProbEstimate {
            value,
            radius: 0.0,
            confidence: 1.0,
            mode: EstimateMode::Exact,
            samples_used: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorOptions {
    pub samples: usize,
    pub tol: f64,
    pub confidence: f64,
    /// Skip the exact path even where it applies (for consistency tests).
    pub force_monte_carlo: bool,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        EstimatorOptions {
            samples: 100_000,
            tol: 1e-10,
            confidence: 0.99,
            force_monte_carlo: false,
        }
    }
}

impl EstimatorOptions {
    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_confidence(mut self, confidence: f64) -> Self {
        self.confidence = confidence;
        self
    }

    pub fn monte_carlo_only(mut self) -> Self {
        self.force_monte_carlo = true;
        self
    }
}

const EXCESS_ZERO_FRACTION: f64 = 0.001;
const KURTOSIS_FLAG: f64 = 100.0;

/// Reject p outside (-1/d, ∞); the moment may not exist below.
pub fn check_exponent(p: f64, degree: usize) -> Result<(), NormError> {
    let d = degree.max(1);
    if p <= -1.0 / d as f64 {
        return Err(NormError::InadmissibleExponent { p, d });
    }
    Ok(())
}

#[inline]
fn fast_pow(v: f64, p: f64) -> f64 {
    if p == 1.0 {
        v
    } else if p == 2.0 {
        v * v
    } else if p == 0.5 {
        v.sqrt()
    } else if p == 4.0 {
        let s = v * v;
        s * s
    } else if p == -0.5 {
        1.0 / v.sqrt()
    } else {
        v.powf(p)
    }
}

/// ‖f‖ magnitudes over a point batch.
pub fn magnitudes(f: &dyn ScalarField, points: &Points) -> Vec<f64> {
    points.iter().map(|x| f.magnitude(x)).collect()
}

/// Monte-Carlo norm kernel over precomputed magnitudes, optionally masked
/// to a subset. The same value slice fed with the same mask always yields
/// the same estimate, which is what makes shared-sample comparisons exact.
pub fn mc_norm_from_values(
    values: &[f64],
    mask: Option<&[bool]>,
    p: f64,
    confidence: f64,
) -> Result<NormEstimate, NormError> {
    let total = match mask {
        Some(m) => m.iter().filter(|&&b| b).count(),
        None => values.len(),
    };
    if total == 0 {
        return Err(NormError::EmptySet);
    }
    let selected = || {
        values
            .iter()
            .enumerate()
            .filter(move |(i, _)| mask.is_none_or(|m| m[*i]))
            .map(|(_, &v)| v)
    };
    let z = z_for_confidence(confidence);

    if p == 0.0 {
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut kept = 0usize;
        for v in selected() {
            if v == 0.0 {
                continue;
            }
            let l = v.ln();
            sum += l;
            sum_sq += l * l;
            kept += 1;
        }
        if kept == 0 {
            return Err(NormError::ZeroField);
        }
        let zeros = total - kept;
        let mean = sum / kept as f64;
        let var = (sum_sq / kept as f64 - mean * mean).max(0.0);
        let value = mean.exp();
        let radius = if kept > 1 { z * value * (var / kept as f64).sqrt() } else { f64::INFINITY };
        return Ok(NormEstimate {
            value,
            radius,
            confidence,
            mode: EstimateMode::MonteCarlo,
            samples_used: total,
            p,
            zeros_rejected: zeros,
            excess_zeros: zeros as f64 > EXCESS_ZERO_FRACTION * total as f64,
            heavy_tail: false,
        });
    }

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut kept = 0usize;
    for v in selected() {
        if p < 0.0 && v == 0.0 {
            continue;
        }
        let w = fast_pow(v, p);
        sum += w;
        sum_sq += w * w;
        kept += 1;
    }
    if kept == 0 {
        return Err(if p > 0.0 { NormError::EmptySet } else { NormError::ZeroField });
    }
    let zeros = total - kept;
    let mean = sum / kept as f64;
    if mean == 0.0 {
        // All magnitudes zero with p > 0: the norm is zero.
        return Ok(NormEstimate {
            value: 0.0,
            radius: 0.0,
            confidence,
            mode: EstimateMode::MonteCarlo,
            samples_used: total,
            p,
            zeros_rejected: 0,
            excess_zeros: false,
            heavy_tail: false,
        });
    }
    let mut heavy_tail = !mean.is_finite();
    let value;
    let radius;
    if heavy_tail {
        value = 0.0;
        radius = f64::INFINITY;
    } else {
        let var = (sum_sq / kept as f64 - mean * mean).max(0.0);
        value = fast_pow(mean, 1.0 / p);
        radius = if kept > 1 {
            let se = (var / kept as f64).sqrt();
            z * se * (1.0 / p).abs() * fast_pow(mean, 1.0 / p - 1.0)
        } else {
            f64::INFINITY
        };
        if p < 0.0 && kept > 3 {
            let mut fourth = 0.0;
            for v in selected() {
                if v == 0.0 {
                    continue;
                }
                let delta = fast_pow(v, p) - mean;
                let d2 = delta * delta;
                fourth += d2 * d2;
            }
            let kurtosis = if var > 0.0 {
                (fourth / kept as f64) / (var * var)
            } else {
                0.0
            };
            heavy_tail = kurtosis > KURTOSIS_FLAG;
        }
    }
    Ok(NormEstimate {
        value,
        radius,
        confidence,
        mode: EstimateMode::MonteCarlo,
        samples_used: total,
        p,
        zeros_rejected: zeros,
        excess_zeros: zeros as f64 > EXCESS_ZERO_FRACTION * total as f64,
        heavy_tail,
    })
}

/// Binomial proportion with a normal-approximation radius; at the 0 or m
/// extremes the radius is the one-sided exact bound -ln(1-conf)/m.
pub fn prob_from_count(hits: usize, m: usize, confidence: f64) -> ProbEstimate {
    assert!(m > 0 && hits <= m);
    let p_hat = hits as f64 / m as f64;
    let radius = if hits == 0 || hits == m {
        (-(1.0 - confidence).ln()) / m as f64
    } else {
        let z = z_for_confidence(confidence);
        z * (p_hat * (1.0 - p_hat) / m as f64).sqrt()
    };
    ProbEstimate {
        value: p_hat,
        radius,
        confidence,
        mode: EstimateMode::MonteCarlo,
        samples_used: m,
    }
}

fn check_field_measure(f: &dyn ScalarField, spec: &MeasureSpec) -> Result<(), NormError> {
    if f.dim() != spec.dim() {
        return Err(NormError::DimensionMismatch { field: f.dim(), measure: spec.dim() });
    }
    Ok(())
}

fn exact_eligible(
    f: &dyn ScalarField,
    spec: &MeasureSpec,
    opts: &EstimatorOptions,
) -> Option<(Polynomial, (f64, f64))> {
    if opts.force_monte_carlo {
        return None;
    }
    let support = spec.support_1d()?;
    let q = f.as_univariate()?;
    Some((q.clone(), support))
}

/// Roots of q within the (possibly truncated) window, used as quadrature
/// breakpoints so |q|^p kinks and singularities sit on segment ends.
fn root_breakpoints(q: &Polynomial, lo: f64, hi: f64) -> Vec<f64> {
    let hi = hi.min(HALFLINE_TRUNCATION);
    if !(lo < hi) || q.degree() == 0 {
        return Vec::new();
    }
    roots::locate_roots(q, lo, hi)
}

fn exact_power_integral(
    q: &Polynomial,
    spec: &MeasureSpec,
    set: &IntervalSet,
    p: f64,
    tol: f64,
) -> Result<f64, NormError> {
    let mut acc = 0.0;
    for &(lo, hi) in set.items() {
        let hi = hi.min(HALFLINE_TRUNCATION);
        if !(lo < hi) {
            continue;
        }
        let breaks = root_breakpoints(q, lo, hi);
        let val = quadrature_1d(
            |t| {
                let v = q.eval_unchecked(&[t]).abs();
                let w = spec.density_1d(t).unwrap_or(0.0);
                if p == 0.0 {
                    v.ln() * w
                } else {
                    fast_pow(v, p) * w
                }
            },
            Domain1D::Interval { lo, hi },
            tol,
            &breaks,
        )?;
        acc += val;
    }
    Ok(acc)
}

fn exact_norm(
    q: &Polynomial,
    spec: &MeasureSpec,
    set: Option<&SetSpec>,
    p: f64,
    tol: f64,
) -> Result<NormEstimate, NormError> {
    if q.is_zero() && p <= 0.0 {
        return Err(NormError::ZeroField);
    }
    let (lo, hi) = spec.support_1d().expect("exact path requires 1-D support");
    let (region, mass) = match set {
        Some(s) => {
            let region = s
                .to_interval_set(lo, hi)
                .expect("1-D sets always reduce to intervals");
            let mass = spec.interval_set_measure(&region).expect("exact kind");
            if mass <= 0.0 {
                return Err(NormError::EmptySet);
            }
            (region, mass)
        }
        None => (IntervalSet::full(lo, hi), 1.0),
    };
    if q.is_zero() {
        return Ok(NormEstimate::exact(0.0, p));
    }
    let integral = exact_power_integral(q, spec, &region, p, tol)?;
    let value = if p == 0.0 {
        (integral / mass).exp()
    } else {
        fast_pow(integral / mass, 1.0 / p)
    };
    Ok(NormEstimate::exact(value, p))
}

/// ‖f‖_p against μ. Exact quadrature when μ is 1-D uniform/exponential and
/// f univariate; Monte-Carlo with a delta-method radius otherwise.
pub fn lp_norm(
    f: &dyn ScalarField,
    spec: &MeasureSpec,
    p: f64,
    opts: &EstimatorOptions,
    seed: u64,
) -> Result<NormEstimate, NormError> {
    check_field_measure(f, spec)?;
    check_exponent(p, f.degree())?;
    if let Some((q, _)) = exact_eligible(f, spec, opts) {
        return exact_norm(&q, spec, None, p, opts.tol);
    }
    let points = spec.sample(opts.samples, seed)?;
    let values = magnitudes(f, &points);
    mc_norm_from_values(&values, None, p, opts.confidence)
}

/// ‖f‖_{p,A}: the L^p norm against the conditional measure μ_A.
pub fn restricted_lp_norm(
    f: &dyn ScalarField,
    spec: &MeasureSpec,
    set: &SetSpec,
    p: f64,
    opts: &EstimatorOptions,
    seed: u64,
) -> Result<NormEstimate, NormError> {
    check_field_measure(f, spec)?;
    check_exponent(p, f.degree())?;
    set.check_dim(spec.dim())?;
    if let Some((q, _)) = exact_eligible(f, spec, opts) {
        return exact_norm(&q, spec, Some(set), p, opts.tol);
    }
    let points = spec.sample(opts.samples, seed)?;
    let values = magnitudes(f, &points);
    let mask: Vec<bool> = points.iter().map(|x| set.indicator_unchecked(x)).collect();
    mc_norm_from_values(&values, Some(&mask), p, opts.confidence)
}

/// μ(|f| ≤ t) with a binomial radius, or exactly via root isolation in 1-D.
pub fn levelset_measure(
    f: &dyn ScalarField,
    spec: &MeasureSpec,
    t: f64,
    opts: &EstimatorOptions,
    seed: u64,
) -> Result<ProbEstimate, NormError> {
    check_field_measure(f, spec)?;
    if t < 0.0 {
        return Err(NormError::NegativeThreshold(t));
    }
    if let Some((q, (lo, hi))) = exact_eligible(f, spec, opts) {
        // {|q| ≤ t} = {q ≤ t} ∩ {-q ≤ t}.
        let event = SetSpec::Intersection {
            of: vec![
                SetSpec::Sublevel { poly: q.clone(), threshold: t },
                SetSpec::Sublevel { poly: q.scaled(-1.0), threshold: t },
            ],
        };
        let region = event.to_interval_set(lo, hi).expect("univariate sublevels");
        let mass = spec.interval_set_measure(&region).expect("exact kind");
        return Ok(ProbEstimate::exact(mass));
    }
    let points = spec.sample(opts.samples, seed)?;
    let hits = points.iter().filter(|x| f.magnitude(x) <= t).count();
    Ok(prob_from_count(hits, points.len(), opts.confidence))
}

/// μ(A), exactly in the 1-D uniform/exponential cases.
pub fn set_measure(
    spec: &MeasureSpec,
    set: &SetSpec,
    opts: &EstimatorOptions,
    seed: u64,
) -> Result<ProbEstimate, NormError> {
    set.check_dim(spec.dim())?;
    if !opts.force_monte_carlo {
        if let Some((lo, hi)) = spec.support_1d() {
            if let Some(region) = set.to_interval_set(lo, hi) {
                let mass = spec.interval_set_measure(&region).expect("exact kind");
                return Ok(ProbEstimate::exact(mass));
            }
        }
    }
    let points = spec.sample(opts.samples, seed)?;
    let hits = points.iter().filter(|x| set.indicator_unchecked(x)).count();
    Ok(prob_from_count(hits, points.len(), opts.confidence))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{CoefficientLaw, Polynomial};

    fn opts() -> EstimatorOptions {
        EstimatorOptions::default()
    }

    #[test]
    fn constant_field_has_constant_norm() {
        let f = Polynomial::constant(2, 5.0);
        let mu = MeasureSpec::uniform_ball(2).unwrap();
        for p in [-0.5, 0.0, 0.5, 1.0, 2.0, 4.0] {
            let est = lp_norm(&f, &mu, p, &opts(), 3).unwrap();
            assert!(
                (est.value - 5.0).abs() < 1e-9,
                "p={p}: {}",
                est.value
            );
        }
    }

    #[test]
    fn linear_exact_norm_on_interval() {
        // ‖t‖_1 on uniform [0,1] is 1/2, through the exact path.
        let f = Polynomial::univariate(&[0.0, 1.0]);
        let mu = MeasureSpec::interval_uniform(0.0, 1.0).unwrap();
        let est = lp_norm(&f, &mu, 1.0, &opts(), 0).unwrap();
        assert_eq!(est.mode, EstimateMode::Exact);
        assert_eq!(est.radius, 0.0);
        assert!((est.value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn cubic_exact_norm_on_halfline() {
        // ‖t³‖_1 under e^{-t} dt is 3! = 6.
        let f = Polynomial::univariate(&[0.0, 0.0, 0.0, 1.0]);
        let mu = MeasureSpec::exponential_halfline().unwrap();
        let est = lp_norm(&f, &mu, 1.0, &opts(), 0).unwrap();
        assert_eq!(est.mode, EstimateMode::Exact);
        assert!((est.value - 6.0).abs() < 1e-7 * 6.0);
    }

    #[test]
    fn geometric_mean_norm_of_identity() {
        // ‖t‖_0 on uniform [0,1]: exp(∫₀¹ ln t dt) = e^{-1}.
        let f = Polynomial::univariate(&[0.0, 1.0]);
        let mu = MeasureSpec::interval_uniform(0.0, 1.0).unwrap();
        let est = lp_norm(&f, &mu, 0.0, &opts(), 0).unwrap();
        assert_eq!(est.mode, EstimateMode::Exact);
        assert!((est.value - (-1.0f64).exp()).abs() < 1e-6, "{}", est.value);
    }

    #[test]
    fn restricted_norm_exact_path() {
        // ‖t‖_{1,[1/2,1]} on uniform [0,1]: 2·∫_{1/2}^1 t dt = 3/4.
        let f = Polynomial::univariate(&[0.0, 1.0]);
        let mu = MeasureSpec::interval_uniform(0.0, 1.0).unwrap();
        let a = SetSpec::Intervals { intervals: vec![(0.5, 1.0)] };
        let est = restricted_lp_norm(&f, &mu, &a, 1.0, &opts(), 0).unwrap();
        assert_eq!(est.mode, EstimateMode::Exact);
        assert!((est.value - 0.75).abs() < 1e-9);
    }

    #[test]
    fn restricted_norm_whole_space_matches_full() {
        let f = crate::poly::random_polynomial(2, 3, CoefficientLaw::StandardNormal, 8);
        let mu = MeasureSpec::uniform_box(2).unwrap();
        let whole = SetSpec::Halfspace { normal: vec![0.0, 0.0], offset: 1.0 };
        let full = lp_norm(&f, &mu, 2.0, &opts(), 11).unwrap();
        let restr = restricted_lp_norm(&f, &mu, &whole, 2.0, &opts(), 11).unwrap();
        // Same seed, same samples, full mask: identical estimator.
        assert!((full.value - restr.value).abs() < 1e-12);
    }

    #[test]
    fn empty_set_is_an_error() {
        let f = Polynomial::constant(2, 1.0);
        let mu = MeasureSpec::uniform_box(2).unwrap();
        let nothing = SetSpec::Halfspace { normal: vec![0.0, 0.0], offset: -1.0 };
        assert!(matches!(
            restricted_lp_norm(&f, &mu, &nothing, 1.0, &opts(), 0),
            Err(NormError::EmptySet)
        ));
    }

    #[test]
    fn inadmissible_exponent_rejected() {
        let f = crate::poly::random_polynomial(1, 2, CoefficientLaw::StandardNormal, 0);
        let mu = MeasureSpec::uniform_box(1).unwrap();
        assert!(matches!(
            lp_norm(&f, &mu, -0.5, &opts(), 0),
            Err(NormError::InadmissibleExponent { .. })
        ));
        assert!(lp_norm(&f, &mu, -0.25, &opts().monte_carlo_only(), 0).is_ok());
    }

    #[test]
    fn zero_field_errors_for_nonpositive_p() {
        let z = Polynomial::new(1, []).unwrap();
        let mu = MeasureSpec::interval_uniform(0.0, 1.0).unwrap();
        assert!(matches!(lp_norm(&z, &mu, 0.0, &opts(), 0), Err(NormError::ZeroField)));
        let ok = lp_norm(&z, &mu, 1.0, &opts(), 0).unwrap();
        assert_eq!(ok.value, 0.0);
    }

    #[test]
    fn levelset_exact_quartic() {
        // μ(t² ≤ 1/4) on uniform [-1,1] is 1/2.
        let f = Polynomial::univariate(&[0.0, 0.0, 1.0]);
        let mu = MeasureSpec::interval_uniform(-1.0, 1.0).unwrap();
        let est = levelset_measure(&f, &mu, 0.25, &opts(), 0).unwrap();
        assert_eq!(est.mode, EstimateMode::Exact);
        assert!((est.value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn levelset_saturates_and_vanishes() {
        let f = Polynomial::univariate(&[0.0, 1.0]);
        let mu = MeasureSpec::interval_uniform(0.0, 1.0).unwrap();
        let all = levelset_measure(&f, &mu, 2.0, &opts(), 0).unwrap();
        assert!((all.value - 1.0).abs() < 1e-12);
        let none = levelset_measure(&f, &mu, 0.0, &opts(), 0).unwrap();
        assert!(none.value < 1e-12);
        assert!(matches!(
            levelset_measure(&f, &mu, -0.1, &opts(), 0),
            Err(NormError::NegativeThreshold(_))
        ));
    }

    #[test]
    fn levelset_monotone_in_threshold_with_shared_samples() {
        let f = crate::poly::random_polynomial(3, 3, CoefficientLaw::StandardNormal, 5);
        let mu = MeasureSpec::uniform_ball(3).unwrap();
        let o = opts().with_samples(20_000);
        let mut prev = 0.0;
        for t in [0.0, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0] {
            let est = levelset_measure(&f, &mu, t, &o, 17).unwrap();
            assert!(est.value >= prev, "t={t}");
            prev = est.value;
        }
    }

    #[test]
    fn set_measure_examples() {
        let mu = MeasureSpec::interval_uniform(0.0, 1.0).unwrap();
        let a = SetSpec::Intervals { intervals: vec![(0.0, 0.3)] };
        let est = set_measure(&mu, &a, &opts(), 0).unwrap();
        assert_eq!(est.mode, EstimateMode::Exact);
        assert!((est.value - 0.3).abs() < 1e-15);

        // Halfspace through the centroid of a symmetric body.
        let ball = MeasureSpec::uniform_ball(3).unwrap();
        let half = SetSpec::Halfspace { normal: vec![1.0, 0.0, 0.0], offset: 0.0 };
        let est = set_measure(&ball, &half, &opts(), 4).unwrap();
        assert!((est.value - 0.5).abs() < est.radius, "{} ± {}", est.value, est.radius);

        let whole = SetSpec::Halfspace { normal: vec![0.0, 0.0, 0.0], offset: 0.0 };
        let est = set_measure(&ball, &whole, &opts(), 4).unwrap();
        assert!((est.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn monotone_in_p_with_shared_samples() {
        for seed in [1, 2, 3] {
            let f = crate::poly::random_polynomial(2, 2, CoefficientLaw::StandardNormal, seed);
            let mu = MeasureSpec::uniform_box(2).unwrap();
            let o = opts().with_samples(20_000);
            let grid = [-0.25, 0.0, 0.5, 1.0, 2.0, 4.0];
            let mut prev: Option<NormEstimate> = None;
            for &p in &grid {
                let est = lp_norm(&f, &mu, p, &o, 100 + seed).unwrap();
                if let Some(prior) = &prev {
                    assert!(
                        prior.value <= est.value + prior.radius + est.radius,
                        "p {} -> {}: {} vs {}",
                        prior.p,
                        p,
                        prior.value,
                        est.value
                    );
                }
                prev = Some(est);
            }
        }
    }

    #[test]
    fn homogeneity_is_exact_per_seed() {
        let f = crate::poly::random_polynomial(3, 2, CoefficientLaw::StandardNormal, 9);
        let g = f.scaled(-2.5);
        let mu = MeasureSpec::uniform_simplex(3).unwrap();
        let o = opts().with_samples(10_000);
        for p in [0.0, 0.5, 1.0, 2.0] {
            let a = lp_norm(&f, &mu, p, &o, 55).unwrap();
            let b = lp_norm(&g, &mu, p, &o, 55).unwrap();
            assert!(
                (b.value - 2.5 * a.value).abs() <= 1e-10 * a.value.max(1.0),
                "p={p}: {} vs {}",
                b.value,
                2.5 * a.value
            );
        }
    }

    #[test]
    fn l0_is_continuous_from_above() {
        let f = crate::poly::random_polynomial(2, 3, CoefficientLaw::StandardNormal, 14);
        let mu = MeasureSpec::uniform_box(2).unwrap();
        let o = opts().with_samples(50_000);
        let at_zero = lp_norm(&f, &mu, 0.0, &o, 7).unwrap();
        let near_zero = lp_norm(&f, &mu, 0.01, &o, 7).unwrap();
        let slack = 0.02 * at_zero.value + at_zero.radius + near_zero.radius;
        assert!(
            (near_zero.value - at_zero.value).abs() <= slack,
            "{} vs {}",
            near_zero.value,
            at_zero.value
        );
    }

    #[test]
    fn exact_and_monte_carlo_agree() {
        // All 1-D instances where both paths run: 4 combined radii.
        let mu_u = MeasureSpec::interval_uniform(-1.0, 1.0).unwrap();
        let mu_e = MeasureSpec::exponential_halfline().unwrap();
        for seed in [3, 4] {
            let f = crate::poly::random_polynomial(1, 3, CoefficientLaw::StandardNormal, seed);
            for (mu, tag) in [(&mu_u, "uniform"), (&mu_e, "exponential")] {
                for p in [0.0, 0.5, 1.0, 2.0] {
                    let exact = lp_norm(&f, mu, p, &opts(), 77).unwrap();
                    let mc = lp_norm(&f, mu, p, &opts().monte_carlo_only(), 77).unwrap();
                    assert!(
                        (exact.value - mc.value).abs() <= 4.0 * mc.radius.max(1e-12),
                        "{tag} p={p}: exact {} vs mc {} ± {}",
                        exact.value,
                        mc.value,
                        mc.radius
                    );
                }
            }
        }
    }

    #[test]
    fn negative_p_heavy_tail_flagging() {
        // p = -1/(2d) on a polynomial vanishing inside the support: the
        // estimate must come back finite, with flags rather than silence
        // if the tail is bad.
        let f = Polynomial::univariate(&[0.0, -3.0, 0.0, 4.0]);
        let mu = MeasureSpec::interval_uniform(-1.0, 1.0).unwrap();
        let p = -1.0 / 6.0;
        let est = lp_norm(&f, &mu, p, &opts().monte_carlo_only(), 21).unwrap();
        assert!(est.value > 0.0);
        assert!(est.value.is_finite());
    }

    #[test]
    fn dimension_mismatch_between_field_and_measure() {
        let f = Polynomial::constant(2, 1.0);
        let mu = MeasureSpec::uniform_box(3).unwrap();
        assert!(matches!(
            lp_norm(&f, &mu, 1.0, &opts(), 0),
            Err(NormError::DimensionMismatch { field: 2, measure: 3 })
        ));
    }
}
