//! Randomized certification suites. Each suite walks a grid of cells
//! (dimension × degree × exponent × body), draws polynomials and
//! restriction sets deterministically from the master seed, estimates both
//! sides of its inequality on one shared sample cloud per cell, and emits
//! one report per instance.
//!
//! Sharing the cloud across every estimator of an instance is what makes
//! the discrete comparisons exact: the restricted points are a subset of
//! the full points, so subset monotonicity and threshold monotonicity hold
//! algebraically, not just in expectation.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

use crate::bounds::{
    ak_comparison_factor, class_remez_bound, cw_levelset_bound, negative_p_bound,
    theorem1_branches, theorem1_factor,
};
use crate::measures::{MeasureSpec, Points, SetSpec};
use crate::norms::{magnitudes, mc_norm_from_values, prob_from_count, EstimateMode, ProbEstimate};
use crate::poly::{
    random_polynomial, random_unit_vector, CodomainNorm, CoefficientLaw, Polynomial,
    PolynomialMap, TrigPolynomial,
};
use crate::rng::{fold_key, stream, substream};

use super::{
    bonferroni, instance_c_hat, verdict_for_lower_bound, verdict_for_upper_bound, CertifyError,
    InequalityReport, InstanceDescriptor, ReportedEstimate,
};

/// Convex bodies the suite grids range over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BodyKind {
    Box,
    Ball,
    Simplex,
}

impl BodyKind {
    pub fn label(self) -> &'static str {
        match self {
            BodyKind::Box => "box",
            BodyKind::Ball => "ball",
            BodyKind::Simplex => "simplex",
        }
    }

    pub fn measure(self, n: usize) -> Result<MeasureSpec, CertifyError> {
        let m = match self {
            BodyKind::Box => MeasureSpec::uniform_box(n)?,
            BodyKind::Ball => MeasureSpec::uniform_ball(n)?,
            BodyKind::Simplex => MeasureSpec::uniform_simplex(n)?,
        };
        Ok(m)
    }
}

/// Grid and budget for the restricted-norm and level-set suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub dims: Vec<usize>,
    pub degrees: Vec<usize>,
    pub exponents: Vec<f64>,
    pub bodies: Vec<BodyKind>,
    pub polys_per_cell: usize,
    pub samples: usize,
    pub calibration_samples: usize,
    pub c: f64,
    pub confidence: f64,
    pub seed: u64,
    pub fixed_clock: bool,
    /// Target measures of the halfspace cuts in each cell's set family.
    pub halfspace_quantiles: Vec<f64>,
    /// Target measures of the quadratic sublevel cuts.
    pub sublevel_quantiles: Vec<f64>,
    /// Level-set thresholds, as multiples of the estimated p-norm.
    pub thresholds: Vec<f64>,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        SuiteSpec {
            dims: vec![1, 2, 3, 4],
            degrees: vec![1, 2, 3, 4],
            exponents: vec![0.5, 1.0, 2.0],
            bodies: vec![BodyKind::Box, BodyKind::Ball, BodyKind::Simplex],
            polys_per_cell: 25,
            samples: 100_000,
            calibration_samples: 16_384,
            c: 4.0,
            confidence: 0.99,
            seed: 0,
            fixed_clock: false,
            halfspace_quantiles: vec![0.1, 0.3, 0.5, 0.7, 0.9],
            sublevel_quantiles: vec![0.3, 0.7],
            thresholds: vec![0.001, 0.005, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0],
        }
    }
}

impl SuiteSpec {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), CertifyError> {
        if self.dims.is_empty() || self.dims.iter().any(|&n| n < 1) {
            return Err(CertifyError::BadSpec("dims must be a non-empty list of n >= 1".into()));
        }
        if self.degrees.is_empty() || self.degrees.iter().any(|&d| d < 1) {
            return Err(CertifyError::BadSpec("degrees must be a non-empty list of d >= 1".into()));
        }
        if self.exponents.is_empty() || self.exponents.iter().any(|&p| !(p > 0.0) || !p.is_finite())
        {
            return Err(CertifyError::BadSpec("exponents must be finite and positive".into()));
        }
        if self.bodies.is_empty() {
            return Err(CertifyError::BadSpec("bodies must be non-empty".into()));
        }
        if self.polys_per_cell < 1 {
            return Err(CertifyError::BadSpec("polys_per_cell must be at least 1".into()));
        }
        if self.samples < 100 || self.calibration_samples < 100 {
            return Err(CertifyError::BadSpec("sample budgets must be at least 100".into()));
        }
        if !(self.c > 0.0) {
            return Err(CertifyError::BadSpec("c must be positive".into()));
        }
        if !(self.confidence > 0.5 && self.confidence < 1.0) {
            return Err(CertifyError::BadSpec("confidence must lie in (0.5, 1)".into()));
        }
        let sets = self.halfspace_quantiles.len() + self.sublevel_quantiles.len();
        if sets == 0 {
            return Err(CertifyError::BadSpec("at least one restriction-set quantile is required".into()));
        }
        if self
            .halfspace_quantiles
            .iter()
            .chain(self.sublevel_quantiles.iter())
            .any(|&q| !(q > 0.0 && q < 1.0))
        {
            return Err(CertifyError::BadSpec("set quantiles must lie in (0, 1)".into()));
        }
        if self.thresholds.is_empty() || self.thresholds.iter().any(|&t| !(t > 0.0)) {
            return Err(CertifyError::BadSpec("thresholds must be positive".into()));
        }
        Ok(())
    }
}

fn elapsed_ms(start: Instant, fixed_clock: bool) -> u64 {
    if fixed_clock {
        0
    } else {
        start.elapsed().as_millis() as u64
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// q-th order statistic of the scratch vector (sorted in place).
fn quantile_in_place(v: &mut [f64], q: f64) -> f64 {
    v.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let idx = ((v.len() - 1) as f64 * q).round() as usize;
    v[idx]
}

/// Builds one cell's restriction sets: halfspace cuts through random
/// directions with offsets calibrated to the requested quantiles on a
/// separate calibration cloud, plus sublevel sets of random quadratics
/// calibrated the same way.
fn build_set_family(n: usize, cal: &Points, spec: &SuiteSpec, body_index: usize) -> Vec<(String, SetSpec)> {
    let mut out = Vec::new();
    let mut rng = substream(spec.seed, &[stream::SET_FAMILY, body_index as u64, n as u64]);
    for &q in &spec.halfspace_quantiles {
        let u = random_unit_vector(n, &mut rng);
        let mut proj: Vec<f64> = cal.iter().map(|x| dot(&u, x)).collect();
        let tau = quantile_in_place(&mut proj, q);
        out.push((
            format!("halfspace_q{:02}", (q * 100.0).round() as u32),
            SetSpec::Halfspace { normal: u, offset: tau },
        ));
    }
    for (j, &q) in spec.sublevel_quantiles.iter().enumerate() {
        let cut_seed = fold_key(
            spec.seed,
            &[stream::SET_FAMILY, 0x51, body_index as u64, n as u64, j as u64],
        );
        let poly = random_polynomial(n, 2, CoefficientLaw::StandardNormal, cut_seed);
        let mut vals: Vec<f64> = cal.iter().map(|x| poly.eval_unchecked(x)).collect();
        let s = quantile_in_place(&mut vals, q);
        out.push((
            format!("sublevel_q{:02}", (q * 100.0).round() as u32),
            SetSpec::Sublevel { poly, threshold: s },
        ));
    }
    out
}

fn count_true(mask: &[bool]) -> usize {
    mask.iter().filter(|b| **b).count()
}

/// Restricted-norm suite: certifies ‖f‖_{p,A} ≥ K(p, d, μ(A), c)·‖f‖_p on
/// every instance of the grid. Reports carry both branch factors and, at
/// p = 1, the weaker comparison factor.
pub fn run_theorem1_suite(spec: &SuiteSpec) -> Result<Vec<InequalityReport>, CertifyError> {
    spec.validate()?;
    let conf = bonferroni(spec.confidence, 3);
    let mut reports = Vec::new();
    for (bi, &body) in spec.bodies.iter().enumerate() {
        for &n in &spec.dims {
            let measure = body.measure(n)?;
            let cloud = measure.sample(spec.samples, fold_key(spec.seed, &[bi as u64, n as u64]))?;
            let cal = measure.sample(
                spec.calibration_samples,
                fold_key(spec.seed, &[stream::SET_FAMILY, bi as u64, n as u64]),
            )?;
            let sets = build_set_family(n, &cal, spec, bi);
            let masks: Vec<Vec<bool>> = sets
                .iter()
                .map(|(_, s)| cloud.iter().map(|x| s.indicator_unchecked(x)).collect())
                .collect();
            let mus: Vec<ProbEstimate> = masks
                .iter()
                .map(|m| prob_from_count(count_true(m), cloud.len(), conf))
                .collect();
            for &d in &spec.degrees {
                // Bound factors per (set, exponent), evaluated at the
                // conservative interval ends and at the point estimate.
                let mut factor_table = Vec::with_capacity(sets.len());
                for mu in &mus {
                    let mu_lo = mu.lower().max(1e-12);
                    let mu_hi = mu.upper().min(1.0);
                    let mu_pt = mu.value.clamp(1e-12, 1.0);
                    let mut per_p = Vec::with_capacity(spec.exponents.len());
                    for &p in &spec.exponents {
                        let f_lo = theorem1_factor(p, d as u32, mu_lo, spec.c)?;
                        let f_hi = theorem1_factor(p, d as u32, mu_hi, spec.c)?;
                        let f_pt = theorem1_factor(p, d as u32, mu_pt, spec.c)?;
                        let branches = theorem1_branches(p, d as u32, mu_pt, spec.c)?;
                        let ak = if p == 1.0 {
                            Some(ak_comparison_factor(mu_pt, d as u32, spec.c)?)
                        } else {
                            None
                        };
                        per_p.push((f_lo, f_hi, f_pt, branches, ak));
                    }
                    factor_table.push(per_p);
                }
                let polys: Vec<Polynomial> = (0..spec.polys_per_cell)
                    .map(|k| {
                        random_polynomial(
                            n,
                            d,
                            CoefficientLaw::StandardNormal,
                            fold_key(spec.seed, &[bi as u64, k as u64]),
                        )
                    })
                    .collect();
                let sets_ref = &sets;
                let masks_ref = &masks;
                let mus_ref = &mus;
                let table_ref = &factor_table;
                let cloud_ref = &cloud;
                let cell: Vec<Vec<InequalityReport>> = polys
                    .par_iter()
                    .enumerate()
                    .map(|(k, f)| {
                        let start = Instant::now();
                        let values = magnitudes(f, cloud_ref);
                        let si = k % sets_ref.len();
                        let mask = &masks_ref[si];
                        let mu = &mus_ref[si];
                        let mut out = Vec::with_capacity(spec.exponents.len());
                        if count_true(mask) == 0 {
                            eprintln!(
                                "skipping degenerate instance: empty restriction set \
                                 (body={} n={} d={} poly={})",
                                body.label(),
                                n,
                                d,
                                k
                            );
                            return out;
                        }
                        for (pi, &p) in spec.exponents.iter().enumerate() {
                            let (f_lo, f_hi, f_pt, branches, ak) = table_ref[si][pi];
                            let full = mc_norm_from_values(&values, None, p, conf)
                                .expect("cloud is non-empty");
                            let lhs_est = mc_norm_from_values(&values, Some(mask), p, conf)
                                .expect("mask verified non-empty above");
                            let rhs_pt = f_pt * full.value;
                            let rhs_lo = f_lo * full.lower().max(0.0);
                            let rhs_hi = f_hi * full.upper();
                            let rhs = ReportedEstimate::from_point_hull(
                                rhs_pt,
                                rhs_lo,
                                rhs_hi,
                                EstimateMode::MonteCarlo,
                                full.samples_used,
                                full.flagged(),
                            );
                            let lhs = ReportedEstimate::from(&lhs_est);
                            let verdict = verdict_for_lower_bound(&lhs, &rhs, false);
                            let c_hat = if lhs.lower() > 0.0 {
                                Some(instance_c_hat(
                                    p,
                                    d,
                                    lhs.lower(),
                                    full.upper(),
                                    mu.upper().min(1.0),
                                ))
                            } else {
                                None
                            };
                            out.push(InequalityReport {
                                instance: InstanceDescriptor {
                                    suite: "restricted_norm".into(),
                                    n,
                                    d,
                                    p: Some(p),
                                    body: body.label().into(),
                                    set: sets_ref[si].0.clone(),
                                    poly_index: k,
                                    threshold: None,
                                    seed: spec.seed,
                                },
                                lhs,
                                rhs,
                                full_norm: Some(ReportedEstimate::from(&full)),
                                mu_a: Some(ReportedEstimate::from(mu)),
                                margin: lhs.value - rhs.value,
                                verdict,
                                c_hat,
                                branch_factors: Some(branches),
                                ak_factor: ak,
                                wall_ms: 0,
                            });
                        }
                        let ms = elapsed_ms(start, spec.fixed_clock);
                        for r in &mut out {
                            r.wall_ms = ms;
                        }
                        out
                    })
                    .collect();
                for v in cell {
                    reports.extend(v);
                }
            }
        }
    }
    Ok(reports)
}

/// Level-set suite: certifies μ(|f| ≤ t) ≤ min(1, c·t^{1/d}·pd/‖f‖_p^{1/d})
/// over the same grid, sweeping a threshold ladder per instance. Thresholds
/// and level-set counts come from the same cloud, so the reported level-set
/// measures are exactly non-decreasing along the ladder.
pub fn run_cw_suite(spec: &SuiteSpec) -> Result<Vec<InequalityReport>, CertifyError> {
    spec.validate()?;
    let conf = bonferroni(spec.confidence, 2);
    let mut reports = Vec::new();
    for (bi, &body) in spec.bodies.iter().enumerate() {
        for &n in &spec.dims {
            let measure = body.measure(n)?;
            let cloud = measure.sample(spec.samples, fold_key(spec.seed, &[bi as u64, n as u64]))?;
            for &d in &spec.degrees {
                let polys: Vec<Polynomial> = (0..spec.polys_per_cell)
                    .map(|k| {
                        random_polynomial(
                            n,
                            d,
                            CoefficientLaw::StandardNormal,
                            fold_key(spec.seed, &[bi as u64, k as u64]),
                        )
                    })
                    .collect();
                let cloud_ref = &cloud;
                let cell: Vec<Vec<InequalityReport>> = polys
                    .par_iter()
                    .enumerate()
                    .map(|(k, f)| {
                        let start = Instant::now();
                        let values = magnitudes(f, cloud_ref);
                        let m = values.len();
                        let mut out =
                            Vec::with_capacity(spec.exponents.len() * spec.thresholds.len());
                        for &p in &spec.exponents {
                            let full = mc_norm_from_values(&values, None, p, conf)
                                .expect("cloud is non-empty");
                            if !(full.value > 0.0) || full.flagged() {
                                eprintln!(
                                    "skipping degenerate instance: vanishing norm \
                                     (body={} n={} d={} poly={} p={})",
                                    body.label(),
                                    n,
                                    d,
                                    k,
                                    p
                                );
                                continue;
                            }
                            let norm_lo = full.lower();
                            let norm_hi = full.upper();
                            for (ti, &mult) in spec.thresholds.iter().enumerate() {
                                let t = mult * full.value;
                                let hits = values.iter().filter(|v| **v <= t).count();
                                let lhs_est = prob_from_count(hits, m, conf);
                                let bound_at = |norm: f64| {
                                    cw_levelset_bound(t, norm, p, d as u32, spec.c)
                                        .expect("parameters validated before the suite ran")
                                };
                                let rhs_pt = bound_at(full.value);
                                // The bound shrinks as the norm grows.
                                let rhs_hi = if norm_lo > 0.0 { bound_at(norm_lo) } else { 1.0 };
                                let rhs_lo = bound_at(norm_hi);
                                let rhs = ReportedEstimate::from_point_hull(
                                    rhs_pt,
                                    rhs_lo,
                                    rhs_hi,
                                    EstimateMode::MonteCarlo,
                                    full.samples_used,
                                    false,
                                );
                                let lhs = ReportedEstimate::from(&lhs_est);
                                let verdict = verdict_for_upper_bound(&lhs, &rhs, false);
                                out.push(InequalityReport {
                                    instance: InstanceDescriptor {
                                        suite: "levelset".into(),
                                        n,
                                        d,
                                        p: Some(p),
                                        body: body.label().into(),
                                        set: format!("level_{}", ti),
                                        poly_index: k,
                                        threshold: Some(t),
                                        seed: spec.seed,
                                    },
                                    lhs,
                                    rhs,
                                    full_norm: Some(ReportedEstimate::from(&full)),
                                    mu_a: None,
                                    margin: rhs.value - lhs.value,
                                    verdict,
                                    c_hat: None,
                                    branch_factors: None,
                                    ak_factor: None,
                                    wall_ms: 0,
                                });
                            }
                        }
                        let ms = elapsed_ms(start, spec.fixed_clock);
                        for r in &mut out {
                            r.wall_ms = ms;
                        }
                        out
                    })
                    .collect();
                for v in cell {
                    reports.extend(v);
                }
            }
        }
    }
    Ok(reports)
}

/// Budget for the sup-norm suite over subinterval unions of [-1, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSpec {
    pub scalar_instances: usize,
    pub vector_instances: usize,
    pub trig_instances: usize,
    pub max_degree: usize,
    pub max_components: usize,
    /// Base of the sup-norm constant for polynomial classes.
    pub poly_base: f64,
    /// Base for the trigonometric class.
    pub trig_base: f64,
    /// Smallest admitted fraction |A|/|Δ|.
    pub min_fraction: f64,
    pub max_subintervals: usize,
    pub seed: u64,
    pub fixed_clock: bool,
}

impl Default for ClassicalSpec {
    fn default() -> Self {
        ClassicalSpec {
            scalar_instances: 500,
            vector_instances: 200,
            trig_instances: 100,
            max_degree: 6,
            max_components: 3,
            poly_base: 4.0,
            trig_base: 316.0,
            min_fraction: 0.2,
            max_subintervals: 3,
            seed: 0,
            fixed_clock: false,
        }
    }
}

impl ClassicalSpec {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), CertifyError> {
        if self.max_degree < 1 || self.max_components < 1 || self.max_subintervals < 1 {
            return Err(CertifyError::BadSpec("degree, component, and subinterval caps must be at least 1".into()));
        }
        if !(self.min_fraction > 0.0 && self.min_fraction <= 1.0) {
            return Err(CertifyError::BadSpec("min_fraction must lie in (0, 1]".into()));
        }
        if !(self.poly_base > 0.0 && self.trig_base > 0.0) {
            return Err(CertifyError::BadSpec("class bases must be positive".into()));
        }
        Ok(())
    }
}

const DOMAIN_LO: f64 = -1.0;
const DOMAIN_HI: f64 = 1.0;

/// Supremum of f on [lo, hi]: coarse grid, then repeated local refinement
/// around the best point with a geometrically shrinking window.
fn sup_on_interval(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, coarse: usize) -> f64 {
    let coarse = coarse.max(16);
    let mut best = f64::NEG_INFINITY;
    let mut arg = lo;
    for i in 0..=coarse {
        let t = lo + (hi - lo) * i as f64 / coarse as f64;
        let v = f(t);
        if v > best {
            best = v;
            arg = t;
        }
    }
    let mut window = (hi - lo) / coarse as f64;
    for _ in 0..60 {
        let a = (arg - window).max(lo);
        let b = (arg + window).min(hi);
        for i in 0..=64 {
            let t = a + (b - a) * i as f64 / 64.0;
            let v = f(t);
            if v > best {
                best = v;
                arg = t;
            }
        }
        window *= 0.25;
        if window < 1e-14 * (hi - lo).max(1.0) {
            break;
        }
    }
    best
}

fn sup_on_union(f: &dyn Fn(f64) -> f64, pieces: &[(f64, f64)]) -> f64 {
    let span: f64 = DOMAIN_HI - DOMAIN_LO;
    let mut best = f64::NEG_INFINITY;
    for &(a, b) in pieces {
        let coarse = ((2048.0 * (b - a) / span) as usize).max(128);
        best = best.max(sup_on_interval(f, a, b, coarse));
    }
    best
}

/// Draws up to `max_k` disjoint subintervals of [-1, 1] whose total length
/// fraction reaches `min_fraction`; retries until the fraction is met.
fn draw_restriction(
    rng: &mut impl rand::Rng,
    max_k: usize,
    min_fraction: f64,
) -> (Vec<(f64, f64)>, f64) {
    for _ in 0..200 {
        let k = rng.random_range(1..=max_k);
        let mut cuts: Vec<f64> = (0..2 * k).map(|_| rng.random_range(DOMAIN_LO..DOMAIN_HI)).collect();
        cuts.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite"));
        let pieces: Vec<(f64, f64)> = cuts.chunks_exact(2).map(|c| (c[0], c[1])).collect();
        let total: f64 = pieces.iter().map(|(a, b)| b - a).sum();
        let lambda = total / (DOMAIN_HI - DOMAIN_LO);
        if lambda >= min_fraction && pieces.iter().all(|(a, b)| b - a > 1e-6) {
            return (pieces, lambda);
        }
    }
    (vec![(DOMAIN_LO, DOMAIN_HI)], 1.0)
}

fn classical_report(
    suite: &str,
    d: usize,
    set_label: String,
    poly_index: usize,
    seed: u64,
    sup_full: f64,
    sup_restricted: f64,
    bound: f64,
    lambda: f64,
    wall_ms: u64,
) -> InequalityReport {
    let lhs = ReportedEstimate::exact(sup_full);
    let rhs = ReportedEstimate::exact(bound * sup_restricted);
    let verdict = verdict_for_upper_bound(&lhs, &rhs, false);
    InequalityReport {
        instance: InstanceDescriptor {
            suite: suite.into(),
            n: 1,
            d,
            p: None,
            body: "interval".into(),
            set: set_label,
            poly_index,
            threshold: None,
            seed,
        },
        lhs,
        rhs,
        full_norm: None,
        mu_a: Some(ReportedEstimate::exact(lambda)),
        margin: rhs.value - lhs.value,
        verdict,
        c_hat: None,
        branch_factors: None,
        ak_factor: None,
        wall_ms,
    }
}

/// Sup-norm suite: scalar, vector-valued, and trigonometric instances on
/// subinterval unions of [-1, 1], each checked against its class constant
/// (base/fraction)^degree. Both sides are deterministic grid suprema, so
/// reports carry zero radii.
pub fn run_classical_suite(spec: &ClassicalSpec) -> Result<Vec<InequalityReport>, CertifyError> {
    spec.validate()?;
    let mut reports = Vec::new();

    for i in 0..spec.scalar_instances {
        let start = Instant::now();
        let mut rng = substream(spec.seed, &[stream::CLASSICAL, 1, i as u64]);
        let d = rng.random_range(1..=spec.max_degree);
        let poly = random_polynomial(
            1,
            d,
            CoefficientLaw::StandardNormal,
            fold_key(spec.seed, &[stream::CLASSICAL, 1, i as u64]),
        );
        let (pieces, lambda) = draw_restriction(&mut rng, spec.max_subintervals, spec.min_fraction);
        let f = |t: f64| poly.eval_unchecked(&[t]).abs();
        let sup_full = sup_on_interval(&f, DOMAIN_LO, DOMAIN_HI, 2048);
        let sup_a = sup_on_union(&f, &pieces);
        if !(sup_a > 0.0) {
            eprintln!("skipping degenerate instance: vanishing restricted sup (scalar {i})");
            continue;
        }
        let bound = class_remez_bound(spec.poly_base, poly.degree() as u32, lambda)?;
        reports.push(classical_report(
            "sup_remez_scalar",
            poly.degree(),
            format!("union{}_lam{:.3}", pieces.len(), lambda),
            i,
            spec.seed,
            sup_full,
            sup_a,
            bound,
            lambda,
            elapsed_ms(start, spec.fixed_clock),
        ));
    }

    for i in 0..spec.vector_instances {
        let start = Instant::now();
        let mut rng = substream(spec.seed, &[stream::CLASSICAL, 2, i as u64]);
        let d = rng.random_range(1..=spec.max_degree);
        let m = rng.random_range(1..=spec.max_components);
        let components: Vec<Polynomial> = (0..m)
            .map(|j| {
                random_polynomial(
                    1,
                    d,
                    CoefficientLaw::StandardNormal,
                    fold_key(spec.seed, &[stream::CLASSICAL, 2, i as u64, j as u64]),
                )
            })
            .collect();
        let norm = match i % 3 {
            0 => CodomainNorm::Euclidean,
            1 => CodomainNorm::Sup,
            _ => CodomainNorm::One,
        };
        let map = PolynomialMap::new(components, norm)?;
        let (pieces, lambda) = draw_restriction(&mut rng, spec.max_subintervals, spec.min_fraction);
        let f = |t: f64| map.eval_norm_unchecked(&[t]);
        let sup_full = sup_on_interval(&f, DOMAIN_LO, DOMAIN_HI, 2048);
        let sup_a = sup_on_union(&f, &pieces);
        if !(sup_a > 0.0) {
            eprintln!("skipping degenerate instance: vanishing restricted sup (vector {i})");
            continue;
        }
        let bound = class_remez_bound(spec.poly_base, map.degree() as u32, lambda)?;
        reports.push(classical_report(
            "sup_remez_vector",
            map.degree(),
            format!("union{}_lam{:.3}_{:?}", pieces.len(), lambda, norm).to_lowercase(),
            i,
            spec.seed,
            sup_full,
            sup_a,
            bound,
            lambda,
            elapsed_ms(start, spec.fixed_clock),
        ));
    }

    for i in 0..spec.trig_instances {
        let start = Instant::now();
        let mut rng = substream(spec.seed, &[stream::CLASSICAL, 3, i as u64]);
        let count = rng.random_range(1..=4);
        let functionals: Vec<Vec<f64>> = (0..count)
            .map(|_| {
                let w: f64 = rng.random_range(-5.0..5.0);
                vec![w]
            })
            .collect();
        let trig = TrigPolynomial::new(functionals)?;
        let (pieces, lambda) = draw_restriction(&mut rng, spec.max_subintervals, spec.min_fraction);
        let f = |t: f64| trig.eval_modulus_unchecked(&[t]);
        let sup_full = sup_on_interval(&f, DOMAIN_LO, DOMAIN_HI, 2048);
        let sup_a = sup_on_union(&f, &pieces);
        if !(sup_a > 0.0) {
            eprintln!("skipping degenerate instance: vanishing restricted sup (trig {i})");
            continue;
        }
        let bound = class_remez_bound(spec.trig_base, trig.degree() as u32, lambda)?;
        reports.push(classical_report(
            "sup_remez_trig",
            trig.degree(),
            format!("union{}_lam{:.3}", pieces.len(), lambda),
            i,
            spec.seed,
            sup_full,
            sup_a,
            bound,
            lambda,
            elapsed_ms(start, spec.fixed_clock),
        ));
    }

    Ok(reports)
}

/// Budget for the negative-exponent identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativePSpec {
    pub instances: usize,
    pub exponents: Vec<f64>,
    pub samples: usize,
    pub confidence: f64,
    pub seed: u64,
    pub fixed_clock: bool,
}

impl Default for NegativePSpec {
    fn default() -> Self {
        NegativePSpec {
            instances: 50,
            exponents: vec![-0.1, -0.25],
            samples: 20_000,
            confidence: 0.99,
            seed: 0,
            fixed_clock: false,
        }
    }
}

impl NegativePSpec {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), CertifyError> {
        if self.instances < 1 {
            return Err(CertifyError::BadSpec("instances must be at least 1".into()));
        }
        if self.exponents.is_empty() || self.exponents.iter().any(|&p| !(p < 0.0 && p > -1.0)) {
            return Err(CertifyError::BadSpec("negative exponents must lie in (-1, 0) for degree-1 fields".into()));
        }
        if self.samples < 100 {
            return Err(CertifyError::BadSpec("sample budget must be at least 100".into()));
        }
        if !(self.confidence > 0.5 && self.confidence < 1.0) {
            return Err(CertifyError::BadSpec("confidence must lie in (0.5, 1)".into()));
        }
        Ok(())
    }
}

/// Negative-exponent check: on shared samples, ‖f‖_p ≤ μ̂(A)^{1/p}·‖f‖_{p,A}
/// is an algebraic identity of the discrete sums for every p < 0, because
/// the restricted power sum is a sub-sum of the full one. Margins are
/// computed from the exact point values, so they certify the identity up
/// to floating-point rounding.
pub fn run_negative_p_check(spec: &NegativePSpec) -> Result<Vec<InequalityReport>, CertifyError> {
    spec.validate()?;
    let conf = bonferroni(spec.confidence, 3);
    let mut reports = Vec::new();
    for i in 0..spec.instances {
        let start = Instant::now();
        let measure = if i % 2 == 0 {
            MeasureSpec::interval_uniform(-1.0, 1.0)?
        } else {
            MeasureSpec::exponential_halfline()?
        };
        let body_label = if i % 2 == 0 { "interval" } else { "halfline" };
        let cloud = measure.sample(spec.samples, fold_key(spec.seed, &[0x4e, i as u64]))?;
        let poly = random_polynomial(
            1,
            1,
            CoefficientLaw::StandardNormal,
            fold_key(spec.seed, &[0x4e, 0x70, i as u64]),
        );
        let values = magnitudes(&poly, &cloud);
        let mut rng = substream(spec.seed, &[stream::SET_FAMILY, 0x4e, i as u64]);
        let q: f64 = rng.random_range(0.3..0.8);
        let mut coords: Vec<f64> = cloud.iter().map(|x| x[0]).collect();
        let tau = quantile_in_place(&mut coords, q);
        let mask: Vec<bool> = cloud.iter().map(|x| x[0] <= tau).collect();
        let hits = count_true(&mask);
        let m = cloud.len();
        if hits == 0 || hits == m {
            eprintln!("skipping degenerate instance: trivial restriction set ({i})");
            continue;
        }
        let mu_hat = hits as f64 / m as f64;
        let mu_est = prob_from_count(hits, m, conf);
        for &p in &spec.exponents {
            let full = mc_norm_from_values(&values, None, p, conf)?;
            let restr = mc_norm_from_values(&values, Some(&mask), p, conf)?;
            let bound_at = |mu: f64| {
                negative_p_bound(mu, p).expect("parameters validated before the check ran")
            };
            let rhs_pt = bound_at(mu_hat) * restr.value;
            // The bound grows as the set shrinks.
            let rhs_hi = bound_at(mu_est.lower().max(1e-9)) * restr.upper();
            let rhs_lo = bound_at(mu_est.upper().min(1.0)) * restr.lower().max(0.0);
            let rhs = ReportedEstimate::from_point_hull(
                rhs_pt,
                rhs_lo,
                rhs_hi,
                EstimateMode::MonteCarlo,
                restr.samples_used,
                restr.flagged(),
            );
            let lhs = ReportedEstimate::from(&full);
            let verdict = verdict_for_upper_bound(&lhs, &rhs, false);
            reports.push(InequalityReport {
                instance: InstanceDescriptor {
                    suite: "negative_exponent".into(),
                    n: 1,
                    d: 1,
                    p: Some(p),
                    body: body_label.into(),
                    set: format!("left_tail_q{:02}", (q * 100.0).round() as u32),
                    poly_index: i,
                    threshold: None,
                    seed: spec.seed,
                },
                lhs,
                rhs,
                full_norm: Some(ReportedEstimate::from(&full)),
                mu_a: Some(ReportedEstimate::from(&mu_est)),
                margin: rhs_pt - full.value,
                verdict,
                c_hat: None,
                branch_factors: None,
                ak_factor: None,
                wall_ms: elapsed_ms(start, spec.fixed_clock),
            });
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certifier::{fit_empirical_constant, Verdict, VerdictCounts};
        use crate::norms::{restricted_lp_norm, EstimatorOptions};
    use crate::poly::Polynomial;

    fn smoke_spec() -> SuiteSpec {
        SuiteSpec {
            dims: vec![1, 2],
            degrees: vec![1, 2],
            exponents: vec![0.5, 1.0],
            bodies: vec![BodyKind::Box],
            polys_per_cell: 4,
            samples: 4000,
            calibration_samples: 1024,
            c: 4.0,
            confidence: 0.99,
            seed: 1234,
            fixed_clock: true,
            halfspace_quantiles: vec![0.3, 0.6],
            sublevel_quantiles: vec![0.5],
            thresholds: vec![0.01, 0.1, 0.5, 1.0],
        }
    }

    #[test]
    fn worked_identity_instance() {
        // f(t) = t on uniform [0, 1], A = [1/2, 1], p = d = 1: the
        // restricted mean is exactly 3/4 and the certified floor is
        // (0.5/4)·(2)^{-1}·(1/2) = 0.03125.
        let f = Polynomial::univariate(&[0.0, 1.0]);
        let measure = MeasureSpec::interval_uniform(0.0, 1.0).unwrap();
        let set = SetSpec::Intervals { intervals: vec![(0.5, 1.0)] };
        let lhs =
            restricted_lp_norm(&f, &measure, &set, 1.0, &EstimatorOptions::default(), 0).unwrap();
        assert!((lhs.value - 0.75).abs() < 1e-12);
        assert_eq!(lhs.radius, 0.0);
        let factor = theorem1_factor(1.0, 1, 0.5, 4.0).unwrap();
        let full = 0.5;
        let rhs = factor * full;
        assert!((rhs - 0.03125).abs() < 1e-15);
        assert!(lhs.value >= rhs);
    }

    #[test]
    fn restricted_norm_suite_is_deterministic() {
        let spec = smoke_spec();
        let a = run_theorem1_suite(&spec).unwrap();
        let b = run_theorem1_suite(&spec).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let other = run_theorem1_suite(&spec.clone().with_seed(99)).unwrap();
        assert_ne!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&other).unwrap()
        );
    }

    #[test]
    fn restricted_norm_suite_smoke() {
        let reports = run_theorem1_suite(&smoke_spec()).unwrap();
        // 2 dims × 2 degrees × 4 polys × 2 exponents.
        assert_eq!(reports.len(), 32);
        let counts = VerdictCounts::tally(&reports);
        assert_eq!(counts.violated, 0);
        assert_eq!(counts.inconclusive, 0);
        for r in &reports {
            assert!(r.lhs.value > 0.0);
            assert!(r.rhs.value > 0.0);
            assert!(r.margin > 0.0);
            let c = r.c_hat.expect("well-separated instances fit a constant");
            assert!(c.is_finite() && c > 0.0);
            let (low, high) = r.branch_factors.unwrap();
            assert!(low > 0.0 && high > 0.0);
            if r.instance.p == Some(1.0) {
                assert!(r.ak_factor.is_some());
            }
            assert_eq!(r.wall_ms, 0);
        }
        let fitted = fit_empirical_constant(&reports).unwrap();
        assert!(fitted.is_finite() && fitted > 0.0);
    }

    #[test]
    fn levelset_suite_monotone_and_clean() {
        let reports = run_cw_suite(&smoke_spec()).unwrap();
        assert_eq!(reports.len(), 2 * 2 * 4 * 2 * 4);
        let counts = VerdictCounts::tally(&reports);
        assert_eq!(counts.violated, 0);
        // Within one (poly, p) group the thresholds ascend, and the
        // level-set fractions must ascend with them exactly.
        for group in reports.chunks(4) {
            for w in group.windows(2) {
                assert_eq!(w[0].instance.poly_index, w[1].instance.poly_index);
                assert!(w[0].instance.threshold.unwrap() <= w[1].instance.threshold.unwrap());
                assert!(w[0].lhs.value <= w[1].lhs.value);
            }
        }
    }

    #[test]
    fn classical_suite_smoke() {
        let spec = ClassicalSpec {
            scalar_instances: 30,
            vector_instances: 12,
            trig_instances: 6,
            seed: 7,
            fixed_clock: true,
            ..ClassicalSpec::default()
        };
        let reports = run_classical_suite(&spec).unwrap();
        assert_eq!(reports.len(), 48);
        for r in &reports {
            assert_eq!(r.verdict, Verdict::Holds);
            assert!(r.margin >= 0.0);
            assert!(r.lhs.value > 0.0);
            assert!(r.mu_a.unwrap().value >= spec.min_fraction - 1e-12);
        }
        let vector: Vec<_> =
            reports.iter().filter(|r| r.instance.suite == "sup_remez_vector").collect();
        assert_eq!(vector.len(), 12);
        // All three codomain norms appear.
        let labels: std::collections::BTreeSet<&str> = vector
            .iter()
            .map(|r| r.instance.set.rsplit('_').next().unwrap())
            .collect();
        assert_eq!(labels.len(), 3);
    }

    #[test]
    fn vector_pair_worked_example() {
        // F(t) = (t, 1 - t²) on [-1, 1] with the sup codomain norm: the
        // full sup is 1, reached at |t| = 1 and t = 0 alike, so any
        // restriction with fraction ≥ 1/4 certifies easily against 4²·16.
        let map = PolynomialMap::new(
            vec![
                Polynomial::univariate(&[0.0, 1.0]),
                Polynomial::univariate(&[1.0, 0.0, -1.0]),
            ],
            CodomainNorm::Sup,
        )
        .unwrap();
        let f = |t: f64| map.eval_norm_unchecked(&[t]);
        let sup_full = sup_on_interval(&f, -1.0, 1.0, 2048);
        assert!((sup_full - 1.0).abs() < 1e-12);
        let sup_a = sup_on_interval(&f, -1.0, -0.5, 256);
        let bound = class_remez_bound(4.0, 2, 0.25).unwrap();
        assert_eq!(bound, 256.0);
        assert!(sup_full <= bound * sup_a);
    }

    #[test]
    fn negative_exponent_identity_holds_pointwise() {
        let spec = NegativePSpec {
            instances: 20,
            samples: 5000,
            seed: 42,
            fixed_clock: true,
            ..NegativePSpec::default()
        };
        let reports = run_negative_p_check(&spec).unwrap();
        assert_eq!(reports.len(), 40);
        for r in &reports {
            // The discrete inequality is algebraic; only rounding noise
            // can push the margin below zero.
            assert!(
                r.margin >= -1e-9 * r.lhs.value.abs().max(1.0),
                "margin {} at {:?}",
                r.margin,
                r.instance
            );
            assert!(r.rhs.value >= r.lhs.value * (1.0 - 1e-9));
        }
    }

    #[test]
    fn suite_spec_validation_rejects_bad_grids() {
        let mut spec = smoke_spec();
        spec.exponents = vec![0.5, -1.0];
        assert!(matches!(run_theorem1_suite(&spec), Err(CertifyError::BadSpec(_))));
        let mut spec = smoke_spec();
        spec.dims = vec![];
        assert!(matches!(run_theorem1_suite(&spec), Err(CertifyError::BadSpec(_))));
        let mut spec = smoke_spec();
        spec.confidence = 1.0;
        assert!(matches!(run_cw_suite(&spec), Err(CertifyError::BadSpec(_))));
    }
}
