//! Extremal-instance search: maximizes the ratio ‖f‖_p / ‖f‖_{p,A} over a
//! polynomial family, and optionally over the position of the restriction
//! window, to probe how close the fitted constant can be pushed to the
//! certified one. The objective is evaluated on one shared sample cloud,
//! so it is a deterministic function of the candidate and the seed.

use serde::{Deserialize, Serialize};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::measures::{MeasureSpec, SetSpec};
use crate::norms::{magnitudes, mc_norm_from_values};
use crate::poly::{multi_indices, Polynomial};
use crate::rng::{stream, substream};

use super::{instance_c_hat, CertifyError};

/// Families the search can walk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SearchFamily {
    /// Dense coefficient vectors of fixed (n, d), hill-climbed with
    /// coordinate-wise Gaussian perturbations under geometric step decay.
    DenseCoefficients { n: usize, d: usize },
    /// Univariate monomials t^k, k = 1..=d_max, enumerated exhaustively.
    Monomials { d_max: usize },
}

/// How the restriction set participates in the search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "set_family", rename_all = "snake_case")]
pub enum SetFamily {
    /// A fixed set; only the polynomial moves.
    Fixed { set: SetSpec },
    /// A sliding 1-D window [a, a + length]; its position a is searched
    /// alongside the coefficients.
    Window { length: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub family: SearchFamily,
    pub measure: MeasureSpec,
    pub set: SetFamily,
    pub p: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub samples: usize,
    pub c: f64,
    pub seed: u64,
    /// Initial perturbation scale.
    pub step: f64,
    /// Geometric decay of the scale per iteration.
    pub decay: f64,
}

impl SearchSpec {
    pub fn validate(&self) -> Result<(), CertifyError> {
        if !(self.p > 0.0) || !self.p.is_finite() {
            return Err(CertifyError::BadSpec("search exponent must be finite and positive".into()));
        }
        if self.iterations < 1 || self.restarts < 1 {
            return Err(CertifyError::BadSpec("iterations and restarts must be at least 1".into()));
        }
        if self.samples < 100 {
            return Err(CertifyError::BadSpec("sample budget must be at least 100".into()));
        }
        if !(self.c > 0.0) {
            return Err(CertifyError::BadSpec("c must be positive".into()));
        }
        if !(self.step > 0.0) || !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(CertifyError::BadSpec("step must be positive and decay must lie in (0, 1]".into()));
        }
        let family_dim = match self.family {
            SearchFamily::DenseCoefficients { n, d } => {
                if n < 1 || d < 1 {
                    return Err(CertifyError::BadSpec("family needs n >= 1 and d >= 1".into()));
                }
                n
            }
            SearchFamily::Monomials { d_max } => {
                if d_max < 1 {
                    return Err(CertifyError::BadSpec("monomial family needs d_max >= 1".into()));
                }
                1
            }
        };
        if family_dim != self.measure.dim() {
            return Err(CertifyError::BadSpec(format!(
                "family dimension {} does not match measure dimension {}",
                family_dim,
                self.measure.dim()
            )));
        }
        match &self.set {
            SetFamily::Fixed { set } => set.check_dim(self.measure.dim())?,
            SetFamily::Window { length } => {
                if self.measure.dim() != 1 {
                    return Err(CertifyError::BadSpec("window sets need a one-dimensional measure".into()));
                }
                if !(length > &0.0) {
                    return Err(CertifyError::BadSpec("window length must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

/// Outcome of a search run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_poly: Polynomial,
    /// Largest ratio ‖f‖_p / ‖f‖_{p,A} found.
    pub best_ratio: f64,
    /// Constant inverted from the best instance's point estimates.
    pub c_hat: f64,
    /// The restriction set of the best instance.
    pub best_set: SetSpec,
    /// Global best ratio after each iteration, across restarts; never
    /// decreasing by construction.
    pub trace: Vec<f64>,
    pub evaluations: usize,
}

struct Objective<'a> {
    values_scratch: Vec<f64>,
    cloud: &'a crate::measures::Points,
    p: f64,
    evaluations: usize,
}

impl<'a> Objective<'a> {
    /// Ratio for one candidate; negative infinity when the restricted
    /// norm degenerates so the candidate is never accepted.
    fn ratio(&mut self, poly: &Polynomial, mask: &[bool]) -> f64 {
        self.evaluations += 1;
        self.values_scratch.clear();
        self.values_scratch
            .extend(self.cloud.iter().map(|x| poly.eval_unchecked(x).abs()));
        if mask.iter().all(|b| !b) {
            return f64::NEG_INFINITY;
        }
        let full = match mc_norm_from_values(&self.values_scratch, None, self.p, 0.99) {
            Ok(e) => e,
            Err(_) => return f64::NEG_INFINITY,
        };
        let restr = match mc_norm_from_values(&self.values_scratch, Some(mask), self.p, 0.99) {
            Ok(e) => e,
            Err(_) => return f64::NEG_INFINITY,
        };
        if !(restr.value > 0.0) || !full.value.is_finite() {
            return f64::NEG_INFINITY;
        }
        full.value / restr.value
    }
}

fn window_set(a: f64, length: f64) -> SetSpec {
    SetSpec::Intervals { intervals: vec![(a, a + length)] }
}

fn mask_for(set: &SetSpec, cloud: &crate::measures::Points) -> Vec<bool> {
    cloud.iter().map(|x| set.indicator_unchecked(x)).collect()
}

fn dense_poly(n: usize, indices: &[Vec<u32>], coeffs: &[f64]) -> Polynomial {
    let terms = indices
        .iter()
        .zip(coeffs)
        .map(|(e, &c)| (e.clone(), c))
        .collect::<Vec<_>>();
    Polynomial::new(n, terms).expect("indices carry arity n")
}

/// Runs the search. Monomial families are enumerated; dense families are
/// hill-climbed coordinate-by-coordinate, accepting only improvements, with
/// fresh restarts that keep the global best.
pub fn search_extremal(spec: &SearchSpec) -> Result<SearchResult, CertifyError> {
    spec.validate()?;
    let cloud = spec.measure.sample(spec.samples, spec.seed)?;
    let support = spec.measure.support_1d();
    let window_range = match (&spec.set, support) {
        (SetFamily::Window { length }, Some((lo, hi))) => {
            let hi = if hi.is_finite() {
                hi
            } else {
                cloud.iter().map(|x| x[0]).fold(0.0f64, f64::max)
            };
            if hi - lo <= *length {
                return Err(CertifyError::BadSpec("window length exceeds the support".into()));
            }
            Some((lo, hi - length))
        }
        (SetFamily::Window { .. }, None) => {
            return Err(CertifyError::BadSpec("window sets need an interval-supported measure".into()))
        }
        (SetFamily::Fixed { .. }, _) => None,
    };

    let mut obj = Objective { values_scratch: Vec::new(), cloud: &cloud, p: spec.p, evaluations: 0 };
    let mut trace = Vec::new();
    let mut best_ratio = f64::NEG_INFINITY;
    let mut best_poly: Option<Polynomial> = None;
    let mut best_set: Option<SetSpec> = None;

    match spec.family {
        SearchFamily::Monomials { d_max } => {
            let set = match &spec.set {
                SetFamily::Fixed { set } => set.clone(),
                SetFamily::Window { length } => {
                    let (lo, _) = window_range.expect("validated window");
                    window_set(lo, *length)
                }
            };
            let mask = mask_for(&set, &cloud);
            for k in 1..=d_max {
                let mut coeffs = vec![0.0; k + 1];
                coeffs[k] = 1.0;
                let poly = Polynomial::univariate(&coeffs);
                let r = obj.ratio(&poly, &mask);
                if r > best_ratio {
                    best_ratio = r;
                    best_poly = Some(poly);
                    best_set = Some(set.clone());
                }
                trace.push(best_ratio);
            }
        }
        SearchFamily::DenseCoefficients { n, d } => {
            let indices = multi_indices(n, d);
            for restart in 0..spec.restarts {
                let mut rng = substream(spec.seed, &[stream::SEARCH, restart as u64]);
                let mut coeffs: Vec<f64> =
                    (0..indices.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
                let mut window_a = window_range.map(|(lo, hi)| rng.random_range(lo..hi));
                let current_set = |a: Option<f64>| match (&spec.set, a) {
                    (SetFamily::Fixed { set }, _) => set.clone(),
                    (SetFamily::Window { length }, Some(a)) => window_set(a, *length),
                    (SetFamily::Window { .. }, None) => unreachable!("window position exists"),
                };
                let mut mask = mask_for(&current_set(window_a), &cloud);
                let mut local =
                    obj.ratio(&dense_poly(n, &indices, &coeffs), &mask);
                if local > best_ratio {
                    best_ratio = local;
                    best_poly = Some(dense_poly(n, &indices, &coeffs));
                    best_set = Some(current_set(window_a));
                }
                for iter in 0..spec.iterations {
                    let sigma = spec.step * spec.decay.powi(iter as i32);
                    for j in 0..coeffs.len() {
                        let mut rng =
                            substream(spec.seed, &[stream::SEARCH, restart as u64, iter as u64, j as u64]);
                        let bump: f64 = StandardNormal.sample(&mut rng);
                        let saved = coeffs[j];
                        coeffs[j] += sigma * bump;
                        let r = obj.ratio(&dense_poly(n, &indices, &coeffs), &mask);
                        if r > local {
                            local = r;
                        } else {
                            coeffs[j] = saved;
                        }
                    }
                    if let (Some(a), Some((lo, hi))) = (window_a, window_range) {
                        let mut rng = substream(
                            spec.seed,
                            &[stream::SEARCH, restart as u64, iter as u64, 0xA0],
                        );
                        let bump: f64 = StandardNormal.sample(&mut rng);
                        let a_new = (a + sigma * bump * (hi - lo)).clamp(lo, hi);
                        let mask_new = mask_for(&window_set(a_new, match &spec.set {
                            SetFamily::Window { length } => *length,
                            SetFamily::Fixed { .. } => unreachable!("window branch"),
                        }), &cloud);
                        let r = obj.ratio(&dense_poly(n, &indices, &coeffs), &mask_new);
                        if r > local {
                            local = r;
                            window_a = Some(a_new);
                            mask = mask_new;
                        }
                    }
                    if local > best_ratio {
                        best_ratio = local;
                        best_poly = Some(dense_poly(n, &indices, &coeffs));
                        best_set = Some(current_set(window_a));
                    }
                    trace.push(best_ratio);
                }
            }
        }
    }

    let best_poly = best_poly
        .ok_or_else(|| CertifyError::BadSpec("search found no admissible instance".into()))?;
    let best_set = best_set.expect("set recorded with the best instance");

    // Point-estimate constant at the best instance.
    let mask = mask_for(&best_set, &cloud);
    let values = magnitudes(&best_poly, &cloud);
    let full = mc_norm_from_values(&values, None, spec.p, 0.99)?;
    let restr = mc_norm_from_values(&values, Some(&mask), spec.p, 0.99)?;
    let mu_hat = mask.iter().filter(|b| **b).count() as f64 / cloud.len() as f64;
    let c_hat = instance_c_hat(spec.p, best_poly.degree(), restr.value, full.value, mu_hat);

    Ok(SearchResult {
        best_poly,
        best_ratio,
        c_hat,
        best_set,
        trace,
        evaluations: obj.evaluations,
    })
}
