//! Log-concave probability measures with deterministic sampling, membership
//! oracles for the convex bodies, measurable-set specifications, and exact
//! 1-D quadrature. A probability measure μ is log-concave when
//! μ(αA + (1−α)B) ≥ μ(A)^α μ(B)^{1−α} for all α ∈ (0,1); every kind here
//! has that property (uniform laws on convex bodies, the exponential law,
//! the standard gaussian), and the 1-D kinds are spot-checked for it in
//! the tests.

mod hit_and_run;
pub mod intervals;
pub mod quadrature;
pub mod roots;
mod sets;

pub use intervals::IntervalSet;
pub use quadrature::{quadrature_1d, Domain1D, DEFAULT_TOL, HALFLINE_TRUNCATION};
pub use sets::SetSpec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{self, stream};

/// Dimension guard: hit-and-run mixing and Monte-Carlo budgets are tuned
/// for desk scale.
pub const MAX_DIM: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension {got} exceeds the supported maximum {MAX_DIM}")]
    DimensionTooLarge { got: usize },
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("kind is fixed to dimension {expected}, got {got}")]
    KindDimension { expected: usize, got: usize },
    #[error("no direct sampler for this kind; use hit-and-run")]
    NoDirectSampler,
    #[error("measure has no body (not a uniform law on a convex body)")]
    NoBody,
    #[error("body has empty interior")]
    EmptyInterior,
    #[error("body is unbounded")]
    UnboundedBody,
    #[error("bad polytope data: {0}")]
    BadPolytope(String),
    #[error("bad interval: lo {lo} must be below hi {hi}")]
    BadInterval { lo: f64, hi: f64 },
    #[error("quadrature did not converge: residual error {error:e}")]
    QuadratureDidNotConverge { error: f64 },
    #[error("integrand is not finite at {at}")]
    NonFiniteIntegrand { at: f64 },
}

/// A batch of points in R^n stored flat, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    dim: usize,
    data: Vec<f64>,
}

impl Points {
    pub fn from_flat(dim: usize, data: Vec<f64>) -> Self {
        assert!(dim >= 1 && data.len() % dim == 0);
        Points { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureKind {
    /// Uniform law on [-1, 1]^n.
    UniformBox,
    /// Uniform law on the closed unit euclidean ball.
    UniformBall,
    /// Uniform law on the standard simplex {x_i ≥ 0, Σ x_i ≤ 1}.
    UniformSimplex,
    /// Uniform law on {x : A x ≤ b}, H-representation.
    UniformPolytope { a: Vec<Vec<f64>>, b: Vec<f64> },
    /// Density e^{-t} on [0, ∞); 1-D.
    ExponentialHalfline,
    /// Standard gaussian on R^n.
    GaussianStandard,
    /// Uniform law on [a, b]; 1-D.
    IntervalUniform { a: f64, b: f64 },
}

/// How to draw from the measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "sampler", rename_all = "snake_case")]
pub enum SamplerPolicy {
    Direct,
    HitAndRun { burn_in: usize, thinning: usize },
}

impl SamplerPolicy {
    /// Standard chain defaults for dimension n: burn-in 1000·n, thinning n.
    pub fn hit_and_run_default(n: usize) -> Self {
        SamplerPolicy::HitAndRun { burn_in: 1000 * n, thinning: n }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    kind: MeasureKind,
    dim: usize,
    policy: SamplerPolicy,
    /// Interior point of the body, found at construction for polytopes and
    /// known in closed form otherwise; chain start.
    #[serde(skip)]
    interior: Option<Vec<f64>>,
}

impl MeasureSpec {
    pub fn new(kind: MeasureKind, dim: usize, policy: SamplerPolicy) -> Result<Self, MeasureError> {
        if dim == 0 {
            return Err(MeasureError::ZeroDimension);
        }
        if dim > MAX_DIM {
            return Err(MeasureError::DimensionTooLarge { got: dim });
        }
        match &kind {
            MeasureKind::ExponentialHalfline | MeasureKind::IntervalUniform { .. } if dim != 1 => {
                return Err(MeasureError::KindDimension { expected: 1, got: dim });
            }
            MeasureKind::IntervalUniform { a, b } if !(a < b) => {
                return Err(MeasureError::BadInterval { lo: *a, hi: *b });
            }
            _ => {}
        }
        let interior = match &kind {
            MeasureKind::UniformBox | MeasureKind::UniformBall => Some(vec![0.0; dim]),
            MeasureKind::UniformSimplex => Some(vec![1.0 / (dim as f64 + 1.0); dim]),
            MeasureKind::IntervalUniform { a, b } => Some(vec![0.5 * (a + b)]),
            MeasureKind::UniformPolytope { a, b } => Some(polytope_interior(a, b, dim)?),
            _ => None,
        };
        Ok(MeasureSpec { kind, dim, policy, interior })
    }

    pub fn uniform_box(n: usize) -> Result<Self, MeasureError> {
        MeasureSpec::new(MeasureKind::UniformBox, n, SamplerPolicy::Direct)
    }

    pub fn uniform_ball(n: usize) -> Result<Self, MeasureError> {
        MeasureSpec::new(MeasureKind::UniformBall, n, SamplerPolicy::Direct)
    }

    pub fn uniform_simplex(n: usize) -> Result<Self, MeasureError> {
        MeasureSpec::new(MeasureKind::UniformSimplex, n, SamplerPolicy::Direct)
    }

    pub fn uniform_polytope(a: Vec<Vec<f64>>, b: Vec<f64>, n: usize) -> Result<Self, MeasureError> {
        MeasureSpec::new(
            MeasureKind::UniformPolytope { a, b },
            n,
            SamplerPolicy::hit_and_run_default(n),
        )
    }

    pub fn exponential_halfline() -> Result<Self, MeasureError> {
        MeasureSpec::new(MeasureKind::ExponentialHalfline, 1, SamplerPolicy::Direct)
    }

    pub fn gaussian_standard(n: usize) -> Result<Self, MeasureError> {
        MeasureSpec::new(MeasureKind::GaussianStandard, n, SamplerPolicy::Direct)
    }

    pub fn interval_uniform(a: f64, b: f64) -> Result<Self, MeasureError> {
        MeasureSpec::new(MeasureKind::IntervalUniform { a, b }, 1, SamplerPolicy::Direct)
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn policy(&self) -> SamplerPolicy {
        self.policy
    }

    pub fn with_policy(mut self, policy: SamplerPolicy) -> Self {
        self.policy = policy;
        self
    }

    fn has_body(&self) -> bool {
        self.interior.is_some()
    }

    /// True iff x lies in the body (closed convention: boundary counts).
    /// Errors for measures without a body and on dimension mismatch.
    pub fn membership(&self, x: &[f64]) -> Result<bool, MeasureError> {
        if x.len() != self.dim {
            return Err(MeasureError::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        if !self.has_body() {
            return Err(MeasureError::NoBody);
        }
        Ok(match &self.kind {
            MeasureKind::UniformBox => x.iter().all(|c| c.abs() <= 1.0),
            MeasureKind::UniformBall => x.iter().map(|c| c * c).sum::<f64>() <= 1.0,
            MeasureKind::UniformSimplex => {
                x.iter().all(|&c| c >= 0.0) && x.iter().sum::<f64>() <= 1.0
            }
            MeasureKind::UniformPolytope { a, b } => a.iter().zip(b).all(|(row, bi)| {
                row.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() <= *bi
            }),
            MeasureKind::IntervalUniform { a, b } => *a <= x[0] && x[0] <= *b,
            _ => unreachable!("kinds without body rejected above"),
        })
    }

    /// Support as an interval for the 1-D kinds with exact paths.
    pub fn support_1d(&self) -> Option<(f64, f64)> {
        match &self.kind {
            MeasureKind::IntervalUniform { a, b } => Some((*a, *b)),
            MeasureKind::ExponentialHalfline => Some((0.0, f64::INFINITY)),
            _ => None,
        }
    }

    /// Density on the 1-D support, for the quadrature path.
    pub fn density_1d(&self, t: f64) -> Option<f64> {
        match &self.kind {
            MeasureKind::IntervalUniform { a, b } => {
                Some(if *a <= t && t <= *b { 1.0 / (b - a) } else { 0.0 })
            }
            MeasureKind::ExponentialHalfline => Some(if t >= 0.0 { (-t).exp() } else { 0.0 }),
            _ => None,
        }
    }

    /// Exact measure of an interval union, for the 1-D kinds.
    pub fn interval_set_measure(&self, set: &IntervalSet) -> Option<f64> {
        match &self.kind {
            MeasureKind::IntervalUniform { a, b } => {
                Some(set.clip(*a, *b).total_length() / (b - a))
            }
            MeasureKind::ExponentialHalfline => {
                let mass: f64 = set
                    .clip(0.0, f64::INFINITY)
                    .items()
                    .iter()
                    .map(|&(lo, hi)| (-lo).exp() - (-hi).exp())
                    .sum();
                Some(mass)
            }
            _ => None,
        }
    }

    /// i.i.d. draws from the exact law. Sample i depends only on
    /// (spec, seed, i) through its own counter-keyed substream, so output
    /// is identical across worker layouts and any prefix is stable.
    pub fn sample_direct(&self, m: usize, seed: u64) -> Result<Points, MeasureError> {
        if matches!(self.kind, MeasureKind::UniformPolytope { .. }) {
            return Err(MeasureError::NoDirectSampler);
        }
        let n = self.dim;
        let mut data = vec![0.0f64; m * n];
        for (i, slot) in data.chunks_exact_mut(n).enumerate() {
            let mut rng = rng::sample_rng(seed, stream::AMBIENT, i as u64);
            self.fill_direct(slot, &mut rng);
        }
        Ok(Points::from_flat(n, data))
    }

    fn fill_direct(&self, out: &mut [f64], rng: &mut rand_chacha::ChaCha8Rng) {
        let n = self.dim;
        match &self.kind {
            MeasureKind::UniformBox => {
                for c in out.iter_mut() {
                    *c = rng.random_range(-1.0..1.0);
                }
            }
            MeasureKind::UniformBall => {
                let mut norm2 = 0.0;
                for c in out.iter_mut() {
                    let g: f64 = StandardNormal.sample(rng);
                    *c = g;
                    norm2 += g * g;
                }
                let norm = norm2.sqrt().max(1e-300);
                let u: f64 = rng.random();
                let r = u.powf(1.0 / n as f64) / norm;
                for c in out.iter_mut() {
                    *c *= r;
                }
            }
            MeasureKind::UniformSimplex => {
                let mut total = 0.0;
                for c in out.iter_mut() {
                    let e = -(1.0 - rng.random::<f64>()).ln();
                    *c = e;
                    total += e;
                }
                total += -(1.0 - rng.random::<f64>()).ln();
                for c in out.iter_mut() {
                    *c /= total;
                }
            }
            MeasureKind::GaussianStandard => {
                for c in out.iter_mut() {
                    *c = StandardNormal.sample(rng);
                }
            }
            MeasureKind::ExponentialHalfline => {
                out[0] = -(1.0 - rng.random::<f64>()).ln();
            }
            MeasureKind::IntervalUniform { a, b } => {
                out[0] = a + (b - a) * rng.random::<f64>();
            }
            MeasureKind::UniformPolytope { .. } => unreachable!("rejected in sample_direct"),
        }
    }

    /// Hit-and-run chain draws for bodies; burn-in and thinning from the
    /// sampler policy (defaults when the policy is Direct).
    pub fn hit_and_run(&self, m: usize, seed: u64) -> Result<Points, MeasureError> {
        let start = self.interior.as_ref().ok_or(MeasureError::NoBody)?;
        let (burn_in, thinning) = match self.policy {
            SamplerPolicy::HitAndRun { burn_in, thinning } => (burn_in, thinning),
            SamplerPolicy::Direct => match SamplerPolicy::hit_and_run_default(self.dim) {
                SamplerPolicy::HitAndRun { burn_in, thinning } => (burn_in, thinning),
                SamplerPolicy::Direct => unreachable!(),
            },
        };
        hit_and_run::run_chain(&self.kind, start, self.dim, m, burn_in, thinning, seed)
    }

    /// Draw m points according to the sampler policy.
    pub fn sample(&self, m: usize, seed: u64) -> Result<Points, MeasureError> {
        match self.policy {
            SamplerPolicy::Direct => {
                if matches!(self.kind, MeasureKind::UniformPolytope { .. }) {
                    self.hit_and_run(m, seed)
                } else {
                    self.sample_direct(m, seed)
                }
            }
            SamplerPolicy::HitAndRun { .. } => self.hit_and_run(m, seed),
        }
    }
}

/// Interior point of {A x ≤ b} by subgradient ascent on the normalized
/// margin min_i (b_i - ⟨a_i, x⟩)/‖a_i‖, followed by axis and random chord
/// probes for boundedness.
fn polytope_interior(a: &[Vec<f64>], b: &[f64], n: usize) -> Result<Vec<f64>, MeasureError> {
    if a.is_empty() {
        return Err(MeasureError::BadPolytope("no rows".into()));
    }
    if a.len() != b.len() {
        return Err(MeasureError::BadPolytope(format!(
            "{} rows in A but {} entries in b",
            a.len(),
            b.len()
        )));
    }
    let mut norms = Vec::with_capacity(a.len());
    for (i, row) in a.iter().enumerate() {
        if row.len() != n {
            return Err(MeasureError::BadPolytope(format!(
                "row {i} has length {}, expected {n}",
                row.len()
            )));
        }
        let norm = row.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 && b[i] < 0.0 {
            return Err(MeasureError::BadPolytope(format!("row {i} is 0 ≤ {}", b[i])));
        }
        norms.push(norm);
    }

    let margin = |x: &[f64]| -> (f64, usize) {
        let mut worst = f64::INFINITY;
        let mut idx = 0;
        for (i, row) in a.iter().enumerate() {
            if norms[i] == 0.0 {
                continue;
            }
            let ax: f64 = row.iter().zip(x).map(|(p, q)| p * q).sum();
            let m = (b[i] - ax) / norms[i];
            if m < worst {
                worst = m;
                idx = i;
            }
        }
        (worst, idx)
    };

    let scale = 1.0
        + b.iter()
            .zip(&norms)
            .filter(|(_, nz)| **nz > 0.0)
            .map(|(bi, nz)| (bi / nz).abs())
            .fold(0.0f64, f64::max);
    let mut x = vec![0.0; n];
    let mut best = x.clone();
    let (mut best_margin, _) = margin(&x);
    for k in 0..4000 {
        let (m, idx) = margin(&x);
        if m > best_margin {
            best_margin = m;
            best.copy_from_slice(&x);
        }
        let step = scale / (1.0 + k as f64).sqrt();
        for (xj, aj) in x.iter_mut().zip(&a[idx]) {
            *xj -= step * aj / norms[idx];
        }
    }
    if best_margin <= 1e-9 * scale {
        return Err(MeasureError::EmptyInterior);
    }

    // Boundedness probes; chord computation reports an infinite chord.
    let kind = MeasureKind::UniformPolytope { a: a.to_vec(), b: b.to_vec() };
    let mut probe_rng = rng::substream(0xB0D7, &[n as u64]);
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        dirs.push(e);
    }
    for _ in 0..n.max(4) {
        dirs.push(crate::poly::random_unit_vector(n, &mut probe_rng));
    }
    for v in &dirs {
        hit_and_run::chord_probe(&kind, &best, v)?;
    }
    Ok(best)
}
