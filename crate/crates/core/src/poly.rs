//! Multivariate polynomials in collapsed monomial form, polynomial maps
//! into R^m with a selectable codomain norm, and trigonometric polynomials
//! given by lists of linear functionals.
//!
//! Everything here is immutable after construction and safe to share
//! across workers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("direction vector must be nonzero")]
    ZeroDirection,
    #[error("polynomial map needs at least one component")]
    EmptyMap,
    #[error("component dimensions disagree: {0} vs {1}")]
    MixedDimensions(usize, usize),
    #[error("invalid polynomial text at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// One monomial: coefficient times the product of `x_i^exponents[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub exponents: Vec<u32>,
    pub coefficient: f64,
}

/// A real polynomial on R^n stored as a sparse map from exponent
/// multi-indices to coefficients. Zero-coefficient terms are never stored;
/// the zero polynomial has degree 0 by convention.
#[derive(Debug, Clone, Serialize)]
pub struct Polynomial {
    dim: usize,
    degree: usize,
    terms: Vec<Term>,
    /// Dense coefficients lowest-first, kept when `dim == 1` so univariate
    /// evaluation can run as a Horner pass.
    #[serde(skip)]
    dense_1d: Option<Vec<f64>>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.terms == other.terms
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        #[derive(Deserialize)]
        struct Shadow {
            dim: usize,
            #[serde(default)]
            #[allow(dead_code)]
            degree: usize,
            terms: Vec<Term>,
        }
        let shadow = Shadow::deserialize(deserializer)?;
        let terms = shadow.terms.into_iter().map(|t| (t.exponents, t.coefficient));
        Polynomial::new(shadow.dim, terms).map_err(serde::de::Error::custom)
    }
}

impl Polynomial {
    /// Build from (exponents, coefficient) pairs. Duplicate exponent tuples
    /// are summed; zero coefficients are pruned.
    pub fn new(
        dim: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, f64)>,
    ) -> Result<Self, PolyError> {
        let mut map: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (exps, coeff) in terms {
            if exps.len() != dim {
                return Err(PolyError::DimensionMismatch { expected: dim, got: exps.len() });
            }
            *map.entry(exps).or_insert(0.0) += coeff;
        }
        map.retain(|_, c| *c != 0.0);
        let degree = map
            .keys()
            .map(|e| e.iter().map(|&k| k as usize).sum())
            .max()
            .unwrap_or(0);
        let terms: Vec<Term> = map
            .into_iter()
            .map(|(exponents, coefficient)| Term { exponents, coefficient })
            .collect();
        let mut poly = Polynomial { dim, degree, terms, dense_1d: None };
        poly.rebuild_dense();
        Ok(poly)
    }

    fn rebuild_dense(&mut self) {
        self.dense_1d = if self.dim == 1 {
            let mut coeffs = vec![0.0; self.degree + 1];
            for t in &self.terms {
                coeffs[t.exponents[0] as usize] = t.coefficient;
            }
            Some(coeffs)
        } else {
            None
        };
    }

    /// Constant polynomial on R^n.
    pub fn constant(dim: usize, value: f64) -> Self {
        Polynomial::new(dim, [(vec![0u32; dim], value)]).expect("constant term has right arity")
    }

    /// Univariate polynomial from dense coefficients, lowest degree first.
    pub fn univariate(coeffs: &[f64]) -> Self {
        let terms = coeffs.iter().enumerate().map(|(k, &c)| (vec![k as u32], c));
        Polynomial::new(1, terms).expect("univariate arity is 1")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Dense univariate coefficients (lowest first), when `dim == 1`.
    pub fn dense_coefficients(&self) -> Option<&[f64]> {
        self.dense_1d.as_deref()
    }

    /// Evaluate at `x`; errors if `x` has the wrong arity.
    pub fn eval(&self, x: &[f64]) -> Result<f64, PolyError> {
        if x.len() != self.dim {
            return Err(PolyError::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(self.eval_unchecked(x))
    }

    /// Evaluation without the arity check, for hot loops that validated once.
    pub fn eval_unchecked(&self, x: &[f64]) -> f64 {
        if let Some(coeffs) = &self.dense_1d {
            return horner(coeffs, x[0]);
        }
        let mut acc = 0.0;
        for t in &self.terms {
            let mut m = t.coefficient;
            for (xi, &e) in x.iter().zip(&t.exponents) {
                m *= pow_u32(*xi, e);
            }
            acc += m;
        }
        acc
    }

    /// Scale every coefficient by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Self {
        let terms = self.terms.iter().map(|t| (t.exponents.clone(), t.coefficient * alpha));
        Polynomial::new(self.dim, terms).expect("arity preserved")
    }

    /// Restrict to the line t -> a + t v as an exact univariate polynomial
    /// in t. The degree cannot grow.
    pub fn restrict_to_line(&self, a: &[f64], v: &[f64]) -> Result<Polynomial, PolyError> {
        if a.len() != self.dim {
            return Err(PolyError::DimensionMismatch { expected: self.dim, got: a.len() });
        }
        if v.len() != self.dim {
            return Err(PolyError::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        if v.iter().all(|&c| c == 0.0) {
            return Err(PolyError::ZeroDirection);
        }
        let mut out = vec![0.0; self.degree + 1];
        let mut factor = Vec::with_capacity(self.degree + 1);
        let mut tmp = Vec::with_capacity(self.degree + 1);
        for term in &self.terms {
            // Expand coeff * prod_i (a_i + v_i t)^{e_i} by binomial convolution.
            factor.clear();
            factor.push(term.coefficient);
            for i in 0..self.dim {
                for _ in 0..term.exponents[i] {
                    tmp.clear();
                    tmp.resize(factor.len() + 1, 0.0);
                    for (k, &c) in factor.iter().enumerate() {
                        tmp[k] += c * a[i];
                        tmp[k + 1] += c * v[i];
                    }
                    std::mem::swap(&mut factor, &mut tmp);
                }
            }
            for (k, &c) in factor.iter().enumerate() {
                out[k] += c;
            }
        }
        Ok(Polynomial::univariate(&out))
    }

    /// Text form used by the CLI instance dump/load: one term per line,
    /// `coefficient e_1 e_2 ... e_n`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if self.terms.is_empty() {
            s.push('0');
            for _ in 0..self.dim {
                s.push_str(" 0");
            }
            s.push('\n');
            return s;
        }
        for t in &self.terms {
            s.push_str(&format!("{}", t.coefficient));
            for &e in &t.exponents {
                s.push_str(&format!(" {e}"));
            }
            s.push('\n');
        }
        s
    }

    /// Parse the text form. Dimension is inferred from the first line.
    pub fn from_text(text: &str) -> Result<Self, PolyError> {
        let mut dim: Option<usize> = None;
        let mut terms = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let coeff_tok = parts.next().ok_or_else(|| PolyError::Parse {
                line: idx + 1,
                reason: "empty term line".into(),
            })?;
            let coefficient: f64 = coeff_tok.parse().map_err(|_| PolyError::Parse {
                line: idx + 1,
                reason: format!("bad coefficient `{coeff_tok}`"),
            })?;
            let exps: Result<Vec<u32>, _> = parts.map(|tok| tok.parse::<u32>()).collect();
            let exponents = exps.map_err(|_| PolyError::Parse {
                line: idx + 1,
                reason: "bad exponent token".into(),
            })?;
            match dim {
                None => {
                    if exponents.is_empty() {
                        return Err(PolyError::Parse {
                            line: idx + 1,
                            reason: "a term needs at least one exponent column".into(),
                        });
                    }
                    dim = Some(exponents.len());
                }
                Some(n) if n != exponents.len() => {
                    return Err(PolyError::Parse {
                        line: idx + 1,
                        reason: format!("expected {n} exponents, got {}", exponents.len()),
                    });
                }
                _ => {}
            }
            terms.push((exponents, coefficient));
        }
        let dim = dim.ok_or_else(|| PolyError::Parse {
            line: 0,
            reason: "no terms found".into(),
        })?;
        Polynomial::new(dim, terms)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_text().trim_end())
    }
}

impl FromStr for Polynomial {
    type Err = PolyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Polynomial::from_text(s)
    }
}

#[inline]
fn horner(coeffs: &[f64], t: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * t + c;
    }
    acc
}

#[inline]
fn pow_u32(base: f64, mut e: u32) -> f64 {
    let mut acc = 1.0;
    let mut b = base;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        b *= b;
        e >>= 1;
    }
    acc
}

/// Norm on the codomain R^m of a polynomial map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodomainNorm {
    Euclidean,
    Sup,
    One,
}

impl CodomainNorm {
    pub fn apply(self, v: &[f64]) -> f64 {
        match self {
            CodomainNorm::Euclidean => v.iter().map(|c| c * c).sum::<f64>().sqrt(),
            CodomainNorm::Sup => v.iter().fold(0.0, |m, c| m.max(c.abs())),
            CodomainNorm::One => v.iter().map(|c| c.abs()).sum(),
        }
    }
}

/// Polynomial map R^n -> R^m with a chosen norm on the codomain. The map
/// degree is the maximum component degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialMap {
    components: Vec<Polynomial>,
    codomain_norm: CodomainNorm,
}

impl PolynomialMap {
    pub fn new(
        components: Vec<Polynomial>,
        codomain_norm: CodomainNorm,
    ) -> Result<Self, PolyError> {
        let first = components.first().ok_or(PolyError::EmptyMap)?;
        let dim = first.dim();
        for c in &components {
            if c.dim() != dim {
                return Err(PolyError::MixedDimensions(dim, c.dim()));
            }
        }
        Ok(PolynomialMap { components, codomain_norm })
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn degree(&self) -> usize {
        self.components.iter().map(|c| c.degree()).max().unwrap_or(0)
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn codomain_norm(&self) -> CodomainNorm {
        self.codomain_norm
    }

    /// ||F(x)||_Y, the integrand of every L^p norm of the map.
    pub fn eval_norm(&self, x: &[f64]) -> Result<f64, PolyError> {
        if x.len() != self.dim() {
            return Err(PolyError::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(self.eval_norm_unchecked(x))
    }

    pub fn eval_norm_unchecked(&self, x: &[f64]) -> f64 {
        // m <= 3 in every suite; avoid allocating per point.
        let mut buf = [0.0f64; 8];
        if self.components.len() <= buf.len() {
            for (slot, c) in buf.iter_mut().zip(&self.components) {
                *slot = c.eval_unchecked(x);
            }
            self.codomain_norm.apply(&buf[..self.components.len()])
        } else {
            let values: Vec<f64> =
                self.components.iter().map(|c| c.eval_unchecked(x)).collect();
            self.codomain_norm.apply(&values)
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        PolynomialMap {
            components: self.components.iter().map(|c| c.scaled(alpha)).collect(),
            codomain_norm: self.codomain_norm,
        }
    }
}

/// Trigonometric polynomial f(x) = sum_k exp(i <l_k, x>); its degree is the
/// number of functionals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    functionals: Vec<Vec<f64>>,
}

impl TrigPolynomial {
    pub fn new(functionals: Vec<Vec<f64>>) -> Result<Self, PolyError> {
        let first = functionals.first().ok_or(PolyError::EmptyMap)?;
        let dim = first.len();
        for l in &functionals {
            if l.len() != dim {
                return Err(PolyError::MixedDimensions(dim, l.len()));
            }
        }
        Ok(TrigPolynomial { functionals })
    }

    pub fn dim(&self) -> usize {
        self.functionals[0].len()
    }

    /// Declared degree: the number of functionals.
    pub fn degree(&self) -> usize {
        self.functionals.len()
    }

    pub fn functionals(&self) -> &[Vec<f64>] {
        &self.functionals
    }

    /// |f(x)| = |sum_k e^{i <l_k, x>}|, always within [0, degree].
    pub fn eval_modulus(&self, x: &[f64]) -> Result<f64, PolyError> {
        if x.len() != self.dim() {
            return Err(PolyError::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(self.eval_modulus_unchecked(x))
    }

    pub fn eval_modulus_unchecked(&self, x: &[f64]) -> f64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for l in &self.functionals {
            let theta: f64 = l.iter().zip(x).map(|(a, b)| a * b).sum();
            re += theta.cos();
            im += theta.sin();
        }
        (re * re + im * im).sqrt()
    }

    /// Restriction to the line t -> a + t v: phases <l_k, a> and angular
    /// frequencies <l_k, v>, evaluated as a univariate modulus.
    pub fn restrict_to_line(&self, a: &[f64], v: &[f64]) -> Result<TrigLine, PolyError> {
        if a.len() != self.dim() {
            return Err(PolyError::DimensionMismatch { expected: self.dim(), got: a.len() });
        }
        if v.len() != self.dim() {
            return Err(PolyError::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        if v.iter().all(|&c| c == 0.0) {
            return Err(PolyError::ZeroDirection);
        }
        let dot = |l: &[f64], y: &[f64]| l.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
        Ok(TrigLine {
            phases: self.functionals.iter().map(|l| dot(l, a)).collect(),
            frequencies: self.functionals.iter().map(|l| dot(l, v)).collect(),
        })
    }
}

/// A trigonometric polynomial restricted to a line, as a function of t.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigLine {
    phases: Vec<f64>,
    frequencies: Vec<f64>,
}

impl TrigLine {
    pub fn degree(&self) -> usize {
        self.phases.len()
    }

    pub fn modulus(&self, t: f64) -> f64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (phi, omega) in self.phases.iter().zip(&self.frequencies) {
            let theta = phi + omega * t;
            re += theta.cos();
            im += theta.sin();
        }
        (re * re + im * im).sqrt()
    }
}

/// Coefficient law for random polynomial generation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientLaw {
    /// i.i.d. standard normal coefficients.
    StandardNormal,
    /// Standard normal with the top-degree pure-power coefficients scaled up;
    /// Gaussian ensembles alone rarely approach the equality cases of the
    /// inequalities, the spike pushes mass toward them.
    Spiked { magnitude: f64 },
}

impl Default for CoefficientLaw {
    fn default() -> Self {
        CoefficientLaw::StandardNormal
    }
}

/// All exponent multi-indices of total degree <= d in n variables,
/// in lexicographic order. C(n+d, d) of them.
pub fn multi_indices(n: usize, d: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    fn rec(out: &mut Vec<Vec<u32>>, current: &mut Vec<u32>, pos: usize, left: u32) {
        if pos == current.len() {
            out.push(current.clone());
            return;
        }
        for e in 0..=left {
            current[pos] = e;
            rec(out, current, pos + 1, left - e);
        }
        current[pos] = 0;
    }
    rec(&mut out, &mut current, 0, d as u32);
    out
}

/// Dense random polynomial: all C(n+d, d) monomials with i.i.d. coefficients
/// from `law`. Identical `(n, d, law, seed)` give identical polynomials.
pub fn random_polynomial(n: usize, d: usize, law: CoefficientLaw, seed: u64) -> Polynomial {
    assert!(n >= 1, "need at least one variable");
    let mut rng = rng::substream(seed, &[rng::stream::POLY, n as u64, d as u64]);
    let indices = multi_indices(n, d);
    let terms = indices.into_iter().map(|exps| {
        let mut c: f64 = StandardNormal.sample(&mut rng);
        if let CoefficientLaw::Spiked { magnitude } = law {
            let total: u32 = exps.iter().sum();
            let pure_power = exps.iter().filter(|&&e| e > 0).count() <= 1;
            if total == d as u32 && pure_power {
                c *= magnitude;
            }
        }
        (exps, c)
    });
    Polynomial::new(n, terms).expect("generated arity is n")
}

/// Random direction on the unit sphere of R^n.
pub fn random_unit_vector(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Anything the norm engine can integrate: a non-negative magnitude field
/// of known polynomial degree.
pub trait ScalarField: Sync {
    fn dim(&self) -> usize;
    fn degree(&self) -> usize;
    /// |f(x)| (or ||f(x)||_Y for maps); arity is assumed validated.
    fn magnitude(&self, x: &[f64]) -> f64;
    /// Exact-path hook: the underlying univariate polynomial, when there is one.
    fn as_univariate(&self) -> Option<&Polynomial> {
        None
    }
}

impl ScalarField for Polynomial {
    fn dim(&self) -> usize {
        Polynomial::dim(self)
    }
    fn degree(&self) -> usize {
        Polynomial::degree(self)
    }
    fn magnitude(&self, x: &[f64]) -> f64 {
        self.eval_unchecked(x).abs()
    }
    fn as_univariate(&self) -> Option<&Polynomial> {
        (self.dim == 1).then_some(self)
    }
}

impl ScalarField for PolynomialMap {
    fn dim(&self) -> usize {
        PolynomialMap::dim(self)
    }
    fn degree(&self) -> usize {
        PolynomialMap::degree(self)
    }
    fn magnitude(&self, x: &[f64]) -> f64 {
        self.eval_norm_unchecked(x)
    }
}

impl ScalarField for TrigPolynomial {
    fn dim(&self) -> usize {
        TrigPolynomial::dim(self)
    }
    fn degree(&self) -> usize {
        TrigPolynomial::degree(self)
    }
    fn magnitude(&self, x: &[f64]) -> f64 {
        self.eval_modulus_unchecked(x)
    }
}
