//! Numerical laboratory for integral Remez-type inequalities: polynomial
//! and measure models, norm estimation with error bars, explicit bound
//! formulas, and certification suites that compare the two.

pub mod bounds;
pub mod certifier;
pub mod cli;
pub mod config;
pub mod measures;
pub mod norms;
pub mod poly;
pub mod report;
pub mod rng;
pub mod special;

pub use poly::{
    CodomainNorm, CoefficientLaw, PolyError, Polynomial, PolynomialMap, ScalarField,
    TrigPolynomial,
};
