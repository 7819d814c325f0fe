//! Exactness check for the restricted-norm factor: the family t^d on the
//! exponential measure over the halfline, restricted to A = [0, ε]. Every
//! quantity here has a closed form through the gamma function, so the
//! sharpness of the bound is measured without any sampling.

use serde::{Deserialize, Serialize};

use crate::bounds::{theorem1_factor, BoundError};
use crate::special::{factorial, gamma_p};

/// Closed-form audit of one (d, ε) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TightnessResult {
    pub d: u32,
    pub epsilon: f64,
    /// ‖t^d‖₁ over the exponential measure: exactly d!.
    pub full_norm: f64,
    /// Stirling floor (d/e)^d ≤ d!.
    pub stirling_lower: f64,
    /// ∫₀^ε t^d e^{-t} dt, the mass of the monomial near zero.
    pub restricted_integral: f64,
    /// Elementary ceiling ε^{d+1}/(d+1) ≥ the restricted integral.
    pub epsilon_bound: f64,
    /// restricted_integral / d!: how little of the norm lives near zero.
    pub mass_ratio: f64,
    /// μ([0, ε]) = 1 - e^{-ε}.
    pub mu_a: f64,
    /// Normalized restricted 1-norm: restricted_integral / μ(A).
    pub restricted_norm: f64,
    /// Restricted-norm factor at p = 1 for this (d, μ(A), c).
    pub bound_factor: f64,
    /// The certified floor bound_factor · d! ≤ restricted_norm.
    pub bound_value: f64,
}

/// Evaluates the whole closed-form family at one (d, ε, c).
pub fn tightness_exponential(d: u32, epsilon: f64, c: f64) -> Result<TightnessResult, BoundError> {
    if d < 1 {
        return Err(BoundError::BadDegree(d));
    }
    if !(epsilon > 0.0) {
        return Err(BoundError::BadFraction(epsilon));
    }
    if !(c > 0.0) {
        return Err(BoundError::BadConstant(c));
    }
    let full_norm = factorial(d);
    let df = d as f64;
    let stirling_lower = (df / std::f64::consts::E).powi(d as i32);
    let restricted_integral = gamma_p(df + 1.0, epsilon)
        .expect("positive shape and argument")
        * full_norm;
    let epsilon_bound = epsilon.powi(d as i32 + 1) / (df + 1.0);
    let mu_a = -f64::exp_m1(-epsilon);
    let restricted_norm = restricted_integral / mu_a;
    let bound_factor = theorem1_factor(1.0, d, mu_a, c)?;
    Ok(TightnessResult {
        d,
        epsilon,
        full_norm,
        stirling_lower,
        restricted_integral,
        epsilon_bound,
        mass_ratio: restricted_integral / full_norm,
        mu_a,
        restricted_norm,
        bound_factor,
        bound_value: bound_factor * full_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::quadrature::{quadrature_1d, Domain1D};

    #[test]
    fn cubed_at_half_matches_closed_forms() {
        let r = tightness_exponential(3, 0.5, 4.0).unwrap();
        assert_eq!(r.full_norm, 6.0);
        assert_eq!(r.epsilon_bound, 0.015625);
        let stirling = (3.0f64 / std::f64::consts::E).powi(3);
        assert!((r.stirling_lower - stirling).abs() < 1e-15);
        assert!((stirling - 1.3443).abs() < 1e-4);
        assert!((r.mu_a - (1.0 - (-0.5f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn restricted_integral_matches_quadrature_route() {
        for d in 1u32..=10 {
            for &eps in &[0.1, 0.5, 1.0] {
                let r = tightness_exponential(d, eps, 4.0).unwrap();
                let direct = quadrature_1d(
                    |t| t.powi(d as i32) * (-t).exp(),
                    Domain1D::Interval { lo: 0.0, hi: eps },
                    1e-13,
                    &[],
                )
                .unwrap();
                assert!(
                    (r.restricted_integral - direct).abs() <= 1e-12 * direct.max(1e-30),
                    "d={d} eps={eps}: {} vs {}",
                    r.restricted_integral,
                    direct
                );
            }
        }
    }

    #[test]
    fn invariants_hold_across_grid() {
        for d in 1u32..=10 {
            for &eps in &[0.1, 0.5, 1.0, 2.0] {
                let r = tightness_exponential(d, eps, 4.0).unwrap();
                // Sandwich e^{-ε}·ε^{d+1}/(d+1) ≤ ∫₀^ε t^d e^{-t} ≤ ε^{d+1}/(d+1).
                assert!(r.restricted_integral <= r.epsilon_bound * (1.0 + 1e-14));
                assert!(r.restricted_integral >= (-eps).exp() * r.epsilon_bound * (1.0 - 1e-14));
                assert!(r.full_norm >= r.stirling_lower);
                // The certified floor really sits below the achieved norm.
                assert!(r.bound_value <= r.restricted_norm);
                assert!(r.mass_ratio > 0.0 && r.mass_ratio < 1.0);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(tightness_exponential(0, 0.5, 4.0).is_err());
        assert!(tightness_exponential(3, 0.0, 4.0).is_err());
        assert!(tightness_exponential(3, 0.5, 0.0).is_err());
    }
}
