//! Closed-form bound formulas: the classical and multivariate Remez
//! constants, the two-regime restricted-norm factor, the level-set
//! anti-concentration bound, the class constant 3R², and the trivial
//! negative-exponent bound. All pure functions of their parameters.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("measure fraction must lie in (0, 1], got {0}")]
    BadFraction(f64),
    #[error("exponent must be positive, got {0}")]
    BadExponent(f64),
    #[error("negative-exponent bound needs p < 0, got {0}")]
    BadNegativeExponent(f64),
    #[error("degree must be at least 1, got {0}")]
    BadDegree(u32),
    #[error("dimension must be at least 1, got {0}")]
    BadDimension(u32),
    #[error("constant must be positive, got {0}")]
    BadConstant(f64),
    #[error("norm value must be positive, got {0}")]
    BadNorm(f64),
}

/// Parameter bundle for the bound formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub p: f64,
    pub d: u32,
    pub mu_a: f64,
    pub c: f64,
    pub n: u32,
    pub r: f64,
}

impl BoundParams {
    pub fn validate(&self) -> Result<(), BoundError> {
        if self.d < 1 {
            return Err(BoundError::BadDegree(self.d));
        }
        if !(self.mu_a > 0.0 && self.mu_a <= 1.0) {
            return Err(BoundError::BadFraction(self.mu_a));
        }
        if !(self.c > 0.0) {
            return Err(BoundError::BadConstant(self.c));
        }
        if !(self.r > 0.0) {
            return Err(BoundError::BadConstant(self.r));
        }
        if self.n < 1 {
            return Err(BoundError::BadDimension(self.n));
        }
        Ok(())
    }
}

/// Sup-norm Remez constant (base/frac)^d with configurable base: 4 for
/// scalar and vector polynomial classes, R for other classes (316 for
/// trigonometric ones).
pub fn class_remez_bound(base: f64, d: u32, frac: f64) -> Result<f64, BoundError> {
    if !(frac > 0.0 && frac <= 1.0) {
        return Err(BoundError::BadFraction(frac));
    }
    if !(base > 0.0) {
        return Err(BoundError::BadConstant(base));
    }
    Ok((base / frac).powi(d as i32))
}

/// Classical 1-D Remez bound (4/frac)^d.
pub fn classical_remez_bound(d: u32, frac: f64) -> Result<f64, BoundError> {
    bg_bound(1, d, frac)
}

/// Multivariate bound (4n/frac)^d.
pub fn bg_bound(n: u32, d: u32, frac: f64) -> Result<f64, BoundError> {
    if n < 1 {
        return Err(BoundError::BadDimension(n));
    }
    class_remez_bound(4.0 * n as f64, d, frac)
}

/// Both branch values of the restricted-norm factor, regardless of which
/// regime applies: (low branch for pd < 1, high branch for pd ≥ 1). The
/// branches do not agree at pd = 1; suites report both near the boundary.
pub fn theorem1_branches(p: f64, d: u32, mu_a: f64, c: f64) -> Result<(f64, f64), BoundError> {
    if !(p > 0.0) {
        return Err(BoundError::BadExponent(p));
    }
    if d < 1 {
        return Err(BoundError::BadDegree(d));
    }
    if !(mu_a > 0.0 && mu_a <= 1.0) {
        return Err(BoundError::BadFraction(mu_a));
    }
    if !(c > 0.0) {
        return Err(BoundError::BadConstant(c));
    }
    let df = d as f64;
    let low = (mu_a / c).powi(d as i32) * (df * p + 1.0).powf(-1.0 / p);
    let high = (mu_a / (c * p * df)).powi(d as i32) * (p + 1.0 / df).powf(-1.0 / p);
    Ok((low, high))
}

/// The factor K with ‖f‖_{p,A} ≥ K·‖f‖_p: (μ(A)/c)^d (dp+1)^{-1/p} when
/// pd < 1, and (μ(A)/(cpd))^d (p+1/d)^{-1/p} when pd ≥ 1 (the boundary
/// pd = 1 takes the second branch, as the closed condition is written).
pub fn theorem1_factor(p: f64, d: u32, mu_a: f64, c: f64) -> Result<f64, BoundError> {
    let (low, high) = theorem1_branches(p, d, mu_a, c)?;
    Ok(if p * (d as f64) < 1.0 { low } else { high })
}

/// Diagnostic: with A the whole space the restricted norm equals the full
/// norm, so the factor at μ(A) = 1 must not exceed 1; a violation means c
/// is too small for this (p, d).
pub fn c_admissible(p: f64, d: u32, c: f64) -> Result<bool, BoundError> {
    Ok(theorem1_factor(p, d, 1.0, c)? <= 1.0)
}

/// Anti-concentration bound on μ(|f| ≤ t): min(1, c·t^{1/d}·pd/‖f‖_p^{1/d})
/// for pd ≥ 1, without the pd factor for 0 < pd < 1.
pub fn cw_levelset_bound(t: f64, norm_p: f64, p: f64, d: u32, c: f64) -> Result<f64, BoundError> {
    if !(p > 0.0) {
        return Err(BoundError::BadExponent(p));
    }
    if d < 1 {
        return Err(BoundError::BadDegree(d));
    }
    if !(norm_p > 0.0) {
        return Err(BoundError::BadNorm(norm_p));
    }
    if !(c > 0.0) {
        return Err(BoundError::BadConstant(c));
    }
    if t < 0.0 {
        return Err(BoundError::BadFraction(t));
    }
    let df = d as f64;
    let regime = if p * df >= 1.0 { p * df } else { 1.0 };
    let raw = c * t.powf(1.0 / df) * regime / norm_p.powf(1.0 / df);
    Ok(raw.min(1.0))
}

/// Class constant 3R²: 48 for the polynomial class (R = 4), 299568 for the
/// trigonometric class (R = 316).
pub fn class_constant_from_r(r: f64) -> Result<f64, BoundError> {
    if !(r > 0.0) {
        return Err(BoundError::BadConstant(r));
    }
    Ok(3.0 * r * r)
}

/// Trivial negative-exponent bound factor μ(A)^{1/p} ≥ 1 with
/// ‖f‖_p ≤ μ(A)^{1/p}·‖f‖_{p,A}.
pub fn negative_p_bound(mu_a: f64, p: f64) -> Result<f64, BoundError> {
    if !(p < 0.0) {
        return Err(BoundError::BadNegativeExponent(p));
    }
    if !(mu_a > 0.0 && mu_a <= 1.0) {
        return Err(BoundError::BadFraction(mu_a));
    }
    Ok(mu_a.powf(1.0 / p))
}

/// Comparison constant μ(A)^{d+1}/(Cd)^{2d} of the weaker one-dimensional
/// restricted-norm theorem at p = 1; reported next to the main factor.
pub fn ak_comparison_factor(mu_a: f64, d: u32, c_big: f64) -> Result<f64, BoundError> {
    if d < 1 {
        return Err(BoundError::BadDegree(d));
    }
    if !(mu_a > 0.0 && mu_a <= 1.0) {
        return Err(BoundError::BadFraction(mu_a));
    }
    if !(c_big > 0.0) {
        return Err(BoundError::BadConstant(c_big));
    }
    Ok(mu_a.powi(d as i32 + 1) / (c_big * d as f64).powi(2 * d as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn classical_values() {
        assert_eq!(classical_remez_bound(1, 1.0).unwrap(), 4.0);
        assert_eq!(classical_remez_bound(2, 0.5).unwrap(), 64.0);
        assert_eq!(classical_remez_bound(0, 0.7).unwrap(), 1.0);
        assert!(matches!(classical_remez_bound(2, 0.0), Err(BoundError::BadFraction(_))));
        assert!(matches!(classical_remez_bound(2, 1.5), Err(BoundError::BadFraction(_))));
    }

    #[test]
    fn multivariate_values() {
        assert_eq!(bg_bound(2, 1, 0.5).unwrap(), 16.0);
        assert!(matches!(bg_bound(0, 1, 0.5), Err(BoundError::BadDimension(0))));
    }

    #[test]
    fn restricted_factor_low_regime() {
        // p = 0.5, d = 1, μ(A) = 0.5, c = 4: pd = 0.5 < 1,
        // (0.5/4)·(1.5)^{-2} = 0.055555...
        let f = theorem1_factor(0.5, 1, 0.5, 4.0).unwrap();
        assert!((f - 0.125 / 2.25).abs() < 1e-15);
    }

    #[test]
    fn restricted_factor_high_regime() {
        // p = 1, d = 2, μ(A) = 0.5, c = 4: pd = 2 ≥ 1,
        // (0.5/8)²·(1.5)^{-1} = 0.0026041666...
        let f = theorem1_factor(1.0, 2, 0.5, 4.0).unwrap();
        assert!((f - 0.0625 * 0.0625 / 1.5).abs() < 1e-15);
    }

    #[test]
    fn boundary_takes_high_branch() {
        // pd = 1 exactly: the closed condition selects branch two.
        let (_, high) = theorem1_branches(1.0, 1, 0.5, 4.0).unwrap();
        assert_eq!(theorem1_factor(1.0, 1, 0.5, 4.0).unwrap(), high);
    }

    #[test]
    fn factor_rejects_nonpositive_p() {
        assert!(matches!(theorem1_factor(0.0, 1, 0.5, 4.0), Err(BoundError::BadExponent(_))));
        assert!(matches!(theorem1_factor(-1.0, 1, 0.5, 4.0), Err(BoundError::BadExponent(_))));
    }

    #[test]
    fn cw_values() {
        assert_eq!(cw_levelset_bound(0.0, 0.5, 1.0, 1, 4.0).unwrap(), 0.0);
        // p = d = 1, c = 4, norm 0.5, t = 0.1: min(1, 4·0.1·1/0.5) = 0.8.
        assert!((cw_levelset_bound(0.1, 0.5, 1.0, 1, 4.0).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(cw_levelset_bound(100.0, 0.5, 1.0, 1, 4.0).unwrap(), 1.0);
        assert!(matches!(
            cw_levelset_bound(0.1, 0.0, 1.0, 1, 4.0),
            Err(BoundError::BadNorm(_))
        ));
    }

    #[test]
    fn class_constants() {
        assert_eq!(class_constant_from_r(4.0).unwrap(), 48.0);
        assert_eq!(class_constant_from_r(316.0).unwrap(), 299568.0);
        assert_eq!(class_constant_from_r(1.0).unwrap(), 3.0);
        assert!(class_constant_from_r(0.0).is_err());
    }

    #[test]
    fn negative_p_values() {
        // μ(A)^{1/p} at p = -0.5, μ(A) = 0.25: 0.25^{-2} = 16.
        assert!((negative_p_bound(0.25, -0.5).unwrap() - 16.0).abs() < 1e-12);
        assert_eq!(negative_p_bound(1.0, -0.5).unwrap(), 1.0);
        assert!(matches!(negative_p_bound(0.5, 0.5), Err(BoundError::BadNegativeExponent(_))));
    }

    #[test]
    fn admissibility_diagnostic() {
        // A = whole space forces the factor ≤ 1 for a workable c.
        assert!(c_admissible(1.0, 2, 4.0).unwrap());
        assert!(!c_admissible(1.0, 2, 0.05).unwrap());
    }

    #[test]
    fn ak_factor_value() {
        // μ(A)^{d+1}/(Cd)^{2d} at μ(A)=0.5, d=1, C=4: 0.25/16.
        let v = ak_comparison_factor(0.5, 1, 4.0).unwrap();
        assert!((v - 0.25 / 16.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn factor_increasing_in_mu(
            p in 0.05f64..4.0,
            d in 1u32..6,
            c in 0.5f64..8.0,
            lo in 0.05f64..0.9,
            bump in 0.01f64..0.1,
        ) {
            let hi = (lo + bump).min(1.0);
            let (f_lo_1, f_lo_2) = theorem1_branches(p, d, lo, c).unwrap();
            let (f_hi_1, f_hi_2) = theorem1_branches(p, d, hi, c).unwrap();
            prop_assert!(f_hi_1 > f_lo_1);
            prop_assert!(f_hi_2 > f_lo_2);
        }

        #[test]
        fn factor_scales_as_c_to_minus_d(
            p in 0.05f64..4.0,
            d in 1u32..6,
            mu in 0.05f64..1.0,
            c1 in 0.5f64..8.0,
            c2 in 0.5f64..8.0,
        ) {
            let f1 = theorem1_factor(p, d, mu, c1).unwrap();
            let f2 = theorem1_factor(p, d, mu, c2).unwrap();
            let expect = (c1 / c2).powi(d as i32);
            prop_assert!((f2 / f1 - expect).abs() <= 1e-12 * expect);
        }

        #[test]
        fn cw_monotone_in_t_and_capped(
            t1 in 0.0f64..5.0,
            bump in 0.0f64..5.0,
            norm in 0.01f64..10.0,
            p in 0.05f64..4.0,
            d in 1u32..6,
            c in 0.5f64..8.0,
        ) {
            let b1 = cw_levelset_bound(t1, norm, p, d, c).unwrap();
            let b2 = cw_levelset_bound(t1 + bump, norm, p, d, c).unwrap();
            prop_assert!(b2 >= b1);
            prop_assert!(b1 <= 1.0 && b2 <= 1.0);
        }

        #[test]
        fn classical_is_unit_dimension_case(d in 0u32..8, frac in 0.01f64..1.0) {
            prop_assert_eq!(
                classical_remez_bound(d, frac).unwrap(),
                bg_bound(1, d, frac).unwrap()
            );
        }
    }
}
