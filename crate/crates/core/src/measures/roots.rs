//! Root location for univariate polynomials on an interval, by dense sign
//! scan plus bisection. Built for quadrature splitting and sublevel-set
//! decomposition at desk scale, not for ill-conditioned high degrees.

use crate::poly::Polynomial;

/// Cauchy bound: every real root of p lies in [-B, B].
pub fn root_bound(p: &Polynomial) -> f64 {
    let coeffs = match p.dense_coefficients() {
        Some(c) if !c.is_empty() => c,
        _ => return 1.0,
    };
    let lead = coeffs.last().copied().unwrap_or(0.0);
    if lead == 0.0 || coeffs.len() == 1 {
        return 1.0;
    }
    let max_ratio = coeffs[..coeffs.len() - 1]
        .iter()
        .map(|c| (c / lead).abs())
        .fold(0.0f64, f64::max);
    1.0 + max_ratio
}

/// Sign-change roots of p on [lo, hi], refined by bisection, plus grid
/// points where |p| dips near zero without a sign change (even-order
/// touch points). Sorted and deduplicated; precondition lo < hi.
pub fn locate_roots(p: &Polynomial, lo: f64, hi: f64) -> Vec<f64> {
    debug_assert_eq!(p.dim(), 1);
    debug_assert!(lo < hi);
    if p.degree() == 0 {
        return Vec::new();
    }
    let cells = 512 + 128 * p.degree();
    let step = (hi - lo) / cells as f64;
    let mut values = Vec::with_capacity(cells + 1);
    let mut scale = 0.0f64;
    for k in 0..=cells {
        let t = lo + step * k as f64;
        let v = p.eval_unchecked(&[t]);
        scale = scale.max(v.abs());
        values.push((t, v));
    }
    if scale == 0.0 {
        return Vec::new();
    }
    let touch_tol = scale * 1e-9;
    let mut roots = Vec::new();
    for w in values.windows(2) {
        let (t0, v0) = w[0];
        let (t1, v1) = w[1];
        if v0 == 0.0 {
            roots.push(t0);
        } else if v0 * v1 < 0.0 {
            roots.push(bisect(p, t0, t1, v0));
        } else if v0.abs() < touch_tol && !near_last(&roots, t0, step) {
            roots.push(t0);
        }
    }
    let (t_end, v_end) = *values.last().unwrap();
    if v_end == 0.0 || (v_end.abs() < touch_tol && !near_last(&roots, t_end, step)) {
        roots.push(t_end);
    }
    dedup_sorted(&mut roots, (hi - lo) * 1e-13);
    roots
}

fn near_last(roots: &[f64], t: f64, step: f64) -> bool {
    roots.last().is_some_and(|&r| (t - r).abs() <= 1.5 * step)
}

fn bisect(p: &Polynomial, mut a: f64, mut b: f64, va: f64) -> f64 {
    let mut sa = va.signum();
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let vm = p.eval_unchecked(&[mid]);
        if vm == 0.0 {
            return mid;
        }
        if vm.signum() == sa {
            a = mid;
            sa = vm.signum();
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

fn dedup_sorted(roots: &mut Vec<f64>, tol: f64) {
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= tol);
}
