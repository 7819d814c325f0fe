//! Adaptive 1-D quadrature on intervals and the halfline, built on the
//! 7-point Gauss / 15-point Kronrod pair with worst-segment-first
//! refinement. Integrands are treated as oracles; callers supply
//! breakpoints (polynomial roots, kinks) so singular points land on
//! segment boundaries, where no quadrature node is ever placed.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::MeasureError;

/// Integration domain. The halfline is [0, ∞); integrands there must decay
/// at least exponentially (the measure kinds supply the weight), and the
/// integral is truncated where that weight is far below any tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain1D {
    Interval { lo: f64, hi: f64 },
    Halfline,
}

/// Truncation point for halfline integrals: e^{-120} ≈ 7.7e-53 swamps any
/// polynomial factor of desk-scale degree against a 1e-10 tolerance.
pub const HALFLINE_TRUNCATION: f64 = 120.0;

pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_SPLITS: usize = 20_000;

// Kronrod abscissae (positive half) and weights for the G7K15 pair,
// with the embedded 7-point Gauss weights on the odd-indexed nodes.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Segment {
    err: f64,
    val: f64,
    resabs: f64,
    lo: f64,
    hi: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(Ordering::Equal)
    }
}

fn gk15(g: &mut dyn FnMut(f64) -> f64, lo: f64, hi: f64) -> Result<Segment, MeasureError> {
    let half = 0.5 * (hi - lo);
    let center = 0.5 * (lo + hi);
    let mut resk = 0.0;
    let mut resg = 0.0;
    let mut resabs = 0.0;
    for (k, (&x, &wk)) in XGK.iter().zip(&WGK).enumerate() {
        let (va, vb) = if x == 0.0 {
            let v = g(center);
            (v, 0.0)
        } else {
            (g(center - half * x), g(center + half * x))
        };
        if !va.is_finite() || !vb.is_finite() {
            return Err(MeasureError::NonFiniteIntegrand { at: center });
        }
        let pair = va + vb;
        resk += wk * pair;
        resabs += wk * (va.abs() + vb.abs());
        if k % 2 == 1 {
            resg += WG[k / 2] * pair;
        } else if x == 0.0 {
            resg += WG[3] * va;
        }
    }
    Ok(Segment {
        err: (half * (resk - resg)).abs(),
        val: half * resk,
        resabs: half * resabs,
        lo,
        hi,
    })
}

/// Integrate g over the domain to relative tolerance `tol`, measured
/// against ∫|g|. `breakpoints` are pre-split locations (points outside the
/// domain are ignored).
pub fn quadrature_1d(
    mut g: impl FnMut(f64) -> f64,
    domain: Domain1D,
    tol: f64,
    breakpoints: &[f64],
) -> Result<f64, MeasureError> {
    let (lo, hi) = match domain {
        Domain1D::Interval { lo, hi } => {
            if !(lo < hi) {
                return Err(MeasureError::BadInterval { lo, hi });
            }
            (lo, hi)
        }
        Domain1D::Halfline => (0.0, HALFLINE_TRUNCATION),
    };

    let mut cuts: Vec<f64> = vec![lo];
    let mut sorted: Vec<f64> = breakpoints.iter().copied().filter(|b| *b > lo && *b < hi).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for b in sorted {
        if b - cuts.last().unwrap() > (hi - lo) * 1e-14 {
            cuts.push(b);
        }
    }
    cuts.push(hi);

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut seed_err = 0.0;
    let mut total_resabs = 0.0;
    for w in cuts.windows(2) {
        let seg = gk15(&mut g, w[0], w[1])?;
        total += seg.val;
        seed_err += seg.err;
        total_resabs += seg.resabs;
        heap.push(seg);
    }

    // Width floor, scale-aware so the interior quadrature nodes of a
    // splittable segment stay representably clear of its endpoints. At an
    // integrable endpoint singularity bisection stops here; the remaining
    // error is far below the Monte-Carlo radii such values are held against.
    let span = hi - lo;
    let width_floor = |a: f64, b: f64| {
        1e4 * f64::EPSILON * a.abs().max(b.abs()).max(0.01 * span)
    };
    let mut live_err = seed_err;
    let mut frozen_err = 0.0;
    let mut splits = 0usize;
    loop {
        let bound = tol * total_resabs.max(f64::MIN_POSITIVE);
        // Refining past the frozen remnant cannot improve the total.
        if live_err <= bound.max(frozen_err) {
            break;
        }
        if splits >= MAX_SPLITS {
            return Err(MeasureError::QuadratureDidNotConverge { error: live_err + frozen_err });
        }
        let worst = match heap.pop() {
            Some(seg) => seg,
            None => break,
        };
        if worst.hi - worst.lo < width_floor(worst.lo, worst.hi) {
            // Resolution-limited; keep its contribution, stop refining it.
            live_err -= worst.err;
            frozen_err += worst.err;
            continue;
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let left = gk15(&mut g, worst.lo, mid)?;
        let right = gk15(&mut g, mid, worst.hi)?;
        total += left.val + right.val - worst.val;
        live_err += left.err + right.err - worst.err;
        total_resabs += left.resabs + right.resabs - worst.resabs;
        splits += 1;
        heap.push(left);
        heap.push(right);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_on_unit_interval() {
        let v = quadrature_1d(|t| t, Domain1D::Interval { lo: 0.0, hi: 1.0 }, 1e-12, &[]).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cubic_weight_on_halfline() {
        // ∫₀^∞ t³ e^{-t} dt = 3! = 6.
        let v = quadrature_1d(|t| t.powi(3) * (-t).exp(), Domain1D::Halfline, 1e-11, &[]).unwrap();
        assert!((v - 6.0).abs() < 1e-9 * 6.0);
    }

    #[test]
    fn odd_integrand_cancels() {
        let v = quadrature_1d(
            |t| 4.0 * t.powi(3) - 3.0 * t,
            Domain1D::Interval { lo: -1.0, hi: 1.0 },
            1e-10,
            &[],
        )
        .unwrap();
        assert!(v.abs() < 1e-9);
    }

    #[test]
    fn absolute_value_kink_with_breakpoint() {
        // ∫₋₁¹ |t| dt = 1; the kink at 0 is a supplied breakpoint.
        let v = quadrature_1d(|t| t.abs(), Domain1D::Interval { lo: -1.0, hi: 1.0 }, 1e-12, &[0.0])
            .unwrap();
        assert!((v - 1.0).abs() < 1e-11);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        // ∫₀¹ t^{-1/2} dt = 2, singular at the left endpoint.
        let v =
            quadrature_1d(|t| t.powf(-0.5), Domain1D::Interval { lo: 0.0, hi: 1.0 }, 1e-9, &[])
                .unwrap();
        // Bisection toward the singular endpoint is resolution-limited;
        // accuracy ~√(width floor), not the smooth-case tolerance.
        assert!((v - 2.0).abs() < 1e-6, "got {v}");
    }

    #[test]
    fn interior_singularity_with_breakpoint() {
        // ∫₀¹ |t - 1/2|^{-1/2} dt = 2√2.
        let v = quadrature_1d(
            |t| (t - 0.5).abs().powf(-0.5),
            Domain1D::Interval { lo: 0.0, hi: 1.0 },
            1e-9,
            &[0.5],
        )
        .unwrap();
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-5, "got {v}");
    }

    #[test]
    fn degenerate_interval_rejected() {
        assert!(matches!(
            quadrature_1d(|_| 1.0, Domain1D::Interval { lo: 1.0, hi: 1.0 }, 1e-10, &[]),
            Err(MeasureError::BadInterval { .. })
        ));
    }

    #[test]
    fn gaussian_mass() {
        let z = (2.0 * std::f64::consts::PI).sqrt();
        let v = quadrature_1d(
            |t| (-0.5 * t * t).exp() / z,
            Domain1D::Interval { lo: -40.0, hi: 40.0 },
            1e-12,
            &[],
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-11);
    }
}
