//! Hit-and-run chain for uniform laws on bounded convex bodies: from the
//! current point, draw a uniform direction, intersect the line with the
//! body, then jump to a uniform point of the chord.

use rand::Rng;

use super::{MeasureError, MeasureKind, Points};
use crate::poly::random_unit_vector;
use crate::rng::{self, stream};

/// Chord of the body along x + t·v as a t-interval. The body is convex and
/// x lies inside, so the feasible t-set is an interval containing 0.
fn chord(kind: &MeasureKind, x: &[f64], v: &[f64]) -> Result<(f64, f64), MeasureError> {
    let mut t_lo = f64::NEG_INFINITY;
    let mut t_hi = f64::INFINITY;
    let mut cut = |a: f64, b: f64| {
        // Constraint a·t ≤ b along the line.
        if a.abs() < 1e-300 {
            return;
        }
        let t = b / a;
        if a > 0.0 {
            t_hi = t_hi.min(t);
        } else {
            t_lo = t_lo.max(t);
        }
    };
    match kind {
        MeasureKind::UniformBox => {
            for (xi, vi) in x.iter().zip(v) {
                cut(*vi, 1.0 - xi);
                cut(-vi, 1.0 + xi);
            }
        }
        MeasureKind::UniformBall => {
            // ‖x + t v‖² = 1 with ‖v‖ = 1.
            let xv: f64 = x.iter().zip(v).map(|(a, b)| a * b).sum();
            let xx: f64 = x.iter().map(|a| a * a).sum();
            let disc = xv * xv - (xx - 1.0);
            if disc <= 0.0 {
                return Err(MeasureError::EmptyInterior);
            }
            let root = disc.sqrt();
            t_lo = -xv - root;
            t_hi = -xv + root;
        }
        MeasureKind::UniformSimplex => {
            for (xi, vi) in x.iter().zip(v) {
                cut(-vi, *xi);
            }
            cut(v.iter().sum(), 1.0 - x.iter().sum::<f64>());
        }
        MeasureKind::UniformPolytope { a, b } => {
            for (row, bi) in a.iter().zip(b) {
                let av: f64 = row.iter().zip(v).map(|(p, q)| p * q).sum();
                let ax: f64 = row.iter().zip(x).map(|(p, q)| p * q).sum();
                cut(av, bi - ax);
            }
        }
        MeasureKind::IntervalUniform { a, b } => {
            cut(v[0], b - x[0]);
            cut(-v[0], x[0] - a);
        }
        _ => return Err(MeasureError::NoBody),
    }
    if !t_lo.is_finite() || !t_hi.is_finite() {
        return Err(MeasureError::UnboundedBody);
    }
    if t_lo > t_hi {
        return Err(MeasureError::EmptyInterior);
    }
    Ok((t_lo, t_hi))
}

/// Construction-time boundedness probe: errors if the chord along v from
/// x is infinite or empty.
pub(super) fn chord_probe(
    kind: &MeasureKind,
    x: &[f64],
    v: &[f64],
) -> Result<(), MeasureError> {
    chord(kind, x, v).map(|_| ())
}

/// Run the chain and return `m` thinned points after burn-in. Deterministic
/// per seed; every step stays inside the body by construction.
pub fn run_chain(
    kind: &MeasureKind,
    start: &[f64],
    n: usize,
    m: usize,
    burn_in: usize,
    thinning: usize,
    seed: u64,
) -> Result<Points, MeasureError> {
    let thinning = thinning.max(1);
    let mut rng = rng::substream(seed, &[stream::CHAIN]);
    let mut x = start.to_vec();
    let mut data = Vec::with_capacity(m * n);
    let step = |x: &mut Vec<f64>, rng: &mut rand_chacha::ChaCha8Rng| {
        let v = random_unit_vector(n, rng);
        let (t_lo, t_hi) = chord(kind, x, &v)?;
        let t = rng.random_range(t_lo..=t_hi);
        for (xi, vi) in x.iter_mut().zip(&v) {
            *xi += t * vi;
        }
        Ok::<(), MeasureError>(())
    };
    for _ in 0..burn_in {
        step(&mut x, &mut rng)?;
    }
    for _ in 0..m {
        for _ in 0..thinning {
            step(&mut x, &mut rng)?;
        }
        data.extend_from_slice(&x);
    }
    Ok(Points::from_flat(n, data))
}
