//! Finite unions of closed intervals with exact set algebra, used for the
//! exact 1-D measure and quadrature paths.

/// Sorted, pairwise-disjoint closed intervals. Endpoints may be infinite
/// until the set is clipped to a bounded support.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet {
    items: Vec<(f64, f64)>,
}

impl IntervalSet {
    /// Normalize arbitrary intervals: drop empty ones, sort, merge overlaps
    /// (touching intervals merge, matching the closed convention).
    pub fn new(mut items: Vec<(f64, f64)>) -> Self {
        items.retain(|&(lo, hi)| lo <= hi);
        items.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(items.len());
        for (lo, hi) in items {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        IntervalSet { items: merged }
    }

    pub fn empty() -> Self {
        IntervalSet { items: Vec::new() }
    }

    pub fn full(lo: f64, hi: f64) -> Self {
        IntervalSet::new(vec![(lo, hi)])
    }

    pub fn items(&self) -> &[(f64, f64)] {
        &self.items
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.items.iter().any(|&(lo, hi)| lo <= t && t <= hi)
    }

    pub fn total_length(&self) -> f64 {
        self.items.iter().map(|&(lo, hi)| hi - lo).sum()
    }

    /// Complement relative to [lo, hi].
    pub fn complement_within(&self, lo: f64, hi: f64) -> Self {
        let mut out = Vec::with_capacity(self.items.len() + 1);
        let mut cursor = lo;
        for &(a, b) in &self.items {
            if b < lo || a > hi {
                continue;
            }
            if a > cursor {
                out.push((cursor, a));
            }
            cursor = cursor.max(b);
        }
        if cursor < hi {
            out.push((cursor, hi));
        }
        IntervalSet::new(out)
    }

    pub fn intersect(&self, other: &IntervalSet) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.items.len() && j < other.items.len() {
            let (a_lo, a_hi) = self.items[i];
            let (b_lo, b_hi) = other.items[j];
            let lo = a_lo.max(b_lo);
            let hi = a_hi.min(b_hi);
            if lo <= hi {
                out.push((lo, hi));
            }
            if a_hi < b_hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet::new(out)
    }

    pub fn union(&self, other: &IntervalSet) -> Self {
        let mut all = self.items.clone();
        all.extend_from_slice(&other.items);
        IntervalSet::new(all)
    }

    /// Clip to [lo, hi].
    pub fn clip(&self, lo: f64, hi: f64) -> Self {
        self.intersect(&IntervalSet::full(lo, hi))
    }
}
