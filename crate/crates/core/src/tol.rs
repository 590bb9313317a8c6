//! Tolerance-aware floating point comparison shared by the whole crate.

use serde::Serialize;

/// Combined absolute/relative comparison tolerance.
///
/// Two values are considered equal when they differ by at most
/// `max(abs, rel * max(|a|, |b|))`. The default of `1e-9` for both
/// components is shared with the CLI `--tol` flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tol {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tol {
    fn default() -> Self {
        Tol { abs: 1e-9, rel: 1e-9 }
    }
}

impl Tol {
    pub fn new(abs: f64, rel: f64) -> Self {
        assert!(abs >= 0.0 && rel >= 0.0, "tolerances must be nonnegative");
        Tol { abs, rel }
    }

    /// Uniform tolerance for both the absolute and relative component.
    pub fn from_scalar(t: f64) -> Self {
        Tol::new(t, t)
    }

    /// Comparison margin for a pair of values.
    pub fn eps(&self, a: f64, b: f64) -> f64 {
        f64::max(self.abs, self.rel * f64::max(a.abs(), b.abs()))
    }

    /// `a` and `b` are indistinguishable at this tolerance.
    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.eps(a, b)
    }

    /// `a` is definitely smaller than `b` (beyond the noise margin).
    pub fn lt(&self, a: f64, b: f64) -> bool {
        a < b - self.eps(a, b)
    }

    /// `a <= b` up to noise.
    pub fn le(&self, a: f64, b: f64) -> bool {
        a <= b + self.eps(a, b)
    }

    /// `a >= b` up to noise.
    pub fn ge(&self, a: f64, b: f64) -> bool {
        a >= b - self.eps(a, b)
    }

    pub fn is_zero(&self, a: f64) -> bool {
        self.close(a, 0.0)
    }

    /// Greedy ascending clustering: values within the margin of the first
    /// member of the current cluster share a level. Returns the sorted
    /// cluster representatives (each cluster's minimum).
    pub fn cluster(&self, values: &[f64]) -> Vec<f64> {
        let mut sorted: Vec<f64> = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite value"));
        let mut reps = Vec::new();
        for v in sorted {
            match reps.last() {
                Some(&r) if self.close(r, v) => {}
                _ => reps.push(v),
            }
        }
        reps
    }

    /// Snap `value` to its representative from `cluster`. Consistent with
    /// the clustering pass: a value belongs to the cluster with the largest
    /// representative not exceeding it (representatives are cluster minima).
    pub fn snap(&self, reps: &[f64], value: f64) -> f64 {
        let mut best = reps[0];
        for &r in reps {
            if r <= value {
                best = r;
            } else {
                break;
            }
        }
        debug_assert!(self.close(best, value), "value {value} not covered by clusters");
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_1e9() {
        let t = Tol::default();
        assert_eq!(t.abs, 1e-9);
        assert_eq!(t.rel, 1e-9);
    }

    #[test]
    fn close_absolute_and_relative() {
        let t = Tol::default();
        assert!(t.close(0.0, 5e-10));
        assert!(t.close(1e6, 1e6 + 1e-4));
        assert!(!t.close(1.0, 1.0 + 1e-6));
    }

    #[test]
    fn strict_ordering() {
        let t = Tol::default();
        assert!(t.lt(1.0, 2.0));
        assert!(!t.lt(1.0, 1.0 + 1e-12));
        assert!(t.ge(1.0 + 1e-12, 1.0));
    }

    #[test]
    fn clustering_groups_nearby_values() {
        let t = Tol::from_scalar(0.05);
        let reps = t.cluster(&[1.04, 0.96, 1.00, 1.04, 2.0]);
        assert_eq!(reps.len(), 3);
        assert_eq!(reps[0], 0.96);
        assert_eq!(reps[1], 1.04);
        assert_eq!(reps[2], 2.0);
        assert_eq!(t.snap(&reps, 1.00), 0.96);
        assert_eq!(t.snap(&reps, 1.04), 1.04);
    }
}
