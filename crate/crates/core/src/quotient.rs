//! Equivalence classes of rows, equitable quotient matrices and the
//! energy decomposition they induce.
//!
//! For a matrix whose off-diagonal entries satisfy the min-triangle
//! inequality, `x ~ y` iff `x = y` or the entry `c_xy` equals the row
//! maximum of both rows. The classes induce an equitable partition whose
//! quotient matrix shares its eigenvalues with the input, which splits the
//! energy as `E(C) = E(Q) + trace(Q)` for nonnegative zero-diagonal input.

use serde::Serialize;
use thiserror::Error;

use crate::matrix::SymMatrix;
use crate::matrix_props::check_gh_triangle;
use crate::spectra::{self, SpectraError};
use crate::VertexId;

#[derive(Debug, Error, PartialEq)]
pub enum QuotientError {
    #[error("off-diagonal min-triangle inequality does not hold")]
    PreconditionViolated,
    #[error("row-maximum relation is not transitive at this tolerance (vertices {x}, {y}, {z})")]
    TransitivityBroken { x: VertexId, y: VertexId, z: VertexId },
    #[error("diagonal entries differ inside class of vertex {0}")]
    NonConstantDiagonalOnClass(VertexId),
    #[error("block ({i}, {j}) does not have constant row sums")]
    NonEquitableBlock { i: usize, j: usize },
    #[error("diagonal override must have one value per vertex")]
    BadDiagOverride,
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

/// Quotient analysis of a matrix under the row-maximum equivalence.
#[derive(Debug, Clone, Serialize)]
pub struct QuotientReport {
    /// The equivalence classes, each sorted ascending, ordered by smallest member.
    pub classes: Vec<Vec<VertexId>>,
    /// Per-class common row extremum (row maxima here; nearest-point radii
    /// when reused for ultrametric distance matrices).
    pub class_maxima: Vec<f64>,
    /// Equitable quotient matrix, possibly nonsymmetric, row-major k x k.
    pub q: Vec<Vec<f64>>,
    /// Symmetric matrix similar to `q` (diagonal scaling by sqrt of class sizes).
    pub q_sym: SymMatrix,
    pub energy_c: f64,
    pub energy_q: f64,
    pub trace_q: f64,
    /// `2 * sum (|X_i| - 1) * m(X_i)`, a lower bound on `energy_c`.
    pub lower_bound: f64,
    /// The lower bound is attained, equivalently `q` has no negative eigenvalue.
    pub tight: bool,
}

impl QuotientReport {
    pub fn det_q(&self) -> f64 {
        det(&self.q)
    }
}

fn det(m: &[Vec<f64>]) -> f64 {
    let k = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut sign = 1.0;
    let mut result = 1.0;
    for col in 0..k {
        let pivot = (col..k).max_by(|&r1, &r2| a[r1][col].abs().partial_cmp(&a[r2][col].abs()).unwrap());
        let pivot = pivot.unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            sign = -sign;
        }
        result *= a[col][col];
        for row in (col + 1)..k {
            let f = a[row][col] / a[col][col];
            for c in col..k {
                a[row][c] -= f * a[col][c];
            }
        }
    }
    sign * result
}

/// Snapped copy of the matrix plus its level representatives.
fn snapped(c: &SymMatrix) -> SymMatrix {
    let tol = c.tol();
    let reps = tol.cluster(c.packed());
    SymMatrix::from_fn(c.n(), tol, |i, j| tol.snap(&reps, c.get(i, j)))
}

/// Partition of the vertices into the row-maximum equivalence classes.
///
/// Entries are first snapped to tolerance-clustered levels so the relation
/// is decided by exact comparisons; transitivity is then verified and a
/// failure reported rather than silently repaired (it means the tolerance
/// is too coarse or too fine for the data).
pub fn equivalence_classes(c: &SymMatrix) -> Result<Vec<Vec<VertexId>>, QuotientError> {
    if !check_gh_triangle(c, false).is_empty() {
        return Err(QuotientError::PreconditionViolated);
    }
    let n = c.n();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![vec![0]]);
    }
    let s = snapped(c);
    let m: Vec<f64> = (0..n).map(|v| s.row_offdiag_max(v).expect("n >= 2")).collect();
    let related = |x: usize, y: usize| m[x] == m[y] && s.get(x, y) == m[x];
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        if class_of[v] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut members = vec![v];
        class_of[v] = id;
        for w in (v + 1)..n {
            if class_of[w] == usize::MAX && related(v, w) {
                class_of[w] = id;
                members.push(w);
            }
        }
        classes.push(members);
    }
    // exact transitivity audit over the grouped result
    for members in &classes {
        for (a, &x) in members.iter().enumerate() {
            for &y in &members[a + 1..] {
                if !related(x, y) {
                    let z = members
                        .iter()
                        .copied()
                        .find(|&z| z != x && z != y && related(x, z) && related(z, y))
                        .unwrap_or(members[0]);
                    return Err(QuotientError::TransitivityBroken { x, y, z });
                }
            }
        }
    }
    // and no relation may leak across classes
    for x in 0..n {
        for y in (x + 1)..n {
            if class_of[x] != class_of[y] && related(x, y) {
                return Err(QuotientError::TransitivityBroken { x, y, z: x });
            }
        }
    }
    Ok(classes)
}

/// Builds the quotient report for the given classes.
///
/// `diag_override`, when present, replaces the diagonal of `c` for the
/// whole analysis; it must be constant on classes. The energy identity
/// part of the report is meaningful for nonnegative zero-diagonal input.
pub fn equitable_quotient(
    c: &SymMatrix,
    classes: &[Vec<VertexId>],
    diag_override: Option<&[f64]>,
) -> Result<QuotientReport, QuotientError> {
    let n = c.n();
    if let Some(d) = diag_override {
        if d.len() != n {
            return Err(QuotientError::BadDiagOverride);
        }
    }
    let tol = c.tol();
    let mut work = snapped(c);
    if let Some(d) = diag_override {
        for (i, &v) in d.iter().enumerate() {
            work.set(i, i, v);
        }
    }
    let k = classes.len();
    // diagonal must be constant on every class
    for members in classes {
        let d0 = work.get(members[0], members[0]);
        for &v in &members[1..] {
            if !tol.close(work.get(v, v), d0) {
                return Err(QuotientError::NonConstantDiagonalOnClass(v));
            }
        }
    }
    let class_maxima: Vec<f64> = classes
        .iter()
        .map(|members| {
            let v = members[0];
            if n < 2 {
                0.0
            } else {
                work.row_offdiag_max(v).expect("n >= 2")
            }
        })
        .collect();
    // equitability certificate: constant row sums per block, then the
    // quotient entry is that common sum divided out per the class sizes
    let mut q = vec![vec![0.0; k]; k];
    for (i, rows) in classes.iter().enumerate() {
        for (j, cols) in classes.iter().enumerate() {
            let sum_for = |x: usize| -> f64 { cols.iter().map(|&y| work.get(x, y)).sum() };
            let s0 = sum_for(rows[0]);
            for &x in &rows[1..] {
                if !tol.close(sum_for(x), s0) {
                    return Err(QuotientError::NonEquitableBlock { i, j });
                }
            }
            q[i][j] = s0;
        }
    }
    let q_sym = SymMatrix::from_fn(k, tol, |i, j| {
        if i == j {
            q[i][i]
        } else {
            let (si, sj) = (classes[i].len() as f64, classes[j].len() as f64);
            // c_xy * sqrt(|X_i| |X_j|); recovered from the block row sums
            q[i][j] / sj * (si * sj).sqrt()
        }
    });
    let energy_c = spectra::energy(&work)?;
    let spec_q = spectra::eigen_sym(&q_sym)?;
    let energy_q = spec_q.energy();
    let trace_q: f64 = (0..k).map(|i| q[i][i]).sum();
    let lower_bound = 2.0
        * classes
            .iter()
            .zip(class_maxima.iter())
            .map(|(members, m)| (members.len() as f64 - 1.0) * m)
            .sum::<f64>();
    let lambda_min_q = if k == 0 { 0.0 } else { spec_q.lambda_min() };
    let tight = lambda_min_q >= -(k as f64) * tol.abs * f64::max(1.0, q_sym.norm_inf());
    Ok(QuotientReport {
        classes: classes.to_vec(),
        class_maxima,
        q,
        q_sym,
        energy_c,
        energy_q,
        trace_q,
        lower_bound,
        tight,
    })
}

/// `2 * sum (|X_i| - 1) * m(X_i)` for a nonnegative zero-diagonal matrix.
pub fn energy_lower_bound(c: &SymMatrix) -> Result<f64, QuotientError> {
    if !c.is_nonnegative() || !c.is_zero_diagonal() {
        return Err(QuotientError::PreconditionViolated);
    }
    let classes = equivalence_classes(c)?;
    let report = equitable_quotient(c, &classes, None)?;
    Ok(report.lower_bound)
}

/// Convenience wrapper: classes plus quotient in one call.
pub fn analyze(c: &SymMatrix) -> Result<QuotientReport, QuotientError> {
    let classes = equivalence_classes(c)?;
    equitable_quotient(c, &classes, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol::Tol;

    fn hub_connectivity() -> SymMatrix {
        SymMatrix::from_rows_exact(
            &[
                &[0.0, 4.0, 4.0, 4.0, 3.0, 3.0],
                &[4.0, 0.0, 4.0, 4.0, 3.0, 3.0],
                &[4.0, 4.0, 0.0, 4.0, 3.0, 3.0],
                &[4.0, 4.0, 4.0, 0.0, 3.0, 3.0],
                &[3.0, 3.0, 3.0, 3.0, 0.0, 3.0],
                &[3.0, 3.0, 3.0, 3.0, 3.0, 0.0],
            ],
            Tol::default(),
        )
    }

    #[test]
    fn hub_classes() {
        let classes = equivalence_classes(&hub_connectivity()).unwrap();
        assert_eq!(classes, vec![vec![0, 1, 2, 3], vec![4, 5]]);
    }

    #[test]
    fn constant_matrix_single_class() {
        let c = SymMatrix::from_fn(5, Tol::default(), |i, j| if i == j { 0.0 } else { 2.0 });
        assert_eq!(equivalence_classes(&c).unwrap(), vec![vec![0, 1, 2, 3, 4]]);
    }

    #[test]
    fn weighted_path_classes() {
        // connectivity matrix of the path 0 -(5)- 1 -(3)- 2: the pair
        // attaining the global maximum is always equivalent, so three
        // singleton classes are impossible; the heavy pair groups up
        let c = SymMatrix::from_rows_exact(
            &[&[0.0, 5.0, 3.0], &[5.0, 0.0, 3.0], &[3.0, 3.0, 0.0]],
            Tol::default(),
        );
        assert_eq!(equivalence_classes(&c).unwrap(), vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn hub_quotient_matrix() {
        let report = analyze(&hub_connectivity()).unwrap();
        assert_eq!(report.q, vec![vec![12.0, 6.0], vec![12.0, 3.0]]);
        assert_eq!(report.lower_bound, 30.0);
        assert_eq!(report.det_q(), -36.0);
        assert!(!report.tight);
        assert_eq!(report.trace_q, 15.0);
        let expect_energy = 15.0 + 3.0 * 41.0f64.sqrt();
        assert!((report.energy_c - expect_energy).abs() < 1e-9);
        assert!((report.energy_c - (report.energy_q + report.trace_q)).abs() < 1e-9);
        assert_eq!(report.class_maxima, vec![4.0, 3.0]);
    }

    #[test]
    fn constant_matrix_quotient_is_tight() {
        let n = 5;
        let m = 2.0;
        let c = SymMatrix::from_fn(n, Tol::default(), |i, j| if i == j { 0.0 } else { m });
        let report = analyze(&c).unwrap();
        assert_eq!(report.q, vec![vec![m * (n as f64 - 1.0)]]);
        assert!((report.energy_c - 2.0 * (n as f64 - 1.0) * m).abs() < 1e-10);
        assert!(report.tight);
        assert_eq!(report.lower_bound, 2.0 * (n as f64 - 1.0) * m);
    }

    #[test]
    fn lower_bound_values() {
        assert_eq!(energy_lower_bound(&hub_connectivity()).unwrap(), 30.0);
        let zero = SymMatrix::zeros(4, Tol::default());
        assert_eq!(energy_lower_bound(&zero).unwrap(), 0.0);
    }

    #[test]
    fn quotient_eigenvalues_are_matrix_eigenvalues() {
        let report = analyze(&hub_connectivity()).unwrap();
        let spec_c = spectra::eigen_sym(&hub_connectivity()).unwrap();
        let spec_q = spectra::eigen_sym(&report.q_sym).unwrap();
        for lq in &spec_q.eigenvalues {
            assert!(
                spec_c.eigenvalues.iter().any(|lc| (lc - lq).abs() < 1e-8),
                "quotient eigenvalue {lq} missing from the matrix spectrum"
            );
        }
    }

    #[test]
    fn diag_override_shifts_quotient_diagonal() {
        let c = hub_connectivity();
        let classes = equivalence_classes(&c).unwrap();
        let report =
            equitable_quotient(&c, &classes, Some(&[4.0, 4.0, 4.0, 4.0, 3.0, 3.0])).unwrap();
        assert_eq!(report.q, vec![vec![16.0, 6.0], vec![12.0, 6.0]]);
        let bad = equitable_quotient(&c, &classes, Some(&[4.0, 1.0, 4.0, 4.0, 3.0, 3.0]));
        assert_eq!(bad.unwrap_err(), QuotientError::NonConstantDiagonalOnClass(1));
    }

    #[test]
    fn precondition_is_enforced() {
        let bad = SymMatrix::from_rows_exact(
            &[&[0.0, 3.0, 1.0], &[3.0, 0.0, 3.0], &[1.0, 3.0, 0.0]],
            Tol::default(),
        );
        assert_eq!(equivalence_classes(&bad).unwrap_err(), QuotientError::PreconditionViolated);
    }

    #[test]
    fn coarse_tolerance_can_break_transitivity() {
        // with abs tolerance 0.05 the values {0.96, 1.00} cluster together
        // while 1.04 stays separate; the snapped matrix then carries an
        // exact triangle violation and the relation stops being transitive
        let tol = Tol::new(0.05, 0.0);
        let c = SymMatrix::from_rows_exact(
            &[
                &[0.00, 1.04, 1.00, 0.96],
                &[1.04, 0.00, 1.04, 0.96],
                &[1.00, 1.04, 0.00, 0.96],
                &[0.96, 0.96, 0.96, 0.00],
            ],
            tol,
        );
        assert!(check_gh_triangle(&c, false).is_empty(), "raw matrix passes at this tolerance");
        assert!(matches!(
            equivalence_classes(&c).unwrap_err(),
            QuotientError::TransitivityBroken { .. }
        ));
    }

    #[test]
    fn class_member_differences_are_eigenvectors() {
        let c = hub_connectivity();
        let report = analyze(&c).unwrap();
        for (members, m) in report.classes.iter().zip(report.class_maxima.iter()) {
            let x0 = members[0];
            for &x in &members[1..] {
                for z in 0..c.n() {
                    let lhs = c.get(z, x0) - c.get(z, x);
                    let rhs = if z == x0 {
                        -m
                    } else if z == x {
                        *m
                    } else {
                        0.0
                    };
                    assert!((lhs - rhs).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn entries_depend_only_on_classes() {
        let c = hub_connectivity();
        let classes = equivalence_classes(&c).unwrap();
        for (i, xi) in classes.iter().enumerate() {
            for xj in classes.iter().skip(i + 1) {
                let v0 = c.get(xi[0], xj[0]);
                for &x in xi {
                    for &y in xj {
                        assert_eq!(c.get(x, y), v0);
                    }
                }
            }
        }
    }
}
