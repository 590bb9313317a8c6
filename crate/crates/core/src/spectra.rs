//! Dense symmetric eigensolver and the spectral quantities built on it.
//!
//! The solver is cyclic Jacobi with a threshold strategy: sweeps rotate
//! every off-diagonal pair whose magnitude exceeds a per-sweep threshold,
//! until the off-diagonal Frobenius norm drops below `1e-12 * ||C||_F`
//! (sweep cap 100). Rotations keep the accumulated eigenvector basis
//! orthonormal, which gives high relative accuracy at the dense sizes this
//! crate works with.

use serde::Serialize;
use thiserror::Error;

use crate::matrix::SymMatrix;
use crate::matrix_props::check_gh_triangle;
use crate::VertexId;

const SWEEP_CAP: usize = 100;
const OFF_NORM_FACTOR: f64 = 1e-12;
const RESIDUAL_FACTOR: f64 = 1e-8;

/// Full eigendecomposition of a symmetric matrix.
#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` pairs with `eigenvalues[k]`; orthonormal.
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    /// max over pairs of `||C v - lambda v||_inf`, against the input matrix.
    pub residual: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum SpectraError {
    #[error("Jacobi sweep cap reached after {0} sweeps without convergence")]
    NoConvergence(usize),
    #[error("off-diagonal min-triangle inequality does not hold")]
    PreconditionViolated,
    #[error("matrix is not realizable as an edge-connectivity matrix")]
    NotRealizable,
}

impl Spectrum {
    pub fn lambda_min(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn energy(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs()).sum()
    }

    pub fn spread(&self) -> f64 {
        self.lambda_max() - self.lambda_min()
    }

    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }
}

/// Jacobi on a dense row-major copy; returns the unsorted diagonal and,
/// optionally, the accumulated rotation basis (columns are eigenvectors).
/// Used directly by the search harness where eigenvalues suffice.
pub(crate) fn jacobi(
    a: &mut [f64],
    n: usize,
    with_vectors: bool,
) -> Result<(Vec<f64>, Option<Vec<f64>>), SpectraError> {
    let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = OFF_NORM_FACTOR * norm;
    let mut v = if with_vectors {
        let mut id = vec![0.0; n * n];
        for i in 0..n {
            id[i * n + i] = 1.0;
        }
        Some(id)
    } else {
        None
    };
    let mut converged = n < 2 || norm == 0.0;
    for _sweep in 0..SWEEP_CAP {
        if converged {
            break;
        }
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * a[p * n + q] * a[p * n + q];
            }
        }
        let off = off.sqrt();
        if off <= target {
            converged = true;
            break;
        }
        // rotate only entries carrying a meaningful share of the off-norm;
        // the skipped remainder shrinks the off-norm by a factor > n per
        // sweep, so the cap is never the binding limit in practice
        let thresh = off / (n as f64 * n as f64);
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 || apq.abs() < thresh {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    if k != p && k != q {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        let new_kp = akp - s * (akq + tau * akp);
                        let new_kq = akq + s * (akp - tau * akq);
                        a[k * n + p] = new_kp;
                        a[p * n + k] = new_kp;
                        a[k * n + q] = new_kq;
                        a[q * n + k] = new_kq;
                    }
                }
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp - s * (vkq + tau * vkp);
                        v[k * n + q] = vkq + s * (vkp - tau * vkq);
                    }
                }
            }
        }
    }
    if !converged {
        // final exact check before giving up
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() > target {
            return Err(SpectraError::NoConvergence(SWEEP_CAP));
        }
    }
    let values: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    Ok((values, v))
}

/// Eigenvalues-only path for bulk scans.
pub(crate) fn eigenvalues_only(c: &SymMatrix) -> Result<Vec<f64>, SpectraError> {
    let n = c.n();
    let mut a = c.to_dense();
    let (mut values, _) = jacobi(&mut a, n, false)?;
    values.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(values)
}

/// Full decomposition: all eigenvalues descending with an orthonormal
/// basis, deterministic for a fixed input.
pub fn eigen_sym(c: &SymMatrix) -> Result<Spectrum, SpectraError> {
    let n = c.n();
    let mut a = c.to_dense();
    let (values, vectors) = jacobi(&mut a, n, true)?;
    let v = vectors.expect("vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let eigenvectors: Vec<Vec<f64>> =
        order.iter().map(|&col| (0..n).map(|row| v[row * n + col]).collect()).collect();
    // residual against the original matrix
    let mut residual = 0.0f64;
    for (lambda, vec) in eigenvalues.iter().zip(eigenvectors.iter()) {
        for row in 0..n {
            let cv: f64 = (0..n).map(|k| c.get(row, k) * vec[k]).sum();
            residual = residual.max((cv - lambda * vec[row]).abs());
        }
    }
    let bound = RESIDUAL_FACTOR * f64::max(1.0, c.norm_inf());
    if residual > bound {
        return Err(SpectraError::NoConvergence(SWEEP_CAP));
    }
    Ok(Spectrum { eigenvalues, eigenvectors: Some(eigenvectors), residual })
}

/// Sum of absolute eigenvalues.
pub fn energy(c: &SymMatrix) -> Result<f64, SpectraError> {
    Ok(eigenvalues_only(c)?.iter().map(|l| l.abs()).sum())
}

/// Largest minus smallest eigenvalue.
pub fn spread(c: &SymMatrix) -> Result<f64, SpectraError> {
    let values = eigenvalues_only(c)?;
    Ok(values[0] - values[values.len() - 1])
}

/// Positive-semidefiniteness verdict with an eigenvector witness on failure.
#[derive(Debug, Clone, Serialize)]
pub struct PsdReport {
    pub psd: bool,
    pub lambda_min: f64,
    /// Unit vector with negative Rayleigh quotient when not PSD.
    pub witness: Option<Vec<f64>>,
}

/// PSD test with a threshold scaling as `n * tol * max(1, ||C||_inf)`,
/// matching the solver's accuracy growth with dimension.
pub fn is_psd(c: &SymMatrix) -> Result<PsdReport, SpectraError> {
    let spectrum = eigen_sym(c)?;
    let lambda_min = if c.n() == 0 { 0.0 } else { spectrum.lambda_min() };
    let threshold = -(c.n() as f64) * c.tol().abs * f64::max(1.0, c.norm_inf());
    let psd = lambda_min >= threshold;
    let witness = if psd {
        None
    } else {
        spectrum.eigenvectors.as_ref().map(|vs| vs[vs.len() - 1].clone())
    };
    Ok(PsdReport { psd, lambda_min, witness })
}

/// An eigenpair read off directly from the entries: the difference of two
/// standard basis vectors with eigenvalue `c_xx - c_xy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElementaryEigenpair {
    pub x: VertexId,
    pub y: VertexId,
    pub eigenvalue: f64,
}

/// For a matrix whose off-diagonal entries satisfy the min-triangle
/// inequality: returns exactly the pairs (x, y), x < y, with `c_xy` maximal
/// among the off-diagonal entries of both rows and with matching diagonal
/// entries. For such pairs `e_x - e_y` is an eigenvector with eigenvalue
/// `c_xx - c_xy`, and those are the only basis-difference eigenvectors.
pub fn elementary_eigenpairs(c: &SymMatrix) -> Result<Vec<ElementaryEigenpair>, SpectraError> {
    if !check_gh_triangle(c, false).is_empty() {
        return Err(SpectraError::PreconditionViolated);
    }
    let n = c.n();
    let tol = c.tol();
    let mut out = Vec::new();
    for x in 0..n {
        for y in (x + 1)..n {
            let cxy = c.get(x, y);
            if !tol.close(c.get(x, x), c.get(y, y)) {
                continue;
            }
            let max_in_both_rows = (0..n).all(|z| {
                (z == x || tol.ge(cxy, c.get(x, z))) && (z == y || tol.ge(cxy, c.get(y, z)))
            });
            if max_in_both_rows {
                let pair = ElementaryEigenpair { x, y, eigenvalue: c.get(x, x) - cxy };
                debug_assert!(
                    (0..n).all(|z| {
                        let image = c.get(z, x) - c.get(z, y);
                        let want = if z == x {
                            pair.eigenvalue
                        } else if z == y {
                            -pair.eigenvalue
                        } else {
                            0.0
                        };
                        (image - want).abs() <= 4.0 * (n as f64) * tol.eps(image, want)
                    }),
                    "pair ({x}, {y}) fails the eigenvector identity"
                );
                out.push(pair);
            }
        }
    }
    Ok(out)
}

/// Report for the smallest-eigenvalue law of realizable matrices:
/// `lambda_min = -M` with `M` the maximum entry.
#[derive(Debug, Clone, Serialize)]
pub struct MinEigReport {
    pub lambda_min: f64,
    pub max_entry: f64,
    pub matches: bool,
}

pub fn min_eig_theorem_check(c: &SymMatrix) -> Result<MinEigReport, SpectraError> {
    if !crate::matrix_props::is_realizable(c) {
        return Err(SpectraError::NotRealizable);
    }
    let values = eigenvalues_only(c)?;
    let lambda_min = if values.is_empty() { 0.0 } else { values[values.len() - 1] };
    let max_entry = if c.n() == 0 { 0.0 } else { c.max_entry() };
    let tol = c.tol();
    let matches = (lambda_min + max_entry).abs() <= tol.abs.max(tol.rel * f64::max(1.0, max_entry));
    Ok(MinEigReport { lambda_min, max_entry, matches })
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

    fn hub_path_plus_degrees() -> SymMatrix {
        SymMatrix::from_rows_exact(
            &[
                &[4.0, 4.0, 4.0, 4.0, 3.0, 3.0],
                &[4.0, 4.0, 4.0, 4.0, 3.0, 3.0],
                &[4.0, 4.0, 4.0, 3.0, 3.0, 3.0],
                &[4.0, 4.0, 3.0, 4.0, 3.0, 3.0],
                &[3.0, 3.0, 3.0, 3.0, 3.0, 3.0],
                &[3.0, 3.0, 3.0, 3.0, 3.0, 3.0],
            ],
            Tol::default(),
        )
    }

    #[test]
    fn hub_connectivity_spectrum() {
        // quotient characteristic polynomial x^2 - 15x - 36 gives the two
        // class-constant eigenvalues; the rest come in multiplicities from
        // the classes {0,1,2,3} and {4,5}
        let s = eigen_sym(&hub_connectivity()).unwrap();
        let root = (15.0 * 15.0 + 4.0 * 36.0f64).sqrt(); // sqrt(369) = 3*sqrt(41)
        let want = [
            (15.0 + root) / 2.0,
            (15.0 - root) / 2.0,
            -3.0,
            -4.0,
            -4.0,
            -4.0,
        ];
        let mut want = want.to_vec();
        want.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (got, expect) in s.eigenvalues.iter().zip(want.iter()) {
            assert!((got - expect).abs() < 1e-10, "{got} vs {expect}");
        }
        assert!(s.residual < 1e-10);
    }

    #[test]
    fn constant_offdiag_spectrum() {
        for (n, m) in [(4usize, 2.0f64), (6, 0.5)] {
            let c = SymMatrix::from_fn(n, Tol::default(), |i, j| if i == j { 0.0 } else { m });
            let s = eigen_sym(&c).unwrap();
            assert!((s.lambda_max() - (n as f64 - 1.0) * m).abs() < 1e-10);
            for lambda in &s.eigenvalues[1..] {
                assert!((lambda + m).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn diagonal_matrix_spectrum() {
        let mut c = SymMatrix::zeros(2, Tol::default());
        c.set(0, 0, 2.0);
        c.set(1, 1, -1.0);
        let s = eigen_sym(&c).unwrap();
        assert_eq!(s.eigenvalues, vec![2.0, -1.0]);
    }

    #[test]
    fn energy_values() {
        let e = energy(&hub_connectivity()).unwrap();
        let expect = 15.0 + 3.0 * 41.0f64.sqrt();
        assert!((e - expect).abs() <= 1e-8 * expect);
        let c = SymMatrix::from_fn(5, Tol::default(), |i, j| if i == j { 0.0 } else { 2.0 });
        assert!((energy(&c).unwrap() - 2.0 * 4.0 * 2.0).abs() < 1e-10);
        assert_eq!(energy(&SymMatrix::zeros(3, Tol::default())).unwrap(), 0.0);
    }

    #[test]
    fn psd_verdicts() {
        let report = is_psd(&hub_path_plus_degrees()).unwrap();
        assert!(!report.psd);
        assert!(report.lambda_min < -0.1);
        let witness = report.witness.unwrap();
        let q: f64 = {
            let c = hub_path_plus_degrees();
            let n = c.n();
            let mut cv = vec![0.0; n];
            for i in 0..n {
                for j in 0..n {
                    cv[i] += c.get(i, j) * witness[j];
                }
            }
            (0..n).map(|i| witness[i] * cv[i]).sum()
        };
        assert!(q < 0.0, "witness must have negative Rayleigh quotient");

        let shifted = hub_connectivity().add_diag(&[4.0, 4.0, 4.0, 4.0, 3.0, 3.0]);
        assert!(is_psd(&shifted).unwrap().psd);

        let neg_id = SymMatrix::from_fn(3, Tol::default(), |i, j| if i == j { -1.0 } else { 0.0 });
        let report = is_psd(&neg_id).unwrap();
        assert!(!report.psd);
        assert!(report.witness.is_some());
    }

    #[test]
    fn negative_minor_of_path_plus_degrees() {
        // principal minor on rows/cols {0, 2, 3}
        let m = hub_path_plus_degrees();
        let idx = [0usize, 2, 3];
        let a: Vec<Vec<f64>> =
            idx.iter().map(|&i| idx.iter().map(|&j| m.get(i, j)).collect()).collect();
        let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
        assert_eq!(det, -4.0);
    }

    #[test]
    fn elementary_pairs_of_hub_connectivity() {
        let pairs = elementary_eigenpairs(&hub_connectivity()).unwrap();
        // every pair inside {0,1,2,3} with eigenvalue -4, plus (4,5) with -3
        assert_eq!(pairs.len(), 7);
        for p in &pairs {
            if p.x < 4 && p.y < 4 {
                assert_eq!(p.eigenvalue, -4.0);
            } else {
                assert_eq!((p.x, p.y), (4, 5));
                assert_eq!(p.eigenvalue, -3.0);
            }
        }
        // residual check of the eigenpair identity
        let c = hub_connectivity();
        for p in &pairs {
            for z in 0..6 {
                let lhs = c.get(z, p.x) - c.get(z, p.y);
                let rhs = if z == p.x {
                    p.eigenvalue
                } else if z == p.y {
                    -p.eigenvalue
                } else {
                    0.0
                };
                assert!((lhs - rhs).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn elementary_pairs_constant_matrix() {
        let c = SymMatrix::from_fn(4, Tol::default(), |i, j| if i == j { 0.0 } else { 5.0 });
        let pairs = elementary_eigenpairs(&c).unwrap();
        assert_eq!(pairs.len(), 6);
        assert!(pairs.iter().all(|p| p.eigenvalue == -5.0));
    }

    #[test]
    fn elementary_pairs_empty_when_maxima_disagree() {
        // off-diagonals (2, 1, 1) satisfy the triangle inequality; distinct
        // diagonals block every candidate pair
        let c = SymMatrix::from_rows_exact(
            &[&[5.0, 2.0, 1.0], &[2.0, 6.0, 1.0], &[1.0, 1.0, 7.0]],
            Tol::default(),
        );
        assert!(elementary_eigenpairs(&c).unwrap().is_empty());
    }

    #[test]
    fn elementary_pairs_require_triangle_inequality() {
        let c = SymMatrix::from_rows_exact(
            &[&[0.0, 3.0, 1.0], &[3.0, 0.0, 3.0], &[1.0, 3.0, 0.0]],
            Tol::default(),
        );
        assert_eq!(elementary_eigenpairs(&c).unwrap_err(), SpectraError::PreconditionViolated);
    }

    #[test]
    fn min_eig_matches_negated_max() {
        let report = min_eig_theorem_check(&hub_connectivity()).unwrap();
        assert!(report.matches);
        assert!((report.lambda_min + 4.0).abs() < 1e-10);
        assert_eq!(report.max_entry, 4.0);

        let zero = SymMatrix::zeros(4, Tol::default());
        let report = min_eig_theorem_check(&zero).unwrap();
        assert!(report.matches);
        assert_eq!(report.lambda_min, 0.0);

        assert_eq!(
            min_eig_theorem_check(&hub_path_plus_degrees()).unwrap_err(),
            SpectraError::NotRealizable
        );
    }

    #[test]
    fn spread_values() {
        let c = SymMatrix::from_fn(4, Tol::default(), |i, j| if i == j { 0.0 } else { 3.0 });
        assert!((spread(&c).unwrap() - 12.0).abs() < 1e-10);
        let s = spread(&hub_connectivity()).unwrap();
        let expect = (15.0 + 3.0 * 41.0f64.sqrt()) / 2.0 + 4.0;
        assert!((s - expect).abs() < 1e-10);
        let mut d = SymMatrix::zeros(2, Tol::default());
        d.set(0, 0, 1.0);
        d.set(1, 1, 1.0);
        assert_eq!(spread(&d).unwrap(), 0.0);
    }

    #[test]
    fn spectrum_quality_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let n = rng.random_range(1..=10);
            let c = SymMatrix::from_fn(n, Tol::default(), |_, _| rng.random_range(-5.0..5.0));
            let s = eigen_sym(&c).unwrap();
            assert!((s.sum() - c.trace()).abs() <= (n as f64) * 1e-9 * c.norm_inf().max(1.0));
            assert!(s.residual <= 1e-8 * f64::max(1.0, c.norm_inf()));
            let vs = s.eigenvectors.as_ref().unwrap();
            for a in 0..n {
                for b in 0..=a {
                    let dot: f64 = (0..n).map(|k| vs[a][k] * vs[b][k]).sum();
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((dot - want).abs() < 1e-9);
                }
            }
        }
    }
}
