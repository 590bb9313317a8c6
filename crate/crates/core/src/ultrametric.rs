//! Ultrametric distance matrices: validation, the connectivity/distance
//! transform, the quotient analogue, and smallest-eigenvalue bounds via
//! extremal interval matrices.
//!
//! An ultrametric satisfies the strong triangle inequality
//! `d(x,z) <= max(d(x,y), d(y,z))`. Negating such a matrix yields one
//! satisfying the min-triangle inequality, so the row-extremum machinery
//! from the quotient module carries over with maxima replaced by
//! nearest-point radii.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::matrix::SymMatrix;
use crate::quotient::QuotientReport;
use crate::spectra::{self, SpectraError};
use crate::tol::Tol;
use crate::VertexId;

#[derive(Debug, Error, PartialEq)]
pub enum UltrametricError {
    #[error("distance matrix must have a zero diagonal (entry {0})")]
    NonzeroDiagonal(VertexId),
    #[error("off-diagonal distances must be positive (pair ({0}, {1}))")]
    NonpositiveEntry(VertexId, VertexId),
    #[error("strong triangle inequality fails on {0} triples")]
    NotUltrametric(usize),
    #[error("matrix is not realizable as an edge-connectivity matrix")]
    NotRealizable,
    #[error("zero connectivity entry at pair ({0}, {1}); the source graph is disconnected")]
    ZeroEntry(VertexId, VertexId),
    #[error("empty interval: lower bound {m} exceeds upper bound {big_m}")]
    BadInterval { m: f64, big_m: f64 },
    #[error(transparent)]
    Quotient(#[from] crate::quotient::QuotientError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

/// A triple violating `d(x,z) <= max(d(x,y), d(y,z))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrongTriangleViolation {
    pub x: VertexId,
    pub y: VertexId,
    pub z: VertexId,
    /// d(x,z)
    pub lhs: f64,
    /// max(d(x,y), d(y,z))
    pub rhs: f64,
}

/// Checks the strong triangle inequality on a zero-diagonal symmetric
/// matrix; returns every violating triple (empty iff ultrametric).
pub fn check_ultrametric(d: &SymMatrix) -> Result<Vec<StrongTriangleViolation>, UltrametricError> {
    let n = d.n();
    let tol = d.tol();
    for i in 0..n {
        if !tol.is_zero(d.get(i, i)) {
            return Err(UltrametricError::NonzeroDiagonal(i));
        }
    }
    let mut out = Vec::new();
    for x in 0..n {
        for z in (x + 1)..n {
            let lhs = d.get(x, z);
            for y in 0..n {
                if y == x || y == z {
                    continue;
                }
                let rhs = d.get(x, y).max(d.get(y, z));
                if tol.lt(rhs, lhs) {
                    out.push(StrongTriangleViolation { x, y, z, lhs, rhs });
                }
            }
        }
    }
    Ok(out)
}

/// A validated ultrametric distance matrix: zero diagonal, positive
/// off-diagonal entries, strong triangle inequality within tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UltrametricMatrix {
    matrix: SymMatrix,
}

impl UltrametricMatrix {
    pub fn new(matrix: SymMatrix) -> Result<Self, UltrametricError> {
        for (i, j, v) in matrix.offdiag_iter() {
            if v <= 0.0 {
                return Err(UltrametricError::NonpositiveEntry(j, i));
            }
        }
        let violations = check_ultrametric(&matrix)?;
        if !violations.is_empty() {
            return Err(UltrametricError::NotUltrametric(violations.len()));
        }
        Ok(UltrametricMatrix { matrix })
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }
}

/// Entrywise reciprocal transform from a realizable connectivity matrix
/// with positive off-diagonal entries to an ultrametric distance matrix.
pub fn from_connectivity(c: &SymMatrix) -> Result<UltrametricMatrix, UltrametricError> {
    if !crate::matrix_props::is_realizable(c) {
        return Err(UltrametricError::NotRealizable);
    }
    for (i, j, v) in c.offdiag_iter() {
        if c.tol().is_zero(v) {
            return Err(UltrametricError::ZeroEntry(j, i));
        }
    }
    let d = SymMatrix::from_fn(c.n(), c.tol(), |i, j| if i == j { 0.0 } else { 1.0 / c.get(i, j) });
    UltrametricMatrix::new(d)
}

/// A mutually-nearest pair: `e_x - e_y` is an eigenvector of the distance
/// matrix with eigenvalue `-d(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MutualNearestPair {
    pub x: VertexId,
    pub y: VertexId,
    pub eigenvalue: f64,
}

/// Quotient analogue for ultrametric matrices plus the mutually-nearest
/// eigenpair sub-check.
#[derive(Debug, Clone, Serialize)]
pub struct UltrametricReport {
    pub quotient: QuotientReport,
    pub mutual_nearest: Vec<MutualNearestPair>,
}

/// All pairs (x, y), x < y, with `d(x,y)` minimal among the off-diagonal
/// entries of both rows.
pub fn mutual_nearest_pairs(d: &UltrametricMatrix) -> Vec<MutualNearestPair> {
    let m = d.matrix();
    let n = m.n();
    let tol = m.tol();
    let mut out = Vec::new();
    for x in 0..n {
        for y in (x + 1)..n {
            let dxy = m.get(x, y);
            let nearest = (0..n).all(|z| {
                (z == x || tol.le(dxy, m.get(x, z))) && (z == y || tol.le(dxy, m.get(z, y)))
            });
            if nearest {
                out.push(MutualNearestPair { x, y, eigenvalue: -dxy });
            }
        }
    }
    out
}

/// Classes by nearest-point radii `r(x) = min off-diagonal of row x`
/// (`x ~ y` iff `r(x) = r(y) = d(x,y)`), quotient matrix with diagonal
/// `r(X_i)(|X_i| - 1)`, and the energy decomposition
/// `E(D) = E(Q) + trace(Q) >= 2 sum (|X_i|-1) r(X_i)`.
pub fn ultrametric_quotient(d: &UltrametricMatrix) -> Result<UltrametricReport, UltrametricError> {
    let m = d.matrix();
    let n = m.n();
    let tol = m.tol();
    let reps = tol.cluster(m.packed());
    let s = SymMatrix::from_fn(n, tol, |i, j| tol.snap(&reps, m.get(i, j)));
    let radii: Vec<f64> = (0..n)
        .map(|v| if n < 2 { 0.0 } else { s.row_offdiag_min(v).expect("n >= 2") })
        .collect();
    let related = |x: usize, y: usize| radii[x] == radii[y] && s.get(x, y) == radii[x];
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
    for members in &classes {
        for (a, &x) in members.iter().enumerate() {
            for &y in &members[a + 1..] {
                if !related(x, y) {
                    return Err(crate::quotient::QuotientError::TransitivityBroken {
                        x,
                        y,
                        z: members[0],
                    }
                    .into());
                }
            }
        }
    }
    let k = classes.len();
    let class_radii: Vec<f64> = classes.iter().map(|c| radii[c[0]]).collect();
    let mut q = vec![vec![0.0; k]; k];
    for (i, rows) in classes.iter().enumerate() {
        for (j, cols) in classes.iter().enumerate() {
            let sum_for = |x: usize| -> f64 { cols.iter().map(|&y| s.get(x, y)).sum() };
            let s0 = sum_for(rows[0]);
            for &x in &rows[1..] {
                if !tol.close(sum_for(x), s0) {
                    return Err(crate::quotient::QuotientError::NonEquitableBlock { i, j }.into());
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
            q[i][j] / sj * (si * sj).sqrt()
        }
    });
    let energy_c = spectra::energy(&s)?;
    let spec_q = spectra::eigen_sym(&q_sym)?;
    let energy_q = spec_q.energy();
    let trace_q: f64 = (0..k).map(|i| q[i][i]).sum();
    let lower_bound = 2.0
        * classes
            .iter()
            .zip(class_radii.iter())
            .map(|(members, r)| (members.len() as f64 - 1.0) * r)
            .sum::<f64>();
    let lambda_min_q = if k == 0 { 0.0 } else { spec_q.lambda_min() };
    let tight = lambda_min_q >= -(k as f64) * tol.abs * f64::max(1.0, q_sym.norm_inf());
    let quotient = QuotientReport {
        classes,
        class_maxima: class_radii,
        q,
        q_sym,
        energy_c,
        energy_q,
        trace_q,
        lower_bound,
        tight,
    };
    Ok(UltrametricReport { quotient, mutual_nearest: mutual_nearest_pairs(d) })
}

/// The extremal interval matrix: entries `m` inside two near-equal parts
/// (diagonal included) and `M` across, which minimizes the smallest
/// eigenvalue over all symmetric matrices with entries in `[m, M]`.
/// Returns the matrix together with the closed-form optimum, certified
/// against the eigensolver.
pub fn zhan_extremal(
    n: usize,
    m: f64,
    big_m: f64,
    tol: Tol,
) -> Result<(SymMatrix, f64), UltrametricError> {
    assert!(n >= 2, "need at least two vertices");
    if m > big_m {
        return Err(UltrametricError::BadInterval { m, big_m });
    }
    let half = n.div_ceil(2);
    let x = SymMatrix::from_fn(n, tol, |i, j| {
        let same_part = (i < half) == (j < half);
        if same_part {
            m
        } else {
            big_m
        }
    });
    let lambda = if n % 2 == 0 {
        n as f64 * (m - big_m) / 2.0
    } else {
        (n as f64 * m - (m * m + ((n * n - 1) as f64) * big_m * big_m).sqrt()) / 2.0
    };
    let computed = spectra::eigenvalues_only(&x)?;
    let computed_min = computed[computed.len() - 1];
    let scale = f64::max(1.0, x.norm_inf());
    if (computed_min - lambda).abs() > 1e-8 * scale {
        return Err(SpectraError::NoConvergence(0).into());
    }
    Ok((x, lambda))
}

/// Smallest-eigenvalue bound report for an ultrametric distance matrix.
#[derive(Debug, Clone, Serialize)]
pub struct MinEigBoundReport {
    /// min and max off-diagonal distance
    pub m: f64,
    pub big_m: f64,
    /// extremal-interval optimum shifted by -m
    pub bound: f64,
    pub lambda_min: f64,
    /// the matrix is exactly the extremal pattern (two near-equal parts,
    /// m inside, M across), where the bound is an equality
    pub attained: bool,
}

/// Lower bound on the smallest eigenvalue: the extremal interval optimum
/// for `[m, M]` minus `m`. Attained exactly by the two-block pattern.
pub fn ultrametric_min_eig_bound(d: &UltrametricMatrix) -> Result<MinEigBoundReport, UltrametricError> {
    let mat = d.matrix();
    let n = mat.n();
    let tol = mat.tol();
    let m = mat.offdiag_min().expect("n >= 2 for a distance matrix");
    let big_m = mat.offdiag_max().expect("n >= 2");
    let (_, lambda_star) = zhan_extremal(n, m, big_m, tol)?;
    let bound = lambda_star - m;
    let values = spectra::eigenvalues_only(mat)?;
    let lambda_min = values[values.len() - 1];
    Ok(MinEigBoundReport { m, big_m, bound, lambda_min, attained: is_extremal_pattern(mat, m, big_m) })
}

// Two off-diagonal values arranged as a balanced 2-block pattern: take the
// part containing vertex 0 as everything at distance ~m from it; the parts
// must be near-equal in size, constant m inside and constant M across.
fn is_extremal_pattern(mat: &SymMatrix, m: f64, big_m: f64) -> bool {
    let n = mat.n();
    let tol = mat.tol();
    if tol.close(m, big_m) {
        // single-value matrices fit the pattern for any balanced bipartition
        return true;
    }
    let part0: Vec<usize> =
        (0..n).filter(|&v| v == 0 || tol.close(mat.get(0, v), m)).collect();
    let part1: Vec<usize> = (0..n).filter(|&v| !part0.contains(&v)).collect();
    let bigger = part0.len().max(part1.len());
    let smaller = part0.len().min(part1.len());
    if bigger - smaller > 1 {
        return false;
    }
    for (i, j, v) in mat.offdiag_iter() {
        let same = part0.contains(&i) == part0.contains(&j);
        let want = if same { m } else { big_m };
        if !tol.close(v, want) {
            return false;
        }
    }
    true
}

/// Random ultrametric from a random binary merge hierarchy with strictly
/// increasing heights; valid by construction.
pub fn random_ultrametric<R: Rng>(n: usize, rng: &mut R, tol: Tol) -> UltrametricMatrix {
    assert!(n >= 2);
    let mut d = SymMatrix::zeros(n, tol);
    // each cluster is a list of vertex ids
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut height = rng.random_range(0.1..1.0);
    while clusters.len() > 1 {
        let a = rng.random_range(0..clusters.len());
        let mut b = rng.random_range(0..clusters.len() - 1);
        if b >= a {
            b += 1;
        }
        let (first, second) = (a.min(b), a.max(b));
        let right = clusters.swap_remove(second);
        for &u in &clusters[first] {
            for &v in &right {
                d.set(u, v, height);
            }
        }
        clusters[first].extend(right);
        height += rng.random_range(0.05..1.0);
    }
    UltrametricMatrix::new(d).expect("hierarchy construction yields an ultrametric")
}
