//! Dense symmetric matrices with tolerance-aware equality.
//!
//! Symmetry is enforced by storing a single triangle, so `get(i, j)` and
//! `get(j, i)` read the same cell by construction. All connectivity,
//! quotient and distance matrices in this crate are carried by this type.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::tol::Tol;

#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    /// Packed lower triangle, row-major: entry (i, j) with i >= j at i(i+1)/2 + j.
    data: Vec<f64>,
    tol: Tol,
}

#[derive(Debug, Error, PartialEq)]
pub enum MatrixParseError {
    #[error("line {0}: malformed matrix line")]
    MalformedLine(usize),
    #[error("missing dimension header")]
    MissingHeader,
    #[error("expected {expected} rows of {expected} entries, got {got}")]
    WrongShape { expected: usize, got: usize },
    #[error("asymmetric input: entries ({i},{j})={a} and ({j},{i})={b} differ beyond tolerance")]
    Asymmetric { i: usize, j: usize, a: f64, b: f64 },
}

#[inline]
fn tri_index(i: usize, j: usize) -> usize {
    let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
    hi * (hi + 1) / 2 + lo
}

impl SymMatrix {
    pub fn zeros(n: usize, tol: Tol) -> Self {
        SymMatrix { n, data: vec![0.0; n * (n + 1) / 2], tol }
    }

    pub fn from_fn(n: usize, tol: Tol, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SymMatrix::zeros(n, tol);
        for i in 0..n {
            for j in 0..=i {
                m.data[tri_index(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds from full rows, validating symmetry within tolerance.
    /// The stored entry is taken from the lower triangle.
    pub fn from_rows(rows: &[Vec<f64>], tol: Tol) -> Result<Self, MatrixParseError> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MatrixParseError::WrongShape { expected: n, got: row.len() });
            }
            for j in 0..i {
                if !tol.close(row[j], rows[j][i]) {
                    return Err(MatrixParseError::Asymmetric { i, j, a: row[j], b: rows[j][i] });
                }
            }
        }
        Ok(SymMatrix::from_fn(n, tol, |i, j| rows[i][j]))
    }

    /// Convenience constructor for literal test matrices (must be exactly symmetric).
    pub fn from_rows_exact(rows: &[&[f64]], tol: Tol) -> Self {
        let owned: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        SymMatrix::from_rows(&owned, tol).expect("literal matrix must be symmetric")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tol(&self) -> Tol {
        self.tol
    }

    pub fn set_tol(&mut self, tol: Tol) {
        self.tol = tol;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[tri_index(i, j)]
    }

    /// Sets both (i, j) and (j, i); they share storage.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[tri_index(i, j)] = value;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Row-major dense copy, n*n entries.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                out[i * self.n + j] = self.get(i, j);
            }
        }
        out
    }

    /// All packed entries (each unordered pair once, diagonal included).
    pub fn packed(&self) -> &[f64] {
        &self.data
    }

    /// Off-diagonal entries, each unordered pair once.
    pub fn offdiag_iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| (0..i).map(move |j| (i, j, self.get(i, j))))
    }

    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest off-diagonal entry, `None` for n < 2.
    pub fn offdiag_max(&self) -> Option<f64> {
        self.offdiag_iter().map(|(_, _, v)| v).fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }

    /// Smallest off-diagonal entry, `None` for n < 2.
    pub fn offdiag_min(&self) -> Option<f64> {
        self.offdiag_iter().map(|(_, _, v)| v).fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.min(v))))
    }

    /// Largest off-diagonal entry in row `i`, `None` for n < 2.
    pub fn row_offdiag_max(&self, i: usize) -> Option<f64> {
        (0..self.n)
            .filter(|&j| j != i)
            .map(|j| self.get(i, j))
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }

    /// Smallest off-diagonal entry in row `i`, `None` for n < 2.
    pub fn row_offdiag_min(&self, i: usize) -> Option<f64> {
        (0..self.n)
            .filter(|&j| j != i)
            .map(|j| self.get(i, j))
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.min(v))))
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self.get(i, j) * self.get(i, j);
            }
        }
        s.sqrt()
    }

    pub fn is_zero_diagonal(&self) -> bool {
        (0..self.n).all(|i| self.tol.is_zero(self.get(i, i)))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&v| v >= -self.tol.abs)
    }

    pub fn neg(&self) -> SymMatrix {
        SymMatrix { n: self.n, data: self.data.iter().map(|v| -v).collect(), tol: self.tol }
    }

    /// Adds `d[i]` to the i-th diagonal entry.
    pub fn add_diag(&self, d: &[f64]) -> SymMatrix {
        assert_eq!(d.len(), self.n);
        let mut out = self.clone();
        for i in 0..self.n {
            out.set(i, i, out.get(i, i) + d[i]);
        }
        out
    }

    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &SymMatrix) -> bool {
        self.n == other.n
            && self
                .data
                .iter()
                .zip(other.data.iter())
                .all(|(&a, &b)| self.tol.close(a, b))
    }

    /// Parses the shared matrix text format: dimension line, then n rows of
    /// n whitespace-separated entries. `#` starts a comment, blank lines are
    /// skipped. Symmetry is validated within tolerance.
    pub fn parse_text(text: &str, tol: Tol) -> Result<Self, MatrixParseError> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut n: Option<usize> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match n {
                None => {
                    n = Some(line.parse().map_err(|_| MatrixParseError::MalformedLine(line_no))?);
                }
                Some(dim) => {
                    let row: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse).collect();
                    let row = row.map_err(|_| MatrixParseError::MalformedLine(line_no))?;
                    if row.len() != dim {
                        return Err(MatrixParseError::MalformedLine(line_no));
                    }
                    rows.push(row);
                }
            }
        }
        let dim = n.ok_or(MatrixParseError::MissingHeader)?;
        if rows.len() != dim {
            return Err(MatrixParseError::WrongShape { expected: dim, got: rows.len() });
        }
        SymMatrix::from_rows(&rows, tol)
    }

    /// Renders the matrix text format with 17 significant digits.
    pub fn render_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{:.16e}", self.get(i, j))).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

impl Serialize for SymMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> =
            (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect();
        let mut s = serializer.serialize_struct("SymMatrix", 2)?;
        s.serialize_field("n", &self.n)?;
        s.serialize_field("rows", &rows)?;
        s.end()
    }
}
