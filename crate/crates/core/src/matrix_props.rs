//! Realizability of symmetric matrices as edge-connectivity matrices.
//!
//! The checks implemented here revolve around the min-triangle inequality
//! `c_xz >= min(c_xy, c_yz)` and the equivalent "terraced" structure: every
//! superlevel set `{(v,w) : c_vw >= l}` must be a disjoint union of
//! Cartesian squares `X x X`. A nonnegative zero-diagonal matrix occurs as
//! the edge-connectivity matrix of some weighted graph exactly when the
//! off-diagonal inequality holds, and a realizing tree can then be built
//! from a maximum-weight spanning tree over the entries.

use serde::Serialize;
use thiserror::Error;

use crate::graph::WeightedGraph;
use crate::matrix::SymMatrix;
use crate::VertexId;

/// A triple violating `c_xz >= min(c_xy, c_yz)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriangleViolation {
    pub x: VertexId,
    pub y: VertexId,
    pub z: VertexId,
    /// c_xz
    pub lhs: f64,
    /// min(c_xy, c_yz)
    pub rhs: f64,
}

/// Returns every violating triple, empty iff the inequality holds.
///
/// With `include_diagonal = false` only pairwise-distinct triples are
/// checked (the realizability condition for zero-diagonal matrices). With
/// `include_diagonal = true` triples with repeated indices participate as
/// well; the only ones that can bind are x = z, which amount to diagonal
/// dominance `c_xx >= c_xy`, reported as triples (x, y, x).
pub fn check_gh_triangle(c: &SymMatrix, include_diagonal: bool) -> Vec<TriangleViolation> {
    let n = c.n();
    let tol = c.tol();
    let mut out = Vec::new();
    for x in 0..n {
        for z in (x + 1)..n {
            let lhs = c.get(x, z);
            for y in 0..n {
                if y == x || y == z {
                    continue;
                }
                let rhs = c.get(x, y).min(c.get(y, z));
                if tol.lt(lhs, rhs) {
                    out.push(TriangleViolation { x, y, z, lhs, rhs });
                }
            }
        }
    }
    if include_diagonal {
        for x in 0..n {
            let lhs = c.get(x, x);
            for y in 0..n {
                if y == x {
                    continue;
                }
                let rhs = c.get(x, y);
                if tol.lt(lhs, rhs) {
                    out.push(TriangleViolation { x, y, z: x, lhs, rhs });
                }
            }
        }
    }
    out
}

/// Superlevel-set decomposition of a terraced matrix.
///
/// `levels` holds the distinct entry values (tolerance-clustered,
/// ascending); `families[i]` is the family of pairwise disjoint blocks
/// whose squares tile the superlevel set of `levels[i]`. The family of the
/// lowest level is always the single block of all vertices. Families are
/// laminar: every block of a higher level sits inside one block of each
/// lower level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TerraceDecomposition {
    pub levels: Vec<f64>,
    pub families: Vec<Vec<Vec<VertexId>>>,
    n: usize,
}

/// Witness that some superlevel set is not a disjoint union of squares:
/// at `level`, the vertices of `members` are linked by entries >= level,
/// yet the pair `missing` has an entry below it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TerraceFailure {
    pub level: f64,
    pub members: Vec<VertexId>,
    pub missing: (VertexId, VertexId),
}

/// Outcome of [`terrace_decomposition`]; failure is a value, not an error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum TerraceOutcome {
    Terraced(TerraceDecomposition),
    NotTerraced(TerraceFailure),
}

impl TerraceOutcome {
    pub fn decomposition(&self) -> Option<&TerraceDecomposition> {
        match self {
            TerraceOutcome::Terraced(d) => Some(d),
            TerraceOutcome::NotTerraced(_) => None,
        }
    }

    pub fn is_terraced(&self) -> bool {
        matches!(self, TerraceOutcome::Terraced(_))
    }
}

impl TerraceDecomposition {
    /// Rebuilds the matrix as `l0*J + sum over levels and blocks of
    /// (l_i - l_{i-1}) * J_X`; equals the input up to tolerance clustering.
    pub fn reconstruct(&self, tol: crate::tol::Tol) -> SymMatrix {
        let mut m = SymMatrix::from_fn(self.n, tol, |_, _| self.levels[0]);
        for i in 1..self.levels.len() {
            let step = self.levels[i] - self.levels[i - 1];
            for block in &self.families[i] {
                for (a, &u) in block.iter().enumerate() {
                    for &v in &block[a..] {
                        m.set(u, v, m.get(u, v) + step);
                    }
                }
            }
        }
        m
    }

    /// One line per level: the value followed by its blocks.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (i, level) in self.levels.iter().enumerate() {
            let blocks: Vec<String> = self.families[i]
                .iter()
                .map(|b| {
                    let ids: Vec<String> = b.iter().map(|v| v.to_string()).collect();
                    format!("{{{}}}", ids.join(","))
                })
                .collect();
            out.push_str(&format!("level {} blocks {}\n", level, blocks.join(" ")));
        }
        out
    }
}

// Recursive split from the constructive direction of the characterization:
// take the minimum entry L of the current principal submatrix, pick the
// first column holding it, split off the vertices tied to that column at L,
// and require every entry across the split to equal L.
struct SplitNode {
    members: Vec<usize>,
    level: f64,
    children: Vec<SplitNode>,
}

fn split(verts: Vec<usize>, snapped: &SymMatrix) -> Result<SplitNode, ()> {
    if verts.len() == 1 {
        let v = verts[0];
        return Ok(SplitNode { members: verts, level: snapped.get(v, v), children: Vec::new() });
    }
    let mut level = f64::INFINITY;
    for (a, &u) in verts.iter().enumerate() {
        for &v in &verts[a..] {
            level = level.min(snapped.get(u, v));
        }
    }
    let z = *verts
        .iter()
        .find(|&&z| verts.iter().any(|&x| x != z && snapped.get(x, z) == level) || snapped.get(z, z) == level)
        .ok_or(())?;
    let (x_side, y_side): (Vec<usize>, Vec<usize>) =
        verts.iter().copied().partition(|&x| x != z && snapped.get(x, z) == level);
    if x_side.is_empty() || y_side.is_empty() {
        return Err(());
    }
    for &x in &x_side {
        for &y in &y_side {
            if snapped.get(x, y) != level {
                return Err(());
            }
        }
    }
    let children = vec![split(x_side, snapped)?, split(y_side, snapped)?];
    Ok(SplitNode { members: verts, level, children })
}

fn collect_family(node: &SplitNode, level: f64, out: &mut Vec<Vec<usize>>) {
    if node.level >= level {
        out.push(node.members.clone());
    } else {
        for child in &node.children {
            collect_family(child, level, out);
        }
    }
}

/// Snaps every entry to its tolerance cluster representative. Snapping is
/// monotone, so order relations between entries survive.
fn snap_matrix(c: &SymMatrix) -> (SymMatrix, Vec<f64>) {
    let tol = c.tol();
    let reps = tol.cluster(c.packed());
    let snapped = SymMatrix::from_fn(c.n(), tol, |i, j| tol.snap(&reps, c.get(i, j)));
    (snapped, reps)
}

/// Tests the terraced property constructively and, on success, returns the
/// full level/block decomposition. Values within tolerance of each other
/// are treated as one level. Failure carries the smallest violating level
/// with its offending superlevel component.
pub fn terrace_decomposition(c: &SymMatrix) -> TerraceOutcome {
    let n = c.n();
    if n == 0 {
        return TerraceOutcome::Terraced(TerraceDecomposition { levels: Vec::new(), families: Vec::new(), n });
    }
    let (snapped, reps) = snap_matrix(c);
    match split((0..n).collect(), &snapped) {
        Ok(tree) => {
            let mut families = Vec::with_capacity(reps.len());
            for &level in &reps {
                let mut family = Vec::new();
                collect_family(&tree, level, &mut family);
                // vertices whose own diagonal falls below the level drop out
                // as singletons only; collect_family keeps exactly the nodes
                // with submatrix minimum >= level, which is the block family
                families.push(family);
            }
            TerraceOutcome::Terraced(TerraceDecomposition { levels: reps, families, n })
        }
        Err(()) => TerraceOutcome::NotTerraced(
            first_violating_level(&snapped, &reps).expect("split failed, so some superlevel set is not a union of squares"),
        ),
    }
}

// Direct scan used only to produce the failure witness: for each level
// ascending, join vertices linked by entries >= level and check that each
// resulting component is a full square of the superlevel set.
fn first_violating_level(snapped: &SymMatrix, reps: &[f64]) -> Option<TerraceFailure> {
    let n = snapped.n();
    for &level in reps {
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut covered = vec![false; n];
        for i in 0..n {
            for j in 0..i {
                if snapped.get(i, j) >= level {
                    covered[i] = true;
                    covered[j] = true;
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri] = rj;
                    }
                }
            }
        }
        for i in 0..n {
            if snapped.get(i, i) >= level {
                covered[i] = true;
            }
        }
        let mut components: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for v in 0..n {
            if covered[v] {
                let r = find(&mut parent, v);
                components.entry(r).or_default().push(v);
            }
        }
        for members in components.values() {
            for (a, &u) in members.iter().enumerate() {
                for &v in &members[a..] {
                    if snapped.get(u, v) < level {
                        return Some(TerraceFailure { level, members: members.clone(), missing: (u, v) });
                    }
                }
            }
        }
    }
    None
}

#[derive(Debug, Error, PartialEq)]
pub enum RealizeError {
    #[error("matrix is not realizable as an edge-connectivity matrix")]
    NotRealizable,
    #[error("realization round trip failed: max deviation {0}")]
    CertificateFailed(f64),
}

/// A symmetric nonnegative zero-diagonal matrix occurs as an
/// edge-connectivity matrix iff the off-diagonal min-triangle
/// inequality holds.
pub fn is_realizable(c: &SymMatrix) -> bool {
    c.is_nonnegative() && c.is_zero_diagonal() && check_gh_triangle(c, false).is_empty()
}

/// Builds a weighted tree whose edge-connectivity matrix is `c`, as the
/// maximum-weight spanning tree of the complete graph weighted by the
/// entries. Before returning, the tree's connectivity matrix is recomputed
/// by brute force and certified against the input.
pub fn realize_flow_tree(c: &SymMatrix) -> Result<WeightedGraph, RealizeError> {
    if !is_realizable(c) {
        return Err(RealizeError::NotRealizable);
    }
    let n = c.n();
    if n == 0 {
        return Ok(WeightedGraph::edgeless(0));
    }
    // Prim's algorithm, maximizing
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::NEG_INFINITY; n];
    let mut edge_to = vec![0usize; n];
    in_tree[0] = true;
    for v in 1..n {
        best[v] = c.get(0, v);
    }
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for _ in 1..n {
        let u = (0..n)
            .filter(|&v| !in_tree[v])
            .max_by(|&a, &b| best[a].partial_cmp(&best[b]).unwrap())
            .expect("a vertex remains");
        in_tree[u] = true;
        edges.push((u, edge_to[u], c.get(u, edge_to[u])));
        for v in 0..n {
            if !in_tree[v] && c.get(u, v) > best[v] {
                best[v] = c.get(u, v);
                edge_to[v] = u;
            }
        }
    }
    let tree = WeightedGraph::new(n, &edges).expect("spanning tree edges are valid");
    let realized = crate::connmat::edge_connectivity_matrix_bruteforce(&tree, c.tol())
        .expect("tree cuts cannot fail");
    let dev = realized.max_abs_diff(c);
    if !realized.approx_eq(c) {
        return Err(RealizeError::CertificateFailed(dev));
    }
    Ok(tree)
}

/// Distinct off-diagonal values under tolerance clustering, ascending.
pub fn distinct_offdiag_values(c: &SymMatrix) -> Vec<f64> {
    let values: Vec<f64> = c.offdiag_iter().map(|(_, _, v)| v).collect();
    if values.is_empty() {
        return Vec::new();
    }
    c.tol().cluster(&values)
}
