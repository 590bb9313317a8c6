//! All-pairs connectivity matrices and flow-equivalent trees.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::WeightedGraph;
use crate::matrix::SymMatrix;
use crate::maxflow::{self, MaxflowError};
use crate::tol::Tol;

/// A weighted tree on the same vertex set as a source graph whose path
/// minima reproduce all pairwise minimum-cut values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowTree {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ConnmatError {
    #[error("need at least two vertices, got {0}")]
    TooSmall(usize),
    #[error("edge list does not form a spanning tree")]
    NotATree,
    #[error(transparent)]
    Flow(#[from] MaxflowError),
}

impl FlowTree {
    /// Validates that the edges form a spanning tree on `0..n`.
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self, ConnmatError> {
        if n < 1 {
            return Err(ConnmatError::TooSmall(n));
        }
        if edges.len() != n - 1 {
            return Err(ConnmatError::NotATree);
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(u, v, w) in &edges {
            if u >= n || v >= n || u == v || w < 0.0 {
                return Err(ConnmatError::NotATree);
            }
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                return Err(ConnmatError::NotATree);
            }
            parent[ru] = rv;
        }
        Ok(FlowTree { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// View of the tree as a weighted graph (for cuts, rendering, round trips).
    pub fn to_graph(&self) -> WeightedGraph {
        WeightedGraph::new(self.n, &self.edges).expect("validated tree edges")
    }

    /// `n` line followed by n-1 `u v w` lines, 17 significant digits.
    pub fn render_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for &(u, v, w) in &self.edges {
            out.push_str(&format!("{} {} {:.16e}\n", u, v, w));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, ConnmatError> {
        let g = WeightedGraph::parse_edge_list(text).map_err(|_| ConnmatError::NotATree)?;
        FlowTree::new(g.n(), g.edges().iter().map(|e| (e.u, e.v, e.w)).collect())
    }
}

/// Gomory-Hu flow-equivalent tree via Gusfield's algorithm: no vertex
/// contraction, one minimum cut per non-root vertex against its current
/// tree parent, neighbors on the source side reattached afterwards.
/// Tie-breaking follows the deterministic residual-reachability certificate
/// from `maxflow`, so identical inputs give identical trees.
pub fn gomory_hu_tree(g: &WeightedGraph, tol: Tol) -> Result<FlowTree, ConnmatError> {
    let n = g.n();
    if n < 2 {
        return Err(ConnmatError::TooSmall(n));
    }
    let mut parent = vec![0usize; n];
    let mut weight = vec![0.0f64; n];
    for s in 1..n {
        let t = parent[s];
        let cut = maxflow::min_cut(g, s, t, tol)?;
        weight[s] = cut.value;
        // vertices not yet processed that hang off t and fall on s's side
        // of the cut move under s
        for v in (s + 1)..n {
            if cut.source_side[v] && parent[v] == t {
                parent[v] = s;
            }
        }
    }
    let edges = (1..n).map(|v| (v, parent[v], weight[v])).collect();
    FlowTree::new(n, edges)
}

/// Entry (v, w) is the minimum edge weight on the unique tree path; zero diagonal.
pub fn matrix_from_flow_tree(t: &FlowTree, tol: Tol) -> SymMatrix {
    let n = t.n();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(u, v, w) in t.edges() {
        adj[u].push((v, w));
        adj[v].push((u, w));
    }
    let mut m = SymMatrix::zeros(n, tol);
    for root in 0..n {
        // DFS from root carrying the running path minimum
        let mut seen = vec![false; n];
        let mut stack = vec![(root, f64::INFINITY)];
        seen[root] = true;
        while let Some((u, lim)) = stack.pop() {
            for &(v, w) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    let m_uv = lim.min(w);
                    if v > root {
                        m.set(root, v, m_uv);
                    }
                    stack.push((v, m_uv));
                }
            }
        }
    }
    m
}

/// Independent oracle for the flow-tree pipeline: one minimum cut per pair.
/// Pairs fan out to parallel workers when the graph is large enough for the
/// scheduling overhead to pay off.
pub fn edge_connectivity_matrix_bruteforce(g: &WeightedGraph, tol: Tol) -> Result<SymMatrix, ConnmatError> {
    let n = g.n();
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).collect();
    let compute = |&(i, j): &(usize, usize)| -> Result<(usize, usize, f64), ConnmatError> {
        Ok((i, j, maxflow::min_cut(g, i, j, tol)?.value))
    };
    let values: Result<Vec<_>, _> = if pairs.len() >= 64 {
        pairs.par_iter().map(compute).collect()
    } else {
        pairs.iter().map(compute).collect()
    };
    let mut m = SymMatrix::zeros(n, tol);
    for (i, j, v) in values? {
        m.set(i, j, v);
    }
    Ok(m)
}

/// Entry (v, w) is the maximum number of internally vertex-disjoint paths;
/// zero diagonal. Requires a unit-weighted graph.
pub fn vertex_connectivity_matrix(g: &WeightedGraph, tol: Tol) -> Result<SymMatrix, ConnmatError> {
    if !g.is_unit_weighted(tol.abs) {
        return Err(ConnmatError::Flow(MaxflowError::NonUnitWeights));
    }
    let n = g.n();
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).collect();
    let compute = |&(i, j): &(usize, usize)| -> Result<(usize, usize, f64), ConnmatError> {
        Ok((i, j, maxflow::local_vertex_connectivity(g, i, j, tol)? as f64))
    };
    let values: Result<Vec<_>, _> = if pairs.len() >= 64 {
        pairs.par_iter().map(compute).collect()
    } else {
        pairs.iter().map(compute).collect()
    };
    let mut m = SymMatrix::zeros(n, tol);
    for (i, j, v) in values? {
        m.set(i, j, v);
    }
    Ok(m)
}

/// Diagonal matrix of vertex degrees of a unit-weighted graph.
pub fn degree_diag(g: &WeightedGraph, tol: Tol) -> Result<SymMatrix, ConnmatError> {
    if !g.is_unit_weighted(tol.abs) {
        return Err(ConnmatError::Flow(MaxflowError::NonUnitWeights));
    }
    let deg = g.degrees();
    let mut m = SymMatrix::zeros(g.n(), tol);
    for (i, d) in deg.iter().enumerate() {
        m.set(i, i, *d as f64);
    }
    Ok(m)
}
