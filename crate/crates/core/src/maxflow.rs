//! Maximum s-t flow / minimum s-t cut on weighted graphs.
//!
//! Blocking-flow (Dinic) augmentation: the number of phases is bounded by
//! the vertex count regardless of capacity values, so floating-point
//! capacities cannot cause nontermination. Residual capacities below the
//! absolute tolerance are treated as saturated.

use serde::Serialize;
use thiserror::Error;

use crate::graph::WeightedGraph;
use crate::tol::Tol;
use crate::VertexId;

/// A minimum s-t cut certificate.
///
/// `value` is the total weight of edges crossing the bipartition,
/// recomputed from the input graph and certified against the flow value.
/// `source_side[v]` is true exactly for the vertices reachable from `s`
/// in the final residual network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutResult {
    pub value: f64,
    pub source_side: Vec<bool>,
}

impl CutResult {
    pub fn source_vertices(&self) -> Vec<VertexId> {
        self.source_side.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MaxflowError {
    #[error("source and sink must differ")]
    SameVertex,
    #[error("vertex {v} out of range for n = {n}")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("graph is not unit-weighted")]
    NonUnitWeights,
    #[error("flow/cut certificate mismatch: flow {flow}, cut weight {cut}")]
    Numerical { flow: f64, cut: f64 },
}

struct Arc {
    to: usize,
    cap: f64,
}

/// Dinic network over paired arcs: arc 2k and 2k+1 are reverses of each other.
pub(crate) struct Dinic {
    adj: Vec<Vec<usize>>,
    arcs: Vec<Arc>,
    eps: f64,
}

impl Dinic {
    pub(crate) fn new(n: usize, eps: f64) -> Self {
        Dinic { adj: vec![Vec::new(); n], arcs: Vec::new(), eps }
    }

    /// Adds a directed arc with capacity `cap` and a reverse of capacity `rev_cap`.
    pub(crate) fn add_arc(&mut self, from: usize, to: usize, cap: f64, rev_cap: f64) {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap });
        self.arcs.push(Arc { to: from, cap: rev_cap });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
    }

    fn bfs_levels(&self, s: usize, t: usize) -> Option<Vec<i32>> {
        let mut level = vec![-1; self.adj.len()];
        let mut queue = std::collections::VecDeque::new();
        level[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if arc.cap > self.eps && level[arc.to] < 0 {
                    level[arc.to] = level[u] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        if level[t] >= 0 {
            Some(level)
        } else {
            None
        }
    }

    fn dfs_push(&mut self, u: usize, t: usize, pushed: f64, level: &[i32], it: &mut [usize]) -> f64 {
        if u == t {
            return pushed;
        }
        while it[u] < self.adj[u].len() {
            let a = self.adj[u][it[u]];
            let (to, cap) = (self.arcs[a].to, self.arcs[a].cap);
            if cap > self.eps && level[to] == level[u] + 1 {
                let got = self.dfs_push(to, t, pushed.min(cap), level, it);
                if got > 0.0 {
                    self.arcs[a].cap -= got;
                    self.arcs[a ^ 1].cap += got;
                    return got;
                }
            }
            it[u] += 1;
        }
        0.0
    }

    /// Runs Dinic to completion and returns the flow value.
    pub(crate) fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut flow = 0.0;
        while let Some(level) = self.bfs_levels(s, t) {
            let mut it = vec![0; self.adj.len()];
            loop {
                let pushed = self.dfs_push(s, t, f64::INFINITY, &level, &mut it);
                if pushed <= 0.0 {
                    break;
                }
                flow += pushed;
            }
        }
        flow
    }

    /// Vertices reachable from `s` through unsaturated arcs.
    pub(crate) fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if arc.cap > self.eps && !seen[arc.to] {
                    seen[arc.to] = true;
                    stack.push(arc.to);
                }
            }
        }
        seen
    }
}

fn check_pair(g: &WeightedGraph, s: VertexId, t: VertexId) -> Result<(), MaxflowError> {
    if s >= g.n() {
        return Err(MaxflowError::VertexOutOfRange { v: s, n: g.n() });
    }
    if t >= g.n() {
        return Err(MaxflowError::VertexOutOfRange { v: t, n: g.n() });
    }
    if s == t {
        return Err(MaxflowError::SameVertex);
    }
    Ok(())
}

/// Minimum-weight s-t cut. The returned cut weight is recomputed from the
/// side certificate and matched against the flow value within tolerance.
pub fn min_cut(g: &WeightedGraph, s: VertexId, t: VertexId, tol: Tol) -> Result<CutResult, MaxflowError> {
    check_pair(g, s, t)?;
    let mut net = Dinic::new(g.n(), tol.abs);
    for e in g.edges() {
        // an undirected edge is one arc pair with full capacity both ways
        net.add_arc(e.u, e.v, e.w, e.w);
    }
    let flow = net.max_flow(s, t);
    let side = net.residual_reachable(s);
    debug_assert!(side[s] && !side[t]);
    let cut: f64 = g
        .edges()
        .iter()
        .filter(|e| side[e.u] != side[e.v])
        .map(|e| e.w)
        .sum();
    if (flow - cut).abs() > tol.eps(flow, cut) * (g.edge_count() as f64 + 1.0) {
        return Err(MaxflowError::Numerical { flow, cut });
    }
    Ok(CutResult { value: cut, source_side: side })
}

/// Maximum number of internally vertex-disjoint s-t paths in a unit-weighted
/// graph, via max-flow on the vertex-split network: every vertex other than
/// s and t is split into an in/out pair joined by a unit arc; edge arcs
/// incident to s or t carry capacity n, internal edge arcs capacity 1, and
/// a direct s-t edge contributes exactly one unit.
pub fn local_vertex_connectivity(
    g: &WeightedGraph,
    s: VertexId,
    t: VertexId,
    tol: Tol,
) -> Result<usize, MaxflowError> {
    check_pair(g, s, t)?;
    if !g.is_unit_weighted(tol.abs) {
        return Err(MaxflowError::NonUnitWeights);
    }
    let n = g.n();
    let node_in = |v: usize| v;
    let node_out = |v: usize| v + n;
    let big = n as f64;
    let mut net = Dinic::new(2 * n, tol.abs);
    for v in 0..n {
        if v != s && v != t {
            net.add_arc(node_in(v), node_out(v), 1.0, 0.0);
        }
    }
    for e in g.edges() {
        for (a, b) in [(e.u, e.v), (e.v, e.u)] {
            if a == t || b == s {
                continue;
            }
            let cap = if a == s && b == t {
                1.0
            } else if a == s || b == t {
                big
            } else {
                1.0
            };
            net.add_arc(node_out(a), node_in(b), cap, 0.0);
        }
    }
    let flow = net.max_flow(node_out(s), node_in(t));
    let rounded = flow.round();
    debug_assert!((flow - rounded).abs() < 1e-6, "unit flow must be integral, got {flow}");
    Ok(rounded as usize)
}
