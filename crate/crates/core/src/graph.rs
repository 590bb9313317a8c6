//! Weighted undirected graphs: construction, validation and text I/O.

use serde::Serialize;
use thiserror::Error;

use crate::VertexId;

/// A single undirected edge with nonnegative weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub w: f64,
}

/// Immutable weighted undirected graph on vertices `0..n`.
///
/// Simple by construction: self-loops are rejected and parallel edges are
/// merged by summing their weights (cut weights are additive over parallel
/// edges, so merging preserves every connectivity value). Weight-zero edges
/// are permitted and behave like absent edges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("line {0}: malformed edge line")]
    MalformedLine(usize),
    #[error("missing vertex count header")]
    MissingHeader,
    #[error("vertex {v} out of range for n = {n}")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("negative weight {w} on edge ({u}, {v})")]
    NegativeWeight { u: usize, v: usize, w: f64 },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
}

impl WeightedGraph {
    /// Validates and merges the edge list. Edge order is first occurrence.
    pub fn new(n: usize, edges: &[(VertexId, VertexId, f64)]) -> Result<Self, GraphError> {
        let mut merged: Vec<Edge> = Vec::with_capacity(edges.len());
        let mut slot = vec![usize::MAX; n * n];
        for &(u, v, w) in edges {
            if u >= n {
                return Err(GraphError::VertexOutOfRange { v: u, n });
            }
            if v >= n {
                return Err(GraphError::VertexOutOfRange { v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if w < 0.0 {
                return Err(GraphError::NegativeWeight { u, v, w });
            }
            let key = u.min(v) * n + u.max(v);
            if slot[key] == usize::MAX {
                slot[key] = merged.len();
                merged.push(Edge { u: u.min(v), v: u.max(v), w });
            } else {
                merged[slot[key]].w += w;
            }
        }
        Ok(WeightedGraph { n, edges: merged })
    }

    pub fn edgeless(n: usize) -> Self {
        WeightedGraph { n, edges: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of incident edges per vertex (weights ignored).
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    /// All edge weights are 1 within `eps`.
    pub fn is_unit_weighted(&self, eps: f64) -> bool {
        self.edges.iter().all(|e| (e.w - 1.0).abs() <= eps)
    }

    /// Connectivity counting only edges of positive weight.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            if e.w > 0.0 {
                adj[e.u].push(e.v);
                adj[e.v].push(e.u);
            }
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    /// Parses the edge-list text format: first non-comment line is the
    /// vertex count, each following line is `u v w`. Lines starting with
    /// `#` (or trailing `#` comments) and blank lines are ignored.
    /// Parallel lines for the same pair are merged by weight summation.
    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut n: Option<usize> = None;
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match n {
                None => {
                    n = Some(line.parse().map_err(|_| GraphError::MalformedLine(line_no))?);
                }
                Some(_) => {
                    let mut it = line.split_whitespace();
                    let (u, v, w) = match (it.next(), it.next(), it.next(), it.next()) {
                        (Some(u), Some(v), Some(w), None) => (u, v, w),
                        _ => return Err(GraphError::MalformedLine(line_no)),
                    };
                    let u: usize = u.parse().map_err(|_| GraphError::MalformedLine(line_no))?;
                    let v: usize = v.parse().map_err(|_| GraphError::MalformedLine(line_no))?;
                    let w: f64 = w.parse().map_err(|_| GraphError::MalformedLine(line_no))?;
                    edges.push((u, v, w));
                }
            }
        }
        let n = n.ok_or(GraphError::MissingHeader)?;
        WeightedGraph::new(n, &edges)
    }

    /// Renders the edge-list format with 17 significant digits.
    pub fn render_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for e in &self.edges {
            out.push_str(&format!("{} {} {:.16e}\n", e.u, e.v, e.w));
        }
        out
    }
}

/// Complete graph on `n` vertices, every edge of weight `w`.
pub fn complete_graph(n: usize, w: f64) -> WeightedGraph {
    assert!(w >= 0.0, "complete_graph weight must be nonnegative");
    let mut edges = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push((u, v, w));
        }
    }
    WeightedGraph::new(n, &edges).expect("complete graph edges are valid")
}

#[cfg(test)]
pub(crate) mod test_graphs {
    use super::WeightedGraph;

    /// 6-vertex, 11-unit-edge graph used throughout the test suite:
    /// two degree-4 hub vertices 0 and 1 joined to everyone else, plus
    /// edges (4,2), (2,3), (3,5).
    pub fn hub_graph() -> WeightedGraph {
        WeightedGraph::new(
            6,
            &[
                (0, 2, 1.0),
                (0, 3, 1.0),
                (0, 4, 1.0),
                (0, 5, 1.0),
                (1, 2, 1.0),
                (1, 3, 1.0),
                (1, 4, 1.0),
                (1, 5, 1.0),
                (4, 2, 1.0),
                (2, 3, 1.0),
                (3, 5, 1.0),
            ],
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_single_edge() {
        let g = WeightedGraph::parse_edge_list("2\n0 1 5\n").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.edges(), &[Edge { u: 0, v: 1, w: 5.0 }]);
    }

    #[test]
    fn parse_merges_parallel_edges() {
        let g = WeightedGraph::parse_edge_list("3\n0 1 2\n0 1 3\n1 2 1\n").unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edges()[0], Edge { u: 0, v: 1, w: 5.0 });
    }

    #[test]
    fn parse_hub_graph() {
        let text = "6\n0 2 1\n0 3 1\n0 4 1\n0 5 1\n1 2 1\n1 3 1\n1 4 1\n1 5 1\n4 2 1\n2 3 1\n3 5 1\n";
        let g = WeightedGraph::parse_edge_list(text).unwrap();
        assert_eq!(g.n(), 6);
        assert_eq!(g.edge_count(), 11);
        assert!(g.is_connected());
        assert_eq!(g, test_graphs::hub_graph());
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            WeightedGraph::parse_edge_list("2\n0 1\n").unwrap_err(),
            GraphError::MalformedLine(2)
        );
        assert_eq!(
            WeightedGraph::parse_edge_list("2\n0 7 1\n").unwrap_err(),
            GraphError::VertexOutOfRange { v: 7, n: 2 }
        );
        assert_eq!(
            WeightedGraph::parse_edge_list("2\n0 1 -1\n").unwrap_err(),
            GraphError::NegativeWeight { u: 0, v: 1, w: -1.0 }
        );
        assert_eq!(WeightedGraph::parse_edge_list("# nothing\n").unwrap_err(), GraphError::MissingHeader);
    }

    #[test]
    fn complete_graph_edge_count() {
        assert_eq!(complete_graph(2, 1.0).edge_count(), 1);
        assert_eq!(complete_graph(4, 1.0).edge_count(), 6);
        let k3 = complete_graph(3, 2.5);
        assert_eq!(k3.edge_count(), 3);
        assert!(k3.edges().iter().all(|e| e.w == 2.5));
    }

    #[test]
    fn connectivity_ignores_zero_weight_edges() {
        assert!(!WeightedGraph::edgeless(2).is_connected());
        let path = WeightedGraph::new(3, &[(0, 1, 1.0), (1, 2, 0.0)]).unwrap();
        assert!(!path.is_connected());
        let path = WeightedGraph::new(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert!(path.is_connected());
    }

    #[test]
    fn render_parse_round_trip() {
        let g = WeightedGraph::new(4, &[(0, 1, 0.125), (2, 3, 1.0 / 3.0), (1, 2, 7.25)]).unwrap();
        let back = WeightedGraph::parse_edge_list(&g.render_edge_list()).unwrap();
        assert_eq!(g, back);
    }
}
