//! Shared fixtures for the integration suites.

use cutspectra::{SymMatrix, Tol, WeightedGraph};

/// 6-vertex, 11-unit-edge graph with two degree-4 hubs (0 and 1) joined to
/// everyone else, plus edges (4,2), (2,3), (3,5). Its connectivity
/// matrices are known in closed form and drive most exact assertions.
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

/// Edge-connectivity matrix of the hub graph.
pub fn hub_connectivity() -> SymMatrix {
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

/// Vertex-connectivity matrix plus degree diagonal of the hub graph.
pub fn hub_path_plus_degrees() -> SymMatrix {
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

/// Eigensolver quality gate shared by the whole acceptance suite.
pub fn assert_spectrum_quality(c: &SymMatrix) {
    let s = cutspectra::spectra::eigen_sym(c).expect("eigendecomposition");
    let trace_dev = (s.sum() - c.trace()).abs();
    assert!(
        trace_dev <= (c.n() as f64) * 1e-9 * c.norm_inf() + 1e-300,
        "trace defect {trace_dev} too large for n = {}",
        c.n()
    );
    assert!(
        s.residual <= 1e-8 * f64::max(1.0, c.norm_inf()),
        "residual {} too large",
        s.residual
    );
}
