//! Subcommand implementations. Every command builds one serializable
//! report struct; table mode renders from the same struct that JSON mode
//! serializes, so the two formats always carry the same numbers.

use std::path::{Path, PathBuf};

use serde::Serialize;

use cutspectra::connmat::{
    edge_connectivity_matrix_bruteforce, gomory_hu_tree, matrix_from_flow_tree, FlowTree,
};
use cutspectra::graph::WeightedGraph;
use cutspectra::matrix_props::{
    check_gh_triangle, is_realizable, realize_flow_tree, terrace_decomposition, RealizeError,
    TerraceOutcome, TriangleViolation,
};
use cutspectra::quotient::{self, QuotientError, QuotientReport};
use cutspectra::search::{self, ScanReport, VertexCheck, Violation};
use cutspectra::spectra;
use cutspectra::ultrametric::{
    check_ultrametric, from_connectivity, ultrametric_min_eig_bound, ultrametric_quotient,
    MinEigBoundReport, StrongTriangleViolation, UltrametricError, UltrametricMatrix,
    UltrametricReport,
};
use cutspectra::{SymMatrix, Tol};

use crate::render;
use crate::{Cli, CliError, Command, CommonOpts, Format};

const VIOLATION_PRINT_CAP: usize = 20;

pub fn run(cli: &Cli, tol: Tol) -> Result<(), CliError> {
    match &cli.command {
        Command::Analyze { graph } => analyze(graph, &cli.common, tol),
        Command::Tree { graph } => tree(graph, &cli.common, tol),
        Command::CheckMatrix { matrix } => check_matrix(matrix, &cli.common, tol),
        Command::Realize { matrix } => realize(matrix, &cli.common, tol),
        Command::Quotient { matrix } => quotient_cmd(matrix, &cli.common, tol),
        Command::Ultrametric { input, graph } => ultrametric_cmd(input, *graph, &cli.common, tol),
        Command::Search { n_max, checks, trials, skip_vertex, skip_edge, graph } => search_cmd(
            *n_max,
            checks,
            *trials,
            *skip_vertex,
            *skip_edge,
            graph.as_deref(),
            &cli.common,
            tol,
        ),
    }
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<WeightedGraph, CliError> {
    WeightedGraph::parse_edge_list(&read_to_string(path)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path, tol: Tol) -> Result<SymMatrix, CliError> {
    SymMatrix::parse_text(&read_to_string(path)?, tol)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn numerical(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, content)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn emit<R: Serialize>(opts: &CommonOpts, report: &R, table: String) {
    match opts.format {
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(report).expect("reports serialize"));
        }
        Format::Table => print!("{table}"),
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "input".into())
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct AnalyzeReport {
    n: usize,
    edge_count: usize,
    connected: bool,
    connectivity: SymMatrix,
    flow_tree: FlowTree,
    flow_tree_consistent: bool,
    eigenvalues: Vec<f64>,
    residual: f64,
    energy: f64,
    lambda_min: f64,
    lambda_max: f64,
    spread: f64,
    max_entry: f64,
    energy_bound: f64,
    energy_bound_attained: bool,
    uniformly_connected: bool,
    psd_shift_ok: bool,
    min_eig_matches: bool,
    quotient: QuotientReport,
    theorems_ok: bool,
}

fn analyze(path: &Path, opts: &CommonOpts, tol: Tol) -> Result<(), CliError> {
    let g = read_graph(path)?;
    let n = g.n();
    if n < 2 {
        return Err(CliError::Usage("analyze needs a graph with at least 2 vertices".into()));
    }
    let c = edge_connectivity_matrix_bruteforce(&g, tol).map_err(numerical)?;
    let flow_tree = gomory_hu_tree(&g, tol).map_err(numerical)?;
    let from_tree = matrix_from_flow_tree(&flow_tree, tol);
    let flow_tree_consistent = from_tree.approx_eq(&c);
    let spectrum = spectra::eigen_sym(&c).map_err(numerical)?;
    let energy = spectrum.energy();
    let max_entry = c.max_entry().max(0.0);
    let energy_bound = 2.0 * (n as f64 - 1.0) * max_entry;
    let slack = 1e-7 * f64::max(1.0, energy_bound);
    let energy_bound_attained = (energy - energy_bound).abs() <= slack;
    let uniformly_connected =
        c.offdiag_iter().all(|(_, _, v)| (v - max_entry).abs() <= slack);
    let shift: Vec<f64> = (0..n).map(|v| c.row_offdiag_max(v).unwrap_or(0.0)).collect();
    let psd_shift_ok = spectra::is_psd(&c.add_diag(&shift)).map_err(numerical)?.psd;
    let min_eig_matches = spectra::min_eig_theorem_check(&c).map_err(numerical)?.matches;
    let quotient = quotient::analyze(&c).map_err(numerical)?;
    let energy_identity_ok = (quotient.energy_c - (quotient.energy_q + quotient.trace_q)).abs()
        <= 1e-7 * f64::max(1.0, quotient.energy_c);
    let theorems_ok = flow_tree_consistent
        && psd_shift_ok
        && min_eig_matches
        && energy <= energy_bound + slack
        && (energy_bound_attained == uniformly_connected)
        && energy_identity_ok;
    let report = AnalyzeReport {
        n,
        edge_count: g.edge_count(),
        connected: g.is_connected(),
        connectivity: c.clone(),
        flow_tree: flow_tree.clone(),
        flow_tree_consistent,
        eigenvalues: spectrum.eigenvalues.clone(),
        residual: spectrum.residual,
        energy,
        lambda_min: spectrum.lambda_min(),
        lambda_max: spectrum.lambda_max(),
        spread: spectrum.spread(),
        max_entry,
        energy_bound,
        energy_bound_attained,
        uniformly_connected,
        psd_shift_ok,
        min_eig_matches,
        quotient,
        theorems_ok,
    };

    let mut t = String::new();
    t += &format!("graph: {} vertices, {} edges, connected: {}\n", n, report.edge_count, render::yes_no(report.connected));
    t += &render::matrix_block("edge-connectivity matrix", &report.connectivity);
    t += "flow tree (u v w):\n";
    for &(u, v, w) in report.flow_tree.edges() {
        t += &format!("  {u} {v} {w}\n");
    }
    t += &format!("flow tree consistent with per-pair cuts: {}\n", render::verdict(report.flow_tree_consistent));
    t += &format!("eigenvalues: {}\n", render::float_list(&report.eigenvalues));
    t += &format!("residual: {}\n", report.residual);
    t += &format!(
        "energy: {}  bound 2(n-1)M: {}  attained: {}  uniformly connected: {}\n",
        report.energy,
        report.energy_bound,
        render::yes_no(report.energy_bound_attained),
        render::yes_no(report.uniformly_connected)
    );
    t += &format!(
        "lambda_min: {}  lambda_max: {}  spread: {}  max entry M: {}\n",
        report.lambda_min, report.lambda_max, report.spread, report.max_entry
    );
    t += &format!("shifted matrix C + diag(row maxima) PSD: {}\n", render::verdict(report.psd_shift_ok));
    t += &format!("lambda_min = -M: {}\n", render::verdict(report.min_eig_matches));
    t += &quotient_table(&report.quotient);
    t += &format!("all theorem checks: {}\n", render::verdict(report.theorems_ok));
    emit(opts, &report, t);

    if let Some(dir) = &opts.out {
        write_file(dir, &format!("{}.tree", stem(path)), &report.flow_tree.render_text())?;
    }
    if report.theorems_ok {
        Ok(())
    } else {
        Err(CliError::Theorem("a verified statement failed on this input".into()))
    }
}

fn quotient_table(q: &QuotientReport) -> String {
    let mut t = String::new();
    let classes: Vec<String> = q.classes.iter().map(|c| render::id_set(c)).collect();
    t += &format!("equivalence classes: {}\n", classes.join(" "));
    t += &format!("class extrema: {}\n", render::float_list(&q.class_maxima));
    let k = q.q.len();
    t += &format!("quotient matrix Q ({k} x {k}):\n");
    for row in &q.q {
        t += &format!("  {}\n", render::float_list(row));
    }
    t += &render::matrix_block("symmetrized quotient Q'", &q.q_sym);
    t += &format!(
        "energy(C): {}  energy(Q'): {}  trace(Q): {}  lower bound: {}  tight: {}\n",
        q.energy_c,
        q.energy_q,
        q.trace_q,
        q.lower_bound,
        render::yes_no(q.tight)
    );
    t
}

// ---------------------------------------------------------------------------
// tree
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct TreeReport {
    n: usize,
    flow_tree: FlowTree,
}

fn tree(path: &Path, opts: &CommonOpts, tol: Tol) -> Result<(), CliError> {
    let g = read_graph(path)?;
    let flow_tree = gomory_hu_tree(&g, tol)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let report = TreeReport { n: g.n(), flow_tree: flow_tree.clone() };
    emit(opts, &report, flow_tree.render_text());
    if let Some(dir) = &opts.out {
        write_file(dir, &format!("{}.tree", stem(path)), &flow_tree.render_text())?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// check-matrix
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CheckMatrixReport {
    n: usize,
    offdiag_triangle_ok: bool,
    offdiag_violation_count: usize,
    offdiag_violations: Vec<TriangleViolation>,
    full_triangle_ok: bool,
    full_violation_count: usize,
    full_violations: Vec<TriangleViolation>,
    terrace: TerraceOutcome,
    realizable: bool,
    realizing_tree: Option<WeightedGraph>,
    round_trip_confirmed: Option<bool>,
}

fn check_matrix(path: &Path, opts: &CommonOpts, tol: Tol) -> Result<(), CliError> {
    let m = read_matrix(path, tol)?;
    let offdiag = check_gh_triangle(&m, false);
    let full = check_gh_triangle(&m, true);
    let terrace = terrace_decomposition(&m);
    let realizable = is_realizable(&m);
    let (realizing_tree, round_trip_confirmed) = if realizable {
        let tree = realize_flow_tree(&m).map_err(numerical)?;
        // the constructor certifies the round trip; make it explicit here
        let back = edge_connectivity_matrix_bruteforce(&tree, tol).map_err(numerical)?;
        (Some(tree), Some(back.approx_eq(&m)))
    } else {
        (None, None)
    };
    let report = CheckMatrixReport {
        n: m.n(),
        offdiag_triangle_ok: offdiag.is_empty(),
        offdiag_violation_count: offdiag.len(),
        offdiag_violations: offdiag.into_iter().take(VIOLATION_PRINT_CAP).collect(),
        full_triangle_ok: full.is_empty(),
        full_violation_count: full.len(),
        full_violations: full.into_iter().take(VIOLATION_PRINT_CAP).collect(),
        terrace,
        realizable,
        realizing_tree,
        round_trip_confirmed,
    };

    let mut t = String::new();
    t += &format!("matrix: {} x {}\n", report.n, report.n);
    t += &format!(
        "min-triangle inequality (off-diagonal): {} ({} violations)\n",
        render::verdict(report.offdiag_triangle_ok),
        report.offdiag_violation_count
    );
    for v in &report.offdiag_violations {
        t += &format!("  c[{},{}] = {} < min over {} = {}\n", v.x, v.z, v.lhs, v.y, v.rhs);
    }
    t += &format!(
        "min-triangle inequality (all triples): {} ({} violations)\n",
        render::verdict(report.full_triangle_ok),
        report.full_violation_count
    );
    match &report.terrace {
        TerraceOutcome::Terraced(d) => {
            t += "terraced: yes\n";
            t += &d.render_text();
        }
        TerraceOutcome::NotTerraced(f) => {
            t += &format!(
                "terraced: no (level {} links {} but entry ({}, {}) falls below)\n",
                f.level,
                render::id_set(&f.members),
                f.missing.0,
                f.missing.1
            );
        }
    }
    t += &format!("realizable as an edge-connectivity matrix: {}\n", render::yes_no(report.realizable));
    if let Some(tree) = &report.realizing_tree {
        t += "realizing tree (u v w):\n";
        for e in tree.edges() {
            t += &format!("  {} {} {}\n", e.u, e.v, e.w);
        }
        t += &format!(
            "round trip confirmed: {}\n",
            render::verdict(report.round_trip_confirmed.unwrap_or(false))
        );
    }
    emit(opts, &report, t);

    if let (Some(dir), Some(tree)) = (&opts.out, &report.realizing_tree) {
        write_file(dir, &format!("{}.tree", stem(path)), &tree.render_edge_list())?;
    }
    if report.round_trip_confirmed == Some(false) {
        return Err(CliError::Numerical("realization round trip failed".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// realize
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct RealizeReport {
    n: usize,
    tree: WeightedGraph,
    round_trip_confirmed: bool,
}

fn realize(path: &Path, opts: &CommonOpts, tol: Tol) -> Result<(), CliError> {
    let m = read_matrix(path, tol)?;
    let tree = match realize_flow_tree(&m) {
        Ok(t) => t,
        Err(RealizeError::NotRealizable) => {
            return Err(CliError::Usage(
                "matrix is not realizable: it must be symmetric, nonnegative, zero-diagonal and satisfy the min-triangle inequality".into(),
            ))
        }
        Err(e @ RealizeError::CertificateFailed(_)) => return Err(numerical(e)),
    };
    let back = edge_connectivity_matrix_bruteforce(&tree, tol).map_err(numerical)?;
    let report =
        RealizeReport { n: m.n(), tree: tree.clone(), round_trip_confirmed: back.approx_eq(&m) };
    emit(opts, &report, tree.render_edge_list());
    if let Some(dir) = &opts.out {
        write_file(dir, &format!("{}.edges", stem(path)), &tree.render_edge_list())?;
    }
    if report.round_trip_confirmed {
        Ok(())
    } else {
        Err(CliError::Numerical("realization round trip failed".into()))
    }
}

// ---------------------------------------------------------------------------
// quotient
// ---------------------------------------------------------------------------

fn quotient_cmd(path: &Path, opts: &CommonOpts, tol: Tol) -> Result<(), CliError> {
    let m = read_matrix(path, tol)?;
    let report = quotient::analyze(&m).map_err(|e| match e {
        QuotientError::PreconditionViolated => CliError::Usage(
            "matrix must satisfy the off-diagonal min-triangle inequality".into(),
        ),
        QuotientError::TransitivityBroken { x, y, z } => CliError::Usage(format!(
            "row-extremum relation is not transitive at this tolerance (vertices {x}, {y}, {z}); adjust --tol"
        )),
        other => numerical(other),
    })?;
    emit(opts, &report, quotient_table(&report));
    Ok(())
}

// ---------------------------------------------------------------------------
// ultrametric
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct UltrametricCmdReport {
    n: usize,
    ultrametric: bool,
    violation_count: usize,
    violations: Vec<StrongTriangleViolation>,
    analysis: Option<UltrametricAnalysis>,
}

#[derive(Serialize)]
struct UltrametricAnalysis {
    report: UltrametricReport,
    bound: MinEigBoundReport,
}

fn ultrametric_cmd(path: &Path, as_graph: bool, opts: &CommonOpts, tol: Tol) -> Result<(), CliError> {
    let matrix: UltrametricMatrix = if as_graph {
        let g = read_graph(path)?;
        let c = edge_connectivity_matrix_bruteforce(&g, tol).map_err(numerical)?;
        from_connectivity(&c).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
    } else {
        let m = read_matrix(path, tol)?;
        let violations = check_ultrametric(&m)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        if !violations.is_empty() {
            let report = UltrametricCmdReport {
                n: m.n(),
                ultrametric: false,
                violation_count: violations.len(),
                violations: violations.into_iter().take(VIOLATION_PRINT_CAP).collect(),
                analysis: None,
            };
            let mut t = format!("ultrametric: no ({} violations)\n", report.violation_count);
            for v in &report.violations {
                t += &format!("  d[{},{}] = {} > max over {} = {}\n", v.x, v.z, v.lhs, v.y, v.rhs);
            }
            emit(opts, &report, t);
            return Ok(());
        }
        UltrametricMatrix::new(m).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
    };
    let n = matrix.n();
    let quotient_report = ultrametric_quotient(&matrix).map_err(ultra_err)?;
    let bound = ultrametric_min_eig_bound(&matrix).map_err(ultra_err)?;
    let report = UltrametricCmdReport {
        n,
        ultrametric: true,
        violation_count: 0,
        violations: Vec::new(),
        analysis: Some(UltrametricAnalysis { report: quotient_report, bound }),
    };
    let analysis = report.analysis.as_ref().expect("just built");
    let mut t = String::new();
    t += &format!("ultrametric: yes ({n} points)\n");
    t += &quotient_table(&analysis.report.quotient);
    let pairs: Vec<String> = analysis
        .report
        .mutual_nearest
        .iter()
        .map(|p| format!("({},{})->{}", p.x, p.y, p.eigenvalue))
        .collect();
    t += &format!("mutually nearest eigenpairs: {}\n", pairs.join(" "));
    let b = &analysis.bound;
    t += &format!(
        "interval [{}, {}]  smallest-eigenvalue bound: {}  lambda_min: {}  attained: {}\n",
        b.m,
        b.big_m,
        b.bound,
        b.lambda_min,
        render::yes_no(b.attained)
    );
    emit(opts, &report, t);
    Ok(())
}

fn ultra_err(e: UltrametricError) -> CliError {
    match e {
        UltrametricError::Spectra(inner) => numerical(inner),
        UltrametricError::Quotient(inner) => numerical(inner),
        other => CliError::Usage(other.to_string()),
    }
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SearchReport {
    vertex: Option<ScanReport>,
    edge: Option<ScanReport>,
    injected: Option<Vec<Violation>>,
}

#[allow(clippy::too_many_arguments)]
fn search_cmd(
    n_max: usize,
    check_names: &[String],
    trials: u64,
    skip_vertex: bool,
    skip_edge: bool,
    graph: Option<&Path>,
    opts: &CommonOpts,
    _tol: Tol,
) -> Result<(), CliError> {
    let checks: Vec<VertexCheck> = if check_names.is_empty() {
        VertexCheck::ALL.to_vec()
    } else {
        check_names
            .iter()
            .map(|name| {
                VertexCheck::from_name(name).ok_or_else(|| {
                    CliError::Usage(format!(
                        "unknown check '{name}'; valid: {}",
                        VertexCheck::ALL.map(|c| c.name()).join(", ")
                    ))
                })
            })
            .collect::<Result<_, _>>()?
    };

    if let Some(path) = graph {
        let g = read_graph(path)?;
        let violations = search::check_single_graph(&g, &checks)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let report = SearchReport { vertex: None, edge: None, injected: Some(violations.clone()) };
        let mut t = format!("graph {}: {} violations\n", path.display(), violations.len());
        for v in &violations {
            t += &format!("  {}: observed {} vs bound {}\n", v.check, v.observed, v.bound);
        }
        emit(opts, &report, t);
        return Ok(());
    }

    let vertex = if skip_vertex {
        None
    } else {
        let r = search::scan_vertex_conjectures(n_max, &checks)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        eprintln!("vertex scan: {:.2}s", r.elapsed);
        Some(r)
    };
    let edge = if skip_edge {
        None
    } else {
        let r = search::scan_edge_theorems(n_max, trials, opts.seed)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        eprintln!("edge scan: {:.2}s", r.elapsed);
        Some(r)
    };
    let report = SearchReport { vertex, edge, injected: None };

    let mut t = String::new();
    if let Some(v) = &report.vertex {
        t += &format!("vertex-conjecture scan: {} graphs analyzed\n", v.graphs_scanned);
        t += "  n  labeled-connected  analyzed  min lambda_min(P)  witness-mask\n";
        for s in &v.per_size {
            t += &format!(
                "  {}  {}  {}  {}  {}\n",
                s.n, s.labeled_connected, s.analyzed, s.min_lambda_p, s.min_lambda_mask
            );
        }
        for (name, count) in &v.violation_totals {
            t += &format!("  check {name}: {count} violations\n");
        }
        for violation in v.violations.iter().take(VIOLATION_PRINT_CAP) {
            t += &format!(
                "  violation {:?} {}: observed {} vs bound {}\n",
                violation.source, violation.check, violation.observed, violation.bound
            );
        }
    }
    if let Some(e) = &report.edge {
        t += &format!(
            "edge-theorem scan: {} graphs, {} violations\n",
            e.graphs_scanned,
            e.violations.len()
        );
        for violation in e.violations.iter().take(VIOLATION_PRINT_CAP) {
            t += &format!(
                "  violation {:?} {}: observed {} vs bound {}\n",
                violation.source, violation.check, violation.observed, violation.bound
            );
        }
    }
    emit(opts, &report, t);

    if let Some(dir) = &opts.out {
        let emit_graphs = |scan: &ScanReport| -> Result<(), CliError> {
            for v in &scan.violations {
                let g = v.source.rebuild();
                let name = match v.source {
                    search::GraphSource::Mask { n, mask } => {
                        format!("violation-{}-n{}-mask{}.edges", v.check, n, mask)
                    }
                    search::GraphSource::Random { seed, trial } => {
                        format!("violation-{}-seed{}-trial{}.edges", v.check, seed, trial)
                    }
                };
                write_file(dir, &name, &g.render_edge_list())?;
            }
            Ok(())
        };
        if let Some(v) = &report.vertex {
            emit_graphs(v)?;
        }
        if let Some(e) = &report.edge {
            emit_graphs(e)?;
        }
    }

    match &report.edge {
        Some(e) if !e.violations.is_empty() => {
            Err(CliError::Theorem(format!("{} theorem violations", e.violations.len())))
        }
        _ => Ok(()),
    }
}
