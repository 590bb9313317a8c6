use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cutspectra::connmat::{edge_connectivity_matrix_bruteforce, gomory_hu_tree, matrix_from_flow_tree};
use cutspectra::matrix_props::terrace_decomposition;
use cutspectra::search::{scan_edge_theorems, scan_vertex_conjectures, VertexCheck};
use cutspectra::spectra::eigen_sym;
use cutspectra::{SymMatrix, Tol, WeightedGraph};

fn random_weighted(n: usize, p: f64, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random_bool(p) {
                edges.push((u, v, rng.random_range(0.0..10.0)));
            }
        }
    }
    WeightedGraph::new(n, &edges).unwrap()
}

fn bench_flow_trees(c: &mut Criterion) {
    let mut group = c.benchmark_group("flow_tree");
    for n in [16usize, 32, 64] {
        let g = random_weighted(n, 0.4, 7);
        group.bench_with_input(BenchmarkId::new("gusfield", n), &g, |b, g| {
            b.iter(|| gomory_hu_tree(g, Tol::default()).unwrap())
        });
    }
    let g = random_weighted(16, 0.4, 7);
    group.bench_function("bruteforce_16", |b| {
        b.iter(|| edge_connectivity_matrix_bruteforce(&g, Tol::default()).unwrap())
    });
    group.finish();
}

fn connectivity_matrix(n: usize, seed: u64) -> SymMatrix {
    let g = random_weighted(n, 0.5, seed);
    let t = gomory_hu_tree(&g, Tol::default()).unwrap();
    matrix_from_flow_tree(&t, Tol::default())
}

fn bench_spectra(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigen_sym");
    for n in [16usize, 48] {
        let m = connectivity_matrix(n, 11);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| eigen_sym(m).unwrap())
        });
    }
    group.finish();
}

fn bench_terrace(c: &mut Criterion) {
    let m = connectivity_matrix(64, 13);
    let shift: Vec<f64> = (0..64).map(|v| m.row_offdiag_max(v).unwrap()).collect();
    let shifted = m.add_diag(&shift);
    c.bench_function("terrace_decomposition_64", |b| {
        b.iter(|| terrace_decomposition(&shifted))
    });
}

fn bench_scans(c: &mut Criterion) {
    let mut group = c.benchmark_group("scan");
    group.sample_size(10);
    group.bench_function("vertex_n6", |b| {
        b.iter(|| scan_vertex_conjectures(6, &VertexCheck::ALL).unwrap())
    });
    group.bench_function("edge_n5_trials50", |b| {
        b.iter(|| scan_edge_theorems(5, 50, 3).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_flow_trees, bench_spectra, bench_terrace, bench_scans);
criterion_main!(benches);
