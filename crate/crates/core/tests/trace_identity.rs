mod common;

use common::random_plain;
use homcount_core::hom::count_cycles;
use homcount_core::Weights;
use nalgebra::{DMatrix, SymmetricEigen};

#[test]
fn closed_walks_sum_to_eigenvalue_powers() {
    let ks: Vec<usize> = (3..=10).collect();
    for seed in 0..20 {
        let g = random_plain(500 + seed, 8, 0.5);
        let n = g.node_count();
        let adj = g.adjacency_matrix();
        let a = DMatrix::from_fn(n, n, |i, j| f64::from(adj[i][j]));
        let eig = SymmetricEigen::new(a).eigenvalues;
        let counts = count_cycles(&g, Weights::Unit, &ks).unwrap();
        for &k in &ks {
            let walks: f64 = counts[&k].iter().sum();
            let spectral: f64 = eig.iter().map(|l| l.powi(k as i32)).sum();
            let tol = 1e-6 * walks.abs().max(1.0);
            assert!((walks - spectral).abs() <= tol, "k={k} graph {seed}: {walks} vs {spectral}");
        }
    }
}

#[test]
fn weighted_closed_walks_match_similar_matrix() {
    // trace((A W)^k) = trace((W^½ A W^½)^k) for positive weights.
    let g = random_plain(77, 8, 0.6);
    let n = g.node_count();
    let w: Vec<f64> = (0..n).map(|i| 0.5 + i as f64 / 4.0).collect();
    let rows = w.iter().map(|&x| vec![x]).collect();
    let fg = homcount_core::FeaturedGraph::new(n, g.edges(), Some(rows)).unwrap();
    let adj = g.adjacency_matrix();
    let s = DMatrix::from_fn(n, n, |i, j| f64::from(adj[i][j]) * (w[i] * w[j]).sqrt());
    let eig = SymmetricEigen::new(s).eigenvalues;
    let counts = count_cycles(&fg, Weights::Channel(0), &[3, 4, 5, 6]).unwrap();
    for (k, col) in counts {
        let walks: f64 = col.iter().sum();
        let spectral: f64 = eig.iter().map(|l| l.powi(k as i32)).sum();
        assert!((walks - spectral).abs() <= 1e-6 * walks.abs().max(1.0), "k={k}");
    }
}
