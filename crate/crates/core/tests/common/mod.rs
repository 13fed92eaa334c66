#![allow(dead_code)]

use homcount_core::data::erdos_renyi;
use homcount_core::{FeaturedGraph, PatternFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_plain(seed: u64, max_n: usize, p: f64) -> FeaturedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=max_n);
    erdos_renyi(n, p, seed).unwrap()
}

/// Same structure as `g`, with `m` feature channels drawn from `[lo, hi]`.
pub fn with_random_features(g: &FeaturedGraph, m: usize, lo: f64, hi: f64, seed: u64) -> FeaturedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x5eed));
    let rows = (0..g.node_count()).map(|_| (0..m).map(|_| rng.random_range(lo..=hi)).collect()).collect();
    FeaturedGraph::new(g.node_count(), g.edges(), Some(rows)).unwrap()
}

pub fn families(max_order: usize) -> Vec<PatternFamily> {
    ["trees", "binary_trees", "cycles", "paths"]
        .iter()
        .map(|kind| format!("{kind}:{max_order}").parse::<homcount_core::FamilySpec>().unwrap().build().unwrap())
        .collect()
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}
