mod common;

use common::{close, families, random_plain, with_random_features};
use homcount_core::{embed_structural, embed_tensor, FeaturedGraph};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    perm
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn embeddings_follow_relabeling(seed in any::<u64>()) {
        let plain = random_plain(seed, 10, 0.35);
        let g = with_random_features(&plain, 2, 0.1, 2.0, seed);
        let perm = shuffled(g.node_count(), seed ^ 1);
        let h = g.permute(&perm).unwrap();
        for family in families(5) {
            let (a, b) = (embed_structural(&g, &family).unwrap(), embed_structural(&h, &family).unwrap());
            prop_assert_eq!(a.labels(), b.labels());
            for (v, &pv) in perm.iter().enumerate() {
                prop_assert_eq!(a.row(v), b.row(pv));
            }
            let (a, b) = (embed_tensor(&g, &family).unwrap(), embed_tensor(&h, &family).unwrap());
            for (v, &pv) in perm.iter().enumerate() {
                for (x, y) in a.row(v).iter().zip(b.row(pv)) {
                    prop_assert!(close(*x, *y, 1e-9), "{} vs {}", x, y);
                }
            }
        }
    }

    #[test]
    fn wl_coloring_follows_relabeling(seed in any::<u64>()) {
        let g = random_plain(seed, 12, 0.3);
        let perm = shuffled(g.node_count(), seed);
        let (c, d) = (g.wl_refine(), g.permute(&perm).unwrap().wl_refine());
        for u in 0..g.node_count() {
            for v in 0..g.node_count() {
                prop_assert_eq!(c.colors[u] == c.colors[v], d.colors[perm[u]] == d.colors[perm[v]]);
            }
        }
    }

    #[test]
    fn adjacency_rows_match_neighbor_lists(seed in any::<u64>()) {
        let g = random_plain(seed, 12, 0.4);
        for (v, row) in g.adjacency_matrix().iter().enumerate() {
            prop_assert_eq!(row.iter().map(|&x| x as usize).sum::<usize>(), g.degree(v));
        }
    }

    #[test]
    fn epsilon_preprocessing_is_idempotent(seed in any::<u64>(), eps in 1e-6f64..1.0) {
        let base = random_plain(seed, 8, 0.4);
        let g = with_random_features(&base, 2, -1.0, 1.0, seed);
        let rows: Vec<Vec<f64>> = g.feature_rows().into_iter().map(|r| r.into_iter().map(|x| if x < 0.0 { 0.0 } else { x }).collect()).collect();
        let g = FeaturedGraph::new(g.node_count(), g.edges(), Some(rows)).unwrap();
        let once = g.preprocess_zero_features(eps).unwrap();
        prop_assert_eq!(once.preprocess_zero_features(eps).unwrap(), once.clone());
        prop_assert!(once.feature_rows().iter().flatten().all(|&x| x != 0.0));
    }
}
