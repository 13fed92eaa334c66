mod common;

use common::{close, families, random_plain, with_random_features};
use homcount_core::hom::{count_rooted, count_rooted_exact};
use homcount_core::oracle::{brute_force_all, brute_force_all_exact};
use homcount_core::Weights;
use proptest::prelude::*;

#[test]
fn fast_counts_match_brute_force_on_seeded_graphs() {
    let fams = families(5);
    for seed in 0..50 {
        let g = random_plain(seed, 8, 0.4);
        let weighted = with_random_features(&g, 1, 0.1, 2.0, seed);
        for pattern in fams.iter().flat_map(|f| f.iter()) {
            let fast = count_rooted_exact(&g, pattern, false).unwrap();
            let slow = brute_force_all_exact(&g, pattern, false).unwrap();
            assert_eq!(fast, slow, "{} on graph {seed}", pattern.name());

            let fast = count_rooted(&weighted, Weights::Channel(0), pattern).unwrap();
            let slow = brute_force_all(&weighted, Weights::Channel(0), pattern, false).unwrap();
            for (a, b) in fast.iter().zip(&slow) {
                assert!(close(*a, *b, 1e-9), "{} on graph {seed}: {a} vs {b}", pattern.name());
            }
        }
    }
}

#[test]
fn plain_f64_counts_are_integers_matching_exact() {
    let fams = families(6);
    for seed in 100..110 {
        let g = random_plain(seed, 9, 0.5);
        for pattern in fams.iter().flat_map(|f| f.iter()) {
            let fast = count_rooted(&g, Weights::Unit, pattern).unwrap();
            let exact = count_rooted_exact(&g, pattern, false).unwrap();
            for (a, b) in fast.iter().zip(&exact) {
                assert_eq!(*a, b.to_string().parse::<f64>().unwrap());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn weighted_agreement_with_negative_features(seed in any::<u64>()) {
        let g = with_random_features(&random_plain(seed, 7, 0.5), 1, -2.0, 2.0, seed);
        for pattern in families(4).iter().flat_map(|f| f.iter()) {
            let fast = count_rooted(&g, Weights::Channel(0), pattern).unwrap();
            let slow = brute_force_all(&g, Weights::Channel(0), pattern, false).unwrap();
            let scale: f64 = slow.iter().map(|x| x.abs()).fold(1.0, f64::max);
            for (a, b) in fast.iter().zip(&slow) {
                prop_assert!((a - b).abs() <= 1e-9 * scale);
            }
        }
    }
}
