//! A star whose leaves carry half the root's weight and a single unit-weight
//! edge cannot be told apart from their roots by any pattern count.

mod common;

use common::families;
use homcount_core::hom::count_rooted;
use homcount_core::oracle::brute_force_rooted;
use homcount_core::{FeaturedGraph, Weights};

fn star() -> FeaturedGraph {
    FeaturedGraph::new(3, &[(0, 1), (0, 2)], Some(vec![vec![1.0], vec![0.5], vec![0.5]])).unwrap()
}

fn edge() -> FeaturedGraph {
    FeaturedGraph::new(2, &[(0, 1)], Some(vec![vec![1.0], vec![1.0]])).unwrap()
}

#[test]
fn counts_agree_at_the_roots() {
    let (g, h) = (star(), edge());
    for pattern in families(7).iter().flat_map(|f| f.iter()) {
        let a = count_rooted(&g, Weights::Channel(0), pattern).unwrap()[0];
        let b = count_rooted(&h, Weights::Channel(0), pattern).unwrap()[0];
        assert!((a - b).abs() <= 1e-12, "{}: {a} vs {b}", pattern.name());
    }
}

#[test]
fn edge_count_is_one_on_both() {
    let p2 = homcount_core::RootedPattern::path(2).unwrap();
    assert_eq!(brute_force_rooted(&star(), Weights::Channel(0), &p2, 0, false).unwrap(), 1.0);
    assert_eq!(brute_force_rooted(&edge(), Weights::Channel(0), &p2, 0, false).unwrap(), 1.0);
}

#[test]
fn structure_alone_does_tell_them_apart() {
    let p2 = homcount_core::RootedPattern::path(2).unwrap();
    assert_eq!(count_rooted(&star(), Weights::Unit, &p2).unwrap()[0], 2.0);
    assert_eq!(count_rooted(&edge(), Weights::Unit, &p2).unwrap()[0], 1.0);
}
