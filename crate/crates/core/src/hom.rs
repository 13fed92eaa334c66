//! Exact weighted rooted homomorphism counts from cycles, paths and trees.
//!
//! With `w` the node weights of one channel and `A` the adjacency matrix:
//!
//! * cycles: `hom(C_k, v)` is the diagonal entry `(M^k)_vv` of `M = A·diag(w)`;
//! * paths rooted at an endpoint: `P_1 = w`, `P_k = (A·P_{k-1}) ⊙ w`;
//! * trees: a post-order dynamic program over the pattern where every
//!   pattern vertex `t` holds the count vector of its rooted subtree, and a
//!   parent absorbs each child as `H_parent ⊙= A·H_child`.
//!
//! All routines are generic over [`Scalar`] so the same code yields `f64`
//! weighted counts and exact `BigUint` counts on plain graphs. Sums run in
//! ascending node order, so results are bit-reproducible.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{FeaturedGraph, Weights};
use crate::oracle;
use crate::patterns::{RootedPattern, Shape};
use crate::scalar::Scalar;

/// Entry `v` is `hom(F, r, G, v)` for one pattern and one channel.
pub type HomCountVector<T = f64> = Vec<T>;

/// `(A·x)[v] = Σ_{u ∈ N(v)} x[u]`.
fn adjacency_apply<T: Scalar>(g: &FeaturedGraph, x: &[T]) -> Vec<T> {
    (0..g.node_count())
        .map(|v| {
            let mut acc = T::zero();
            for &u in g.neighbors(v) {
                acc.add_assign_ref(&x[u]);
            }
            acc
        })
        .collect()
}

fn scale<T: Scalar>(x: &mut [T], w: &[T]) {
    x.iter_mut().zip(w).for_each(|(a, b)| a.mul_assign_ref(b));
}

/// Weighted closed walks: `out[k][v] = (M^k)_vv` for each requested `k`.
pub(crate) fn cycle_table<T: Scalar>(g: &FeaturedGraph, w: &[T], ks: &[usize]) -> Result<BTreeMap<usize, Vec<T>>> {
    if let Some(&k) = ks.iter().find(|&&k| k < 2) {
        return Err(Error::CycleTooShort(k));
    }
    let max_k = ks.iter().copied().max().unwrap_or(0);
    let n = g.node_count();
    // Row v of M^j is r_j with r_0 = e_v and r_j = (A·r_{j-1}) ⊙ w.
    let diagonals: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut row = vec![T::zero(); n];
            row[v] = T::one();
            let mut diag = Vec::with_capacity(max_k + 1);
            diag.push(T::one());
            for _ in 1..=max_k {
                row = adjacency_apply(g, &row);
                scale(&mut row, w);
                diag.push(row[v].clone());
            }
            diag
        })
        .collect();
    Ok(ks
        .iter()
        .map(|&k| (k, diagonals.iter().map(|d| d[k].clone()).collect()))
        .collect())
}

/// `out[k - 1]` holds the counts of `P_k`, for `k = 1..=max_k`.
pub(crate) fn path_table<T: Scalar>(g: &FeaturedGraph, w: &[T], max_k: usize) -> Result<Vec<Vec<T>>> {
    if max_k < 1 {
        return Err(Error::InvalidOrder(format!("path length must be at least 1, got {max_k}")));
    }
    let mut out = Vec::with_capacity(max_k);
    out.push(w.to_vec());
    for k in 1..max_k {
        let mut next = adjacency_apply(g, &out[k - 1]);
        scale(&mut next, w);
        out.push(next);
    }
    Ok(out)
}

pub(crate) fn tree_counts<T: Scalar>(g: &FeaturedGraph, w: &[T], pattern: &RootedPattern) -> Result<Vec<T>> {
    let schedule = pattern.postorder_edges()?;
    let mut state: Vec<Option<Vec<T>>> = vec![Some(w.to_vec()); pattern.order()];
    for (t, parent) in schedule {
        let child = state[t].take().expect("child visited once");
        let up = adjacency_apply(g, &child);
        let acc = state[parent].as_mut().expect("parent still open");
        scale(acc, &up);
    }
    Ok(state[pattern.root()].take().expect("root remains"))
}

pub(crate) fn rooted_counts<T: Scalar>(
    g: &FeaturedGraph,
    w: &[T],
    pattern: &RootedPattern,
    force: bool,
) -> Result<Vec<T>> {
    match pattern.shape() {
        Shape::Path(k) => Ok(path_table(g, w, k)?.pop().expect("k >= 1")),
        Shape::Tree => tree_counts(g, w, pattern),
        Shape::Cycle(k) => Ok(cycle_table(g, w, &[k])?.remove(&k).expect("requested")),
        Shape::General => {
            oracle::check_guard(pattern, force)?;
            Ok((0..g.node_count()).map(|v| oracle::enumerate(g, w, pattern, v)).collect())
        }
    }
}

/// Rooted cycle counts for every `k` in `ks` in one pass.
pub fn count_cycles(g: &FeaturedGraph, weights: Weights, ks: &[usize]) -> Result<BTreeMap<usize, HomCountVector>> {
    cycle_table(g, &g.weights(weights)?, ks)
}

/// Endpoint-rooted path counts `P_1 ..= P_max_k`, keyed by `k`.
pub fn count_paths(g: &FeaturedGraph, weights: Weights, max_k: usize) -> Result<BTreeMap<usize, HomCountVector>> {
    Ok(path_table(g, &g.weights(weights)?, max_k)?
        .into_iter()
        .enumerate()
        .map(|(i, c)| (i + 1, c))
        .collect())
}

/// Rooted tree counts via the post-order dynamic program.
pub fn count_tree(g: &FeaturedGraph, weights: Weights, pattern: &RootedPattern) -> Result<HomCountVector> {
    tree_counts(g, &g.weights(weights)?, pattern)
}

/// Dispatches on the pattern shape; patterns that are neither trees nor
/// cycles go to brute force, which refuses more than
/// [`oracle::ORACLE_MAX_ORDER`] vertices.
pub fn count_rooted(g: &FeaturedGraph, weights: Weights, pattern: &RootedPattern) -> Result<HomCountVector> {
    count_rooted_with(g, weights, pattern, false)
}

/// [`count_rooted`] with the brute-force size guard optionally lifted.
pub fn count_rooted_with(g: &FeaturedGraph, weights: Weights, pattern: &RootedPattern, force: bool) -> Result<HomCountVector> {
    rooted_counts(g, &g.weights(weights)?, pattern, force)
}

/// Exact counts into the plain structure of `g` (features ignored).
pub fn count_rooted_exact(g: &FeaturedGraph, pattern: &RootedPattern, force: bool) -> Result<HomCountVector<BigUint>> {
    let w = vec![BigUint::from(1u8); g.node_count()];
    rooted_counts(g, &w, pattern, force)
}

/// Unrooted count: the rooted counts summed over all nodes.
pub fn count_graph_level(g: &FeaturedGraph, weights: Weights, pattern: &RootedPattern) -> Result<f64> {
    Ok(count_rooted(g, weights, pattern)?.iter().sum())
}

pub fn count_graph_level_exact(g: &FeaturedGraph, pattern: &RootedPattern) -> Result<BigUint> {
    Ok(count_rooted_exact(g, pattern, false)?.iter().sum())
}

/// Counts a whole family on one channel, sharing the path and cycle
/// recursions across patterns. Columns whose computation had not started
/// when `deadline` passed come back as `None`.
pub fn count_family(
    g: &FeaturedGraph,
    weights: Weights,
    patterns: &[RootedPattern],
    force: bool,
    deadline: Option<Instant>,
) -> Result<Vec<Option<HomCountVector>>> {
    let w = g.weights(weights)?;
    let expired = || deadline.is_some_and(|d| Instant::now() >= d);

    let max_path = patterns
        .iter()
        .filter_map(|p| match p.shape() {
            Shape::Path(k) => Some(k),
            _ => None,
        })
        .max();
    let cycle_ks: Vec<usize> = patterns
        .iter()
        .filter_map(|p| match p.shape() {
            Shape::Cycle(k) => Some(k),
            _ => None,
        })
        .collect();

    let paths = match max_path {
        Some(k) if !expired() => Some(path_table(g, &w, k)?),
        _ => None,
    };
    let cycles = if !cycle_ks.is_empty() && !expired() {
        Some(cycle_table(g, &w, &cycle_ks)?)
    } else {
        None
    };

    patterns
        .par_iter()
        .map(|p| match p.shape() {
            Shape::Path(k) => Ok(paths.as_ref().map(|t| t[k - 1].clone())),
            Shape::Cycle(k) => Ok(cycles.as_ref().map(|t| t[&k].clone())),
            _ if expired() => Ok(None),
            _ => rooted_counts(g, &w, p, force).map(Some),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::patterns::{enumerate_cycles, enumerate_paths, enumerate_trees};

    fn star_g() -> FeaturedGraph {
        FeaturedGraph::new(3, &[(0, 1), (0, 2)], Some(vec![vec![1.0], vec![0.5], vec![0.5]])).unwrap()
    }

    #[test]
    fn cycles_on_triangle() {
        let counts = count_cycles(&complete(3), Weights::Unit, &[3, 4]).unwrap();
        assert_eq!(counts[&3], vec![2.0; 3]);
        assert_eq!(counts[&4], vec![6.0; 3]);
        assert!(matches!(count_cycles(&complete(3), Weights::Unit, &[1]), Err(Error::CycleTooShort(1))));
    }

    #[test]
    fn cycles_on_fixture() {
        let c3 = &count_cycles(&two_triangles(), Weights::Unit, &[3]).unwrap()[&3];
        assert_eq!((c3[0], c3[2]), (2.0, 2.0));
        assert_eq!(count_cycles(&star_g(), Weights::Channel(0), &[3]).unwrap()[&3][0], 0.0);
    }

    #[test]
    fn paths() {
        let g = two_triangles();
        let p = count_paths(&g, Weights::Unit, 3).unwrap();
        assert_eq!(p[&2], g.degrees().iter().map(|&d| d as f64).collect::<Vec<_>>());
        assert_eq!((p[&3][0], p[&3][2]), (7.0, 8.0));

        let h = FeaturedGraph::plain(2, &[(0, 1)]).unwrap();
        assert_eq!(count_paths(&star_g(), Weights::Channel(0), 2).unwrap()[&2][0], 1.0);
        assert_eq!(count_paths(&h, Weights::Unit, 2).unwrap()[&2][0], 1.0);
        assert!(count_paths(&g, Weights::Unit, 0).is_err());
    }

    #[test]
    fn trees() {
        let g = two_triangles();
        let single = RootedPattern::path(1).unwrap();
        assert_eq!(count_tree(&star_g(), Weights::Channel(0), &single).unwrap(), vec![1.0, 0.5, 0.5]);

        for leaves in 1..4 {
            let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
            let star = RootedPattern::new("star", leaves + 1, 0, &edges).unwrap();
            let want: Vec<f64> = g.degrees().iter().map(|&d| (d as f64).powi(leaves as i32)).collect();
            assert_eq!(count_tree(&g, Weights::Unit, &star).unwrap(), want);
        }

        let p3 = RootedPattern::path(3).unwrap();
        let via_tree = count_tree(&g, Weights::Unit, &p3).unwrap();
        assert_eq!(via_tree, count_paths(&g, Weights::Unit, 3).unwrap()[&3]);
        assert_eq!((via_tree[0], via_tree[2]), (7.0, 8.0));

        assert!(matches!(count_tree(&g, Weights::Unit, &RootedPattern::cycle(3).unwrap()), Err(Error::NotATree(_))));
    }

    #[test]
    fn dispatch() {
        let g = two_triangles();
        let c5 = RootedPattern::cycle(5).unwrap();
        assert_eq!(count_rooted(&g, Weights::Unit, &c5).unwrap(), count_cycles(&g, Weights::Unit, &[5]).unwrap()[&5]);
        let p4 = RootedPattern::path(4).unwrap();
        assert_eq!(count_rooted(&g, Weights::Unit, &p4).unwrap(), count_paths(&g, Weights::Unit, 4).unwrap()[&4]);

        // Triangle 0-1-2 with a pendant 3 on vertex 2, rooted at 0, into
        // K3 plus a pendant: hand count is 2 triangles through the root,
        // times deg of the image of vertex 2.
        let pendant = RootedPattern::new("k3p", 4, 0, &[(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        let target = FeaturedGraph::plain(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        let counts = count_rooted(&target, Weights::Unit, &pendant).unwrap();
        assert_eq!(counts, vec![5.0, 5.0, 4.0, 0.0]);
        assert_eq!(counts, oracle::brute_force_all(&target, Weights::Unit, &pendant, false).unwrap());
    }

    #[test]
    fn graph_level() {
        let g = two_triangles();
        assert_eq!(count_graph_level(&g, Weights::Unit, &RootedPattern::path(2).unwrap()).unwrap(), 16.0);
        assert_eq!(count_graph_level(&g, Weights::Unit, &RootedPattern::cycle(3).unwrap()).unwrap(), 12.0);
        assert_eq!(count_graph_level(&g, Weights::Unit, &RootedPattern::path(1).unwrap()).unwrap(), 7.0);
        assert_eq!(
            count_graph_level_exact(&g, &RootedPattern::cycle(3).unwrap()).unwrap(),
            BigUint::from(12u8)
        );
    }

    #[test]
    fn graph_level_ignores_root_choice() {
        let g = two_triangles();
        let a = RootedPattern::new("p3end", 3, 0, &[(0, 1), (1, 2)]).unwrap();
        let b = RootedPattern::new("p3mid", 3, 1, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(count_graph_level(&g, Weights::Unit, &a).unwrap(), count_graph_level(&g, Weights::Unit, &b).unwrap());
    }

    #[test]
    fn family_batch_matches_single_counts() {
        let g = two_triangles();
        let mut patterns = enumerate_paths(5).unwrap().patterns;
        patterns.extend(enumerate_cycles(6).unwrap().patterns);
        patterns.extend(enumerate_trees(6).unwrap().patterns);
        let batch = count_family(&g, Weights::Unit, &patterns, false, None).unwrap();
        for (p, col) in patterns.iter().zip(batch) {
            assert_eq!(col.unwrap(), count_rooted(&g, Weights::Unit, p).unwrap(), "{}", p.name());
        }
    }

    #[test]
    fn family_past_deadline_is_empty() {
        let g = two_triangles();
        let patterns = enumerate_trees(5).unwrap().patterns;
        let out = count_family(&g, Weights::Unit, &patterns, false, Some(Instant::now())).unwrap();
        assert!(out.iter().all(Option::is_none));
    }
}
