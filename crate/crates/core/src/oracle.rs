//! Brute-force weighted rooted homomorphism counting.
//!
//! Enumerates every map from pattern vertices to graph nodes that pins the
//! root and preserves edges, summing the product of the image weights. This
//! is the ground truth the fast counting routines are tested against, and
//! the fallback for patterns that are neither trees nor cycles.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::graph::{FeaturedGraph, Weights};
use crate::patterns::RootedPattern;
use crate::scalar::Scalar;

/// Largest pattern order brute force accepts without `force`.
pub const ORACLE_MAX_ORDER: usize = 6;

pub(crate) fn check_guard(pattern: &RootedPattern, force: bool) -> Result<()> {
    if pattern.order() > ORACLE_MAX_ORDER && !force {
        return Err(Error::SizeGuard {
            name: pattern.name().to_string(),
            order: pattern.order(),
            limit: ORACLE_MAX_ORDER,
        });
    }
    Ok(())
}

/// Sum over homomorphisms with `root -> v` of the product of image weights.
pub(crate) fn enumerate<T: Scalar>(g: &FeaturedGraph, w: &[T], pattern: &RootedPattern, v: usize) -> T {
    // Pattern vertices in BFS order: every vertex after the root has an
    // earlier neighbor, whose image bounds its candidates.
    let order = pattern.bfs_order();
    let anchor: Vec<usize> = order
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            order[..i]
                .iter()
                .copied()
                .find(|&y| pattern.has_edge(x, y))
                .unwrap_or(usize::MAX)
        })
        .collect();
    let mut image = vec![usize::MAX; pattern.order()];
    image[pattern.root()] = v;
    let mut total = T::zero();
    extend(g, w, pattern, &order, &anchor, &mut image, 1, w[v].clone(), &mut total);
    total
}

#[allow(clippy::too_many_arguments)]
fn extend<T: Scalar>(
    g: &FeaturedGraph,
    w: &[T],
    pattern: &RootedPattern,
    order: &[usize],
    anchor: &[usize],
    image: &mut [usize],
    depth: usize,
    product: T,
    total: &mut T,
) {
    if depth == order.len() {
        total.add_assign_ref(&product);
        return;
    }
    let x = order[depth];
    let base = image[anchor[depth]];
    for &y in g.neighbors(base) {
        let fits = order[..depth]
            .iter()
            .all(|&z| !pattern.has_edge(x, z) || g.has_edge(y, image[z]));
        if fits {
            image[x] = y;
            extend(g, w, pattern, order, anchor, image, depth + 1, product.mul_ref(&w[y]), total);
        }
    }
    image[x] = usize::MAX;
}

pub fn brute_force_rooted(
    g: &FeaturedGraph,
    weights: Weights,
    pattern: &RootedPattern,
    v: usize,
    force: bool,
) -> Result<f64> {
    check_guard(pattern, force)?;
    check_node(g, v)?;
    let w = g.weights(weights)?;
    Ok(enumerate(g, &w, pattern, v))
}

pub fn brute_force_all(
    g: &FeaturedGraph,
    weights: Weights,
    pattern: &RootedPattern,
    force: bool,
) -> Result<Vec<f64>> {
    check_guard(pattern, force)?;
    let w = g.weights(weights)?;
    Ok((0..g.node_count()).map(|v| enumerate(g, &w, pattern, v)).collect())
}

/// Exact homomorphism count into the plain structure of `g`.
pub fn brute_force_rooted_exact(g: &FeaturedGraph, pattern: &RootedPattern, v: usize, force: bool) -> Result<BigUint> {
    check_guard(pattern, force)?;
    check_node(g, v)?;
    let w = vec![BigUint::from(1u8); g.node_count()];
    Ok(enumerate(g, &w, pattern, v))
}

pub fn brute_force_all_exact(g: &FeaturedGraph, pattern: &RootedPattern, force: bool) -> Result<Vec<BigUint>> {
    check_guard(pattern, force)?;
    let w = vec![BigUint::from(1u8); g.node_count()];
    Ok((0..g.node_count()).map(|v| enumerate(g, &w, pattern, v)).collect())
}

fn check_node(g: &FeaturedGraph, v: usize) -> Result<()> {
    if v >= g.node_count() {
        return Err(Error::InvalidInput(format!("node {v} outside [0, {})", g.node_count())));
    }
    Ok(())
}
