mod common;

use common::random_plain;
use homcount_core::hom::count_rooted_exact;
use homcount_core::patterns::enumerate_trees;

#[test]
fn equal_wl_colors_give_equal_tree_counts() {
    let trees = enumerate_trees(7).unwrap();
    for seed in 0..20 {
        let g = random_plain(1000 + seed, 10, 0.3);
        let colors = g.wl_refine().colors;
        for tree in &trees {
            let counts = count_rooted_exact(&g, tree, false).unwrap();
            for u in 0..g.node_count() {
                for v in u + 1..g.node_count() {
                    if colors[u] == colors[v] {
                        assert_eq!(counts[u], counts[v], "{} at {u},{v} on graph {seed}", tree.name());
                    }
                }
            }
        }
    }
}

#[test]
fn regular_graphs_cannot_separate_nodes() {
    // 6-cycle and two triangles: both 2-regular, so every node looks alike to trees.
    let hexagon = homcount_core::FeaturedGraph::plain(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
    let triangles = homcount_core::FeaturedGraph::plain(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
    assert_eq!(hexagon.wl_refine().class_count(), 1);
    for tree in &enumerate_trees(6).unwrap() {
        assert_eq!(count_rooted_exact(&hexagon, tree, false).unwrap(), count_rooted_exact(&triangles, tree, false).unwrap());
    }
}
