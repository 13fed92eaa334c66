//! Weighted rooted homomorphism counts as explainable node embeddings.
//!
//! A node embedding here is a vector of counts: for each small rooted
//! pattern `F` the weighted number of ways to map `F` into the graph with the
//! root landing on the node, where every mapped vertex contributes its
//! feature value as a factor.

pub mod data;
pub mod embed;
pub mod error;
pub mod eval;
pub mod graph;
pub mod hom;
pub mod io;
pub mod oracle;
pub mod patterns;
pub mod scalar;

pub use data::{generate_sbm, load_dataset, save_dataset, LabeledDataset, SbmKind, SbmSpec};
pub use embed::{
    append_raw_features, concat_ensemble, density, embed_plain, embed_structural, embed_tensor, embed_with, log_scale,
    EmbedOptions, Embedded, EmbeddingMatrix,
};
pub use error::{Error, Result};
pub use eval::{feature_importance, stratified_cv, train_forest, weighted_accuracy, EvalReport, Forest, ForestConfig};
pub use graph::{FeaturedGraph, RootedGraph, Weights, WlColoring, DEFAULT_EPSILON};
pub use hom::{count_cycles, count_family, count_paths, count_rooted, count_tree, HomCountVector};
pub use oracle::{brute_force_rooted, ORACLE_MAX_ORDER};
pub use patterns::{FamilyKind, FamilySpec, PatternFamily, RootedPattern, Shape};
