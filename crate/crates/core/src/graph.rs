//! Featured right-hand graphs and the utilities shared by the counting code.
//!
//! A [`FeaturedGraph`] is a simple undirected graph whose nodes carry `m >= 1`
//! real feature channels. Homomorphism counts are taken channel by channel,
//! so each channel acts as a node weight vector (see [`Weights`]).

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Default perturbation for zero-valued features.
pub const DEFAULT_EPSILON: f64 = 0.01;

/// Which node weights a count uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Weights {
    /// Every node has weight 1; counts are plain homomorphism numbers.
    Unit,
    /// Feature column `j` of the graph.
    Channel(usize),
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weights::Unit => f.write_str("unit"),
            Weights::Channel(j) => write!(f, "ch{j}"),
        }
    }
}

impl std::str::FromStr for Weights {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "unit" {
            return Ok(Weights::Unit);
        }
        s.strip_prefix("ch")
            .and_then(|j| j.parse().ok())
            .map(Weights::Channel)
            .ok_or_else(|| Error::BadLabel(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeaturedGraph {
    name: String,
    n: usize,
    /// Normalized `(u, v)` with `u < v`, sorted.
    edges: Vec<(usize, usize)>,
    /// Sorted neighbor lists.
    neighbors: Vec<Vec<usize>>,
    /// Row-major `n x m`.
    features: Vec<f64>,
    m: usize,
}

impl FeaturedGraph {
    /// Validates and builds a graph. Missing features default to a single
    /// all-ones column.
    pub fn new(
        n: usize,
        edges: &[(usize, usize)],
        features: Option<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let mut normalized = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::EndpointOutOfRange { u, v, n });
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }

        let mut neighbors = vec![Vec::new(); n];
        for &(u, v) in &normalized {
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }

        let (features, m) = match features {
            None => (vec![1.0; n], 1),
            Some(rows) => {
                if rows.len() != n {
                    return Err(Error::FeatureRows { got: rows.len(), n });
                }
                let m = rows.first().map_or(1, Vec::len);
                if m == 0 {
                    return Err(Error::NoFeatureColumns);
                }
                let mut flat = Vec::with_capacity(n * m);
                for (row, values) in rows.into_iter().enumerate() {
                    if values.len() != m {
                        return Err(Error::RaggedFeatures { row, got: values.len(), expected: m });
                    }
                    flat.extend(values);
                }
                if n == 0 {
                    (flat, 1)
                } else {
                    (flat, m)
                }
            }
        };

        Ok(Self { name: String::new(), n, edges: normalized, neighbors, features, m })
    }

    /// Plain graph with `n` nodes and unit features.
    pub fn plain(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(n, edges, None)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.neighbors[u].binary_search(&v).is_ok()
    }

    /// Dense 0/1 adjacency matrix.
    pub fn adjacency_matrix(&self) -> Vec<Vec<u8>> {
        let mut a = vec![vec![0u8; self.n]; self.n];
        for &(u, v) in &self.edges {
            a[u][v] = 1;
            a[v][u] = 1;
        }
        a
    }

    pub fn feature_dim(&self) -> usize {
        self.m
    }

    pub fn feature(&self, v: usize, channel: usize) -> f64 {
        self.features[v * self.m + channel]
    }

    pub fn feature_row(&self, v: usize) -> &[f64] {
        &self.features[v * self.m..(v + 1) * self.m]
    }

    pub fn feature_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|v| self.feature_row(v).to_vec()).collect()
    }

    /// One feature column as a weight vector.
    pub fn channel(&self, channel: usize) -> Result<Vec<f64>> {
        if channel >= self.m {
            return Err(Error::ChannelOutOfRange { channel, m: self.m });
        }
        Ok((0..self.n).map(|v| self.feature(v, channel)).collect())
    }

    pub fn weights(&self, weights: Weights) -> Result<Vec<f64>> {
        match weights {
            Weights::Unit => Ok(vec![1.0; self.n]),
            Weights::Channel(j) => self.channel(j),
        }
    }

    /// `m = 1` and every feature equals 1.
    pub fn is_plain(&self) -> bool {
        self.m == 1 && self.features.iter().all(|&x| x == 1.0)
    }

    /// Same structure, features dropped.
    pub fn to_plain(&self) -> Self {
        Self {
            name: self.name.clone(),
            n: self.n,
            edges: self.edges.clone(),
            neighbors: self.neighbors.clone(),
            features: vec![1.0; self.n],
            m: 1,
        }
    }

    /// Single-channel graph `G_j` sharing this structure.
    pub fn channel_graph(&self, channel: usize) -> Result<Self> {
        let features = self.channel(channel)?;
        Ok(Self {
            name: self.name.clone(),
            n: self.n,
            edges: self.edges.clone(),
            neighbors: self.neighbors.clone(),
            features,
            m: 1,
        })
    }

    /// Replaces every zero feature by `epsilon`; other entries are untouched.
    pub fn preprocess_zero_features(&self, epsilon: f64) -> Result<Self> {
        if epsilon.is_nan() || epsilon <= 0.0 || epsilon.is_infinite() {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        let mut out = self.clone();
        for x in &mut out.features {
            if *x == 0.0 {
                *x = epsilon;
            }
        }
        Ok(out)
    }

    /// Relabels node `v` as `perm[v]`, carrying features along.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::NotAPermutation(self.n));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::NotAPermutation(self.n));
            }
        }
        let edges: Vec<_> = self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        let mut rows = vec![Vec::new(); self.n];
        for v in 0..self.n {
            rows[perm[v]] = self.feature_row(v).to_vec();
        }
        Ok(Self::new(self.n, &edges, Some(rows))?.with_name(self.name.clone()))
    }

    /// Structure-only 1-WL color refinement run to its fixpoint.
    pub fn wl_refine(&self) -> WlColoring {
        let mut colors = vec![0usize; self.n];
        let mut classes = usize::from(self.n > 0);
        for _ in 0..self.n {
            let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let next: Vec<usize> = (0..self.n)
                .map(|v| {
                    let mut around: Vec<usize> =
                        self.neighbors[v].iter().map(|&u| colors[u]).collect();
                    around.sort_unstable();
                    let fresh = ids.len();
                    *ids.entry((colors[v], around)).or_insert(fresh)
                })
                .collect();
            let refined = ids.len();
            colors = next;
            if refined == classes {
                break;
            }
            classes = refined;
        }
        WlColoring { colors }
    }
}

/// A graph with a distinguished root node.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedGraph {
    pub graph: FeaturedGraph,
    pub root: usize,
}

impl RootedGraph {
    pub fn new(graph: FeaturedGraph, root: usize) -> Result<Self> {
        if root >= graph.node_count() {
            return Err(Error::InvalidInput(format!(
                "root {root} outside [0, {})",
                graph.node_count()
            )));
        }
        Ok(Self { graph, root })
    }
}

/// Stable 1-WL colors; ids are numbered by first occurrence in node order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WlColoring {
    pub colors: Vec<usize>,
}

impl WlColoring {
    pub fn class_count(&self) -> usize {
        self.colors.iter().max().map_or(0, |&c| c + 1)
    }

    /// True when both colorings induce the same partition of the nodes.
    pub fn same_partition(&self, other: &WlColoring) -> bool {
        if self.colors.len() != other.colors.len() {
            return false;
        }
        let mut forward = HashMap::new();
        let mut backward = HashMap::new();
        self.colors.iter().zip(&other.colors).all(|(&a, &b)| {
            *forward.entry(a).or_insert(b) == b && *backward.entry(b).or_insert(a) == a
        })
    }
}
