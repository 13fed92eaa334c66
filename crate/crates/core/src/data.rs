//! Labeled datasets, synthetic stochastic-block-model benchmarks, and the
//! dataset directory layout.
//!
//! Random streams: graph `i` of a dataset with seed `s` draws from
//! ChaCha8 seeded through `seed_from_u64(s ^ i)`. On top of the raw `u64`
//! stream, a uniform real is `(x >> 11) · 2^-53` and a uniform index below
//! `k` is the high 64 bits of `x · k`. Node pairs `(u, v)`, `u < v`, are
//! visited in lexicographic order and each consumes one uniform real.

use std::fs;
use std::path::Path;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::FeaturedGraph;
use crate::io;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub name: String,
    pub graphs: Vec<FeaturedGraph>,
    /// One label vector per graph.
    pub labels: Vec<Vec<usize>>,
    pub classes: usize,
    pub spec: Option<SbmSpec>,
}

impl LabeledDataset {
    pub fn new(name: impl Into<String>, graphs: Vec<FeaturedGraph>, labels: Vec<Vec<usize>>, classes: usize) -> Result<Self> {
        let ds = Self { name: name.into(), graphs, labels, classes, spec: None };
        ds.validate()?;
        Ok(ds)
    }

    fn validate(&self) -> Result<()> {
        if self.graphs.len() != self.labels.len() {
            return Err(Error::InvalidInput(format!(
                "{} graphs but {} label vectors",
                self.graphs.len(),
                self.labels.len()
            )));
        }
        for (i, (g, y)) in self.graphs.iter().zip(&self.labels).enumerate() {
            if g.node_count() != y.len() {
                return Err(Error::InvalidInput(format!(
                    "graph {i} has {} nodes but {} labels",
                    g.node_count(),
                    y.len()
                )));
            }
            if let Some(&bad) = y.iter().find(|&&c| c >= self.classes) {
                return Err(Error::InvalidInput(format!("graph {i}: class {bad} not below {}", self.classes)));
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.graphs.iter().map(FeaturedGraph::node_count).sum()
    }

    /// Labels of all graphs, concatenated in graph order.
    pub fn stacked_labels(&self) -> Vec<usize> {
        self.labels.iter().flatten().copied().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SbmKind {
    Cluster,
    Pattern,
}

/// Densities of the planted pattern block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternBlock {
    /// Edge probability inside the block.
    pub p: f64,
    /// Edge probability between the block and the background.
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbmSpec {
    pub kind: SbmKind,
    pub num_graphs: usize,
    /// Inclusive node-count range per graph.
    pub nodes: (usize, usize),
    /// Communities (background communities for the pattern kind).
    pub num_communities: usize,
    pub p_intra: f64,
    pub q_inter: f64,
    pub pattern_block: Option<PatternBlock>,
    pub seed: u64,
}

impl SbmSpec {
    pub fn cluster_default() -> Self {
        Self {
            kind: SbmKind::Cluster,
            num_graphs: 200,
            nodes: (40, 60),
            num_communities: 6,
            p_intra: 0.55,
            q_inter: 0.25,
            pattern_block: None,
            seed: 7,
        }
    }

    pub fn pattern_default() -> Self {
        Self {
            kind: SbmKind::Pattern,
            num_graphs: 200,
            nodes: (44, 60),
            num_communities: 5,
            p_intra: 0.5,
            q_inter: 0.35,
            pattern_block: Some(PatternBlock { p: 0.5, q: 0.5 }),
            seed: 7,
        }
    }

    fn blocks(&self) -> usize {
        self.num_communities + usize::from(self.kind == SbmKind::Pattern)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSbm(msg));
        let prob = |x: f64| (0.0..=1.0).contains(&x);
        if !(prob(self.p_intra) && prob(self.q_inter)) || self.q_inter > self.p_intra {
            return bad(format!("need 0 <= q <= p <= 1, got p = {}, q = {}", self.p_intra, self.q_inter));
        }
        if self.num_communities == 0 {
            return bad("at least one community is required".into());
        }
        let (lo, hi) = self.nodes;
        if lo > hi {
            return bad(format!("empty node range {lo}:{hi}"));
        }
        if lo < self.blocks() {
            return bad(format!("{lo} nodes cannot fill {} blocks", self.blocks()));
        }
        match (self.kind, self.pattern_block) {
            (SbmKind::Pattern, None) => bad("pattern datasets need a pattern block".into()),
            (SbmKind::Cluster, Some(_)) => bad("cluster datasets take no pattern block".into()),
            (_, Some(b)) if !(prob(b.p) && prob(b.q)) => bad(format!("pattern densities out of range: {b:?}")),
            _ => Ok(()),
        }
    }
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn below(rng: &mut ChaCha8Rng, k: usize) -> usize {
    ((u128::from(rng.next_u64()) * k as u128) >> 64) as usize
}

/// Even block sizes, remainder to the first blocks; returns each node's block.
fn assign_blocks(n: usize, blocks: usize) -> Vec<usize> {
    let (base, extra) = (n / blocks, n % blocks);
    (0..blocks)
        .flat_map(|b| std::iter::repeat_n(b, base + usize::from(b < extra)))
        .collect()
}

fn sample_edges(rng: &mut ChaCha8Rng, n: usize, prob: impl Fn(usize, usize) -> f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if unit(rng) < prob(u, v) {
                edges.push((u, v));
            }
        }
    }
    edges
}

fn generate(spec: &SbmSpec, build: impl Fn(&mut ChaCha8Rng, usize) -> Result<(FeaturedGraph, Vec<usize>)> + Sync) -> Result<LabeledDataset> {
    spec.validate()?;
    let (lo, hi) = spec.nodes;
    let pairs = (0..spec.num_graphs)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ i as u64);
            let n = lo + below(&mut rng, hi - lo + 1);
            let (g, y) = build(&mut rng, n)?;
            Ok((g.with_name(format!("graph_{i}")), y))
        })
        .collect::<Result<Vec<_>>>()?;
    let (graphs, labels) = pairs.into_iter().unzip();
    let classes = match spec.kind {
        SbmKind::Cluster => spec.num_communities,
        SbmKind::Pattern => 2,
    };
    let name = match spec.kind {
        SbmKind::Cluster => "sbm-cluster",
        SbmKind::Pattern => "sbm-pattern",
    };
    let mut ds = LabeledDataset::new(name, graphs, labels, classes)?;
    ds.spec = Some(spec.clone());
    Ok(ds)
}

/// Community-detection graphs: labels are community ids. There is one
/// feature column per community; column `b` is zero except at one random
/// node of community `b`, which holds `b + 1`. Each graph thus has exactly
/// `c` nonzero entries, and each seed value gets its own channel.
pub fn gen_cluster_like(spec: &SbmSpec) -> Result<LabeledDataset> {
    if spec.kind != SbmKind::Cluster {
        return Err(Error::InvalidSbm("expected a cluster spec".into()));
    }
    let c = spec.num_communities;
    generate(spec, |rng, n| {
        let block = assign_blocks(n, c);
        let edges = sample_edges(rng, n, |u, v| if block[u] == block[v] { spec.p_intra } else { spec.q_inter });
        let mut features = vec![vec![0.0; c]; n];
        // blocks are contiguous, so community b starts right after b - 1
        let sizes: Vec<usize> = (0..c).map(|b| block.iter().filter(|&&x| x == b).count()).collect();
        let mut start = 0;
        for (b, size) in sizes.into_iter().enumerate() {
            let seed = start + below(rng, size);
            features[seed][b] = (b + 1) as f64;
            start += size;
        }
        Ok((FeaturedGraph::new(n, &edges, Some(features))?, block))
    })
}

/// Pattern-detection graphs: background communities plus one planted block
/// (the last block); label 1 marks pattern nodes. Features are uniform noise
/// from {1, 2, 3}.
pub fn gen_pattern_like(spec: &SbmSpec) -> Result<LabeledDataset> {
    if spec.kind != SbmKind::Pattern {
        return Err(Error::InvalidSbm("expected a pattern spec".into()));
    }
    spec.validate()?;
    let pattern = spec.pattern_block.expect("validated");
    let planted = spec.num_communities;
    generate(spec, |rng, n| {
        let block = assign_blocks(n, planted + 1);
        let edges = sample_edges(rng, n, |u, v| {
            match (block[u] == planted, block[v] == planted) {
                (true, true) => pattern.p,
                (true, false) | (false, true) => pattern.q,
                _ if block[u] == block[v] => spec.p_intra,
                _ => spec.q_inter,
            }
        });
        let features = (0..n).map(|_| vec![(1 + below(rng, 3)) as f64]).collect();
        let labels = block.iter().map(|&b| usize::from(b == planted)).collect();
        Ok((FeaturedGraph::new(n, &edges, Some(features))?, labels))
    })
}

/// Plain G(n, p) graph drawn from the same stream conventions as the SBM
/// generators.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<FeaturedGraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidSbm(format!("edge probability {p} out of range")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    FeaturedGraph::plain(n, &sample_edges(&mut rng, n, |_, _| p))
}

pub fn generate_sbm(spec: &SbmSpec) -> Result<LabeledDataset> {
    match spec.kind {
        SbmKind::Cluster => gen_cluster_like(spec),
        SbmKind::Pattern => gen_pattern_like(spec),
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    name: String,
    classes: usize,
    graphs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    spec: Option<SbmSpec>,
}

/// Writes `meta.json` and `graph_<i>.{edges,features.csv,labels}`.
pub fn save_dataset(ds: &LabeledDataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let meta = Meta { name: ds.name.clone(), classes: ds.classes, graphs: ds.graphs.len(), spec: ds.spec.clone() };
    fs::write(dir.join("meta.json"), serde_json::to_string_pretty(&meta)? + "\n")?;
    for (i, (g, y)) in ds.graphs.iter().zip(&ds.labels).enumerate() {
        fs::write(dir.join(format!("graph_{i}.edges")), io::format_edge_list(g.edges()))?;
        io::write_features(&dir.join(format!("graph_{i}.features.csv")), &g.feature_rows())?;
        io::write_labels(&dir.join(format!("graph_{i}.labels")), y)?;
    }
    Ok(())
}

fn count_files(dir: &Path, suffix: &str) -> Result<usize> {
    let mut count = 0;
    for entry in fs::read_dir(dir)? {
        let name = entry?.file_name();
        let name = name.to_string_lossy();
        if let Some(idx) = name.strip_prefix("graph_").and_then(|r| r.strip_suffix(suffix)) {
            if idx.parse::<usize>().is_ok() {
                count += 1;
            }
        }
    }
    Ok(count)
}

pub fn load_dataset(dir: &Path) -> Result<LabeledDataset> {
    let meta_path = dir.join("meta.json");
    if !meta_path.exists() {
        return Err(Error::MissingFile(meta_path));
    }
    let meta: Meta = serde_json::from_str(&fs::read_to_string(&meta_path)?)?;
    let edge_files = count_files(dir, ".edges")?;
    let label_files = count_files(dir, ".labels")?;
    if edge_files != label_files || edge_files != meta.graphs {
        return Err(Error::InvalidInput(format!(
            "meta.json lists {} graphs, found {edge_files} edge files and {label_files} label files",
            meta.graphs
        )));
    }
    let mut graphs = Vec::with_capacity(meta.graphs);
    let mut labels = Vec::with_capacity(meta.graphs);
    for i in 0..meta.graphs {
        let edges = io::read_edge_list(&dir.join(format!("graph_{i}.edges")))?;
        let y = io::read_labels(&dir.join(format!("graph_{i}.labels")))?;
        let features_path = dir.join(format!("graph_{i}.features.csv"));
        let features = if features_path.exists() { Some(io::read_features(&features_path)?) } else { None };
        let n = features.as_ref().map_or(y.len(), Vec::len);
        graphs.push(FeaturedGraph::new(n, &edges, features)?.with_name(format!("graph_{i}")));
        labels.push(y);
    }
    let mut ds = LabeledDataset::new(meta.name, graphs, labels, meta.classes)?;
    ds.spec = meta.spec;
    Ok(ds)
}
