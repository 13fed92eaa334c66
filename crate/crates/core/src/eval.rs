//! Downstream evaluation: a random forest of CART trees (Gini impurity,
//! bootstrap bagging, random feature subsets per split), stratified k-fold
//! cross-validation, class-balanced accuracy and mean-decrease-in-impurity
//! feature importances keyed by embedding column label.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::EmbeddingMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub num_trees: usize,
    /// `None` grows trees until leaves are pure.
    pub max_depth: Option<usize>,
    /// `None` means `floor(sqrt(D))`, at least 1.
    pub features_per_split: Option<usize>,
    pub min_samples_leaf: usize,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self { num_trees: 100, max_depth: None, features_per_split: None, min_samples_leaf: 1, bootstrap: true, seed: 0 }
    }
}

impl ForestConfig {
    fn mtry(&self, dim: usize) -> usize {
        self.features_per_split
            .unwrap_or_else(|| (dim as f64).sqrt().floor() as usize)
            .clamp(1, dim.max(1))
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { dist: Vec<f64> },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone)]
struct Tree {
    nodes: Vec<Node>,
    /// Normalized impurity decrease per feature (all zero for a stump).
    importances: Vec<f64>,
    in_bag: Vec<bool>,
}

impl Tree {
    fn leaf_dist(&self, row: &[f64]) -> &[f64] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { dist } => return dist,
                Node::Split { feature, threshold, left, right } => {
                    at = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Forest {
    trees: Vec<Tree>,
    classes: usize,
    dim: usize,
}

fn argmax(dist: &[f64]) -> usize {
    let mut best = 0;
    for (k, &p) in dist.iter().enumerate() {
        if p > dist[best] {
            best = k;
        }
    }
    best
}

struct Builder<'a> {
    x: &'a EmbeddingMatrix,
    y: &'a [usize],
    classes: usize,
    cfg: &'a ForestConfig,
    mtry: usize,
    nodes: Vec<Node>,
    importances: Vec<f64>,
}

/// Samples, depth, and the parent slot (node, is_left) to patch.
type Pending = (Vec<usize>, usize, Option<(usize, bool)>);

struct BestSplit {
    feature: usize,
    threshold: f64,
    /// Position in the sorted sample list where the right side starts.
    cut: usize,
    score: f64,
    order: Vec<usize>,
}

impl Builder<'_> {
    fn class_counts(&self, samples: &[usize]) -> Vec<f64> {
        let mut counts = vec![0.0; self.classes];
        for &i in samples {
            counts[self.y[i]] += 1.0;
        }
        counts
    }

    fn leaf(&mut self, counts: &[f64]) -> usize {
        let total: f64 = counts.iter().sum();
        self.nodes.push(Node::Leaf { dist: counts.iter().map(|c| c / total).collect() });
        self.nodes.len() - 1
    }

    /// Scans features in random order; stops after `mtry` features once a
    /// valid split has been seen.
    fn best_split(&self, samples: &[usize], counts: &[f64], rng: &mut ChaCha8Rng) -> Option<BestSplit> {
        let n = samples.len();
        let min_leaf = self.cfg.min_samples_leaf.max(1);
        let mut features: Vec<usize> = (0..self.x.dim()).collect();
        features.shuffle(rng);
        let mut best: Option<BestSplit> = None;
        for (visited, &f) in features.iter().enumerate() {
            if visited >= self.mtry && best.is_some() {
                break;
            }
            let mut order = samples.to_vec();
            order.sort_unstable_by(|&a, &b| self.x.get(a, f).total_cmp(&self.x.get(b, f)));
            let mut left = vec![0.0; self.classes];
            let mut right = counts.to_vec();
            let mut left_sq = 0.0;
            let mut right_sq: f64 = counts.iter().map(|c| c * c).sum();
            let mut found: Option<(f64, usize)> = None;
            for pos in 1..n {
                let c = self.y[order[pos - 1]];
                left_sq += 2.0 * left[c] + 1.0;
                left[c] += 1.0;
                right_sq -= 2.0 * right[c] - 1.0;
                right[c] -= 1.0;
                if pos < min_leaf || n - pos < min_leaf {
                    continue;
                }
                let (lo, hi) = (self.x.get(order[pos - 1], f), self.x.get(order[pos], f));
                if lo == hi {
                    continue;
                }
                let score = left_sq / pos as f64 + right_sq / (n - pos) as f64;
                if found.is_none_or(|(s, _)| score > s) {
                    found = Some((score, pos));
                }
            }
            if let Some((score, cut)) = found {
                if best.as_ref().is_none_or(|b| score > b.score) {
                    let (lo, hi) = (self.x.get(order[cut - 1], f), self.x.get(order[cut], f));
                    let mid = lo + (hi - lo) / 2.0;
                    let threshold = if mid < hi { mid } else { lo };
                    best = Some(BestSplit { feature: f, threshold, cut, score, order });
                }
            }
        }
        best
    }

    fn build(&mut self, root_samples: Vec<usize>, rng: &mut ChaCha8Rng) {
        let mut stack: Vec<Pending> = vec![(root_samples, 0, None)];
        while let Some((samples, depth, slot)) = stack.pop() {
            let counts = self.class_counts(&samples);
            let n = samples.len() as f64;
            let pure = counts.iter().filter(|&&c| c > 0.0).count() <= 1;
            let depth_capped = self.cfg.max_depth.is_some_and(|d| depth >= d);
            let too_small = samples.len() < 2 * self.cfg.min_samples_leaf.max(1);
            let split = if pure || depth_capped || too_small { None } else { self.best_split(&samples, &counts, rng) };
            let id = match split {
                None => self.leaf(&counts),
                Some(s) => {
                    let node_sq: f64 = counts.iter().map(|c| c * c).sum();
                    // n·gini(node) − Σ side·gini(side) = Σ side_sq/side − node_sq/n
                    self.importances[s.feature] += s.score - node_sq / n;
                    self.nodes.push(Node::Split { feature: s.feature, threshold: s.threshold, left: 0, right: 0 });
                    let id = self.nodes.len() - 1;
                    let mut order = s.order;
                    let right = order.split_off(s.cut);
                    stack.push((right, depth + 1, Some((id, false))));
                    stack.push((order, depth + 1, Some((id, true))));
                    id
                }
            };
            if let Some((parent, is_left)) = slot {
                if let Node::Split { left, right, .. } = &mut self.nodes[parent] {
                    if is_left {
                        *left = id;
                    } else {
                        *right = id;
                    }
                }
            }
        }
    }
}

fn tree_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn check_finite(x: &EmbeddingMatrix) -> Result<()> {
    if let Some(k) = x.values().iter().position(|v| v.is_nan()) {
        let d = x.dim();
        return Err(Error::InvalidInput(format!("NaN at row {}, column `{}`", k / d, x.labels()[k % d])));
    }
    Ok(())
}

impl Forest {
    /// Trains on the rows listed in `rows`.
    pub fn fit_rows(x: &EmbeddingMatrix, y: &[usize], rows: &[usize], cfg: &ForestConfig) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::RowMismatch { got: y.len(), expected: x.rows() });
        }
        if rows.len() < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 training samples, got {}", rows.len())));
        }
        if cfg.num_trees == 0 {
            return Err(Error::InvalidInput("num_trees must be at least 1".into()));
        }
        check_finite(x)?;
        let classes = y.iter().max().map_or(0, |&c| c + 1);
        let mtry = cfg.mtry(x.dim());
        let trees = (0..cfg.num_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(tree_seed(cfg.seed, t));
                let mut in_bag = vec![false; x.rows()];
                let sample: Vec<usize> = if cfg.bootstrap {
                    (0..rows.len()).map(|_| rows[rng.random_range(0..rows.len())]).collect()
                } else {
                    rows.to_vec()
                };
                sample.iter().for_each(|&i| in_bag[i] = true);
                let mut b = Builder { x, y, classes, cfg, mtry, nodes: Vec::new(), importances: vec![0.0; x.dim()] };
                b.build(sample, &mut rng);
                let total: f64 = b.importances.iter().sum();
                if total > 0.0 {
                    b.importances.iter_mut().for_each(|v| *v /= total);
                }
                Tree { nodes: b.nodes, importances: b.importances, in_bag }
            })
            .collect();
        Ok(Self { trees, classes, dim: x.dim() })
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn predict_row(&self, row: &[f64]) -> usize {
        let mut acc = vec![0.0; self.classes];
        for t in &self.trees {
            for (a, p) in acc.iter_mut().zip(t.leaf_dist(row)) {
                *a += p;
            }
        }
        argmax(&acc)
    }

    pub fn predict(&self, x: &EmbeddingMatrix) -> Vec<usize> {
        (0..x.rows()).map(|i| self.predict_row(x.row(i))).collect()
    }

    /// Mean over trees of each tree's accuracy on its out-of-bag rows.
    pub fn mean_tree_oob_accuracy(&self, x: &EmbeddingMatrix, y: &[usize]) -> f64 {
        let per_tree: Vec<f64> = self
            .trees
            .iter()
            .filter_map(|t| {
                let oob: Vec<usize> = (0..x.rows()).filter(|&i| !t.in_bag[i]).collect();
                (!oob.is_empty()).then(|| {
                    let hits = oob.iter().filter(|&&i| argmax(t.leaf_dist(x.row(i))) == y[i]).count();
                    hits as f64 / oob.len() as f64
                })
            })
            .collect();
        per_tree.iter().sum::<f64>() / per_tree.len().max(1) as f64
    }

    /// Mean decrease in impurity per feature, summing to 1 unless no tree
    /// ever split.
    pub fn importances(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for t in &self.trees {
            out.iter_mut().zip(&t.importances).for_each(|(a, b)| *a += b);
        }
        let total: f64 = out.iter().sum();
        if total > 0.0 {
            out.iter_mut().for_each(|v| *v /= total);
        }
        out
    }
}

pub fn train_forest(x: &EmbeddingMatrix, y: &[usize], cfg: &ForestConfig) -> Result<Forest> {
    if x.rows() == 0 {
        return Err(Error::InvalidInput("no training data".into()));
    }
    let rows: Vec<usize> = (0..x.rows()).collect();
    Forest::fit_rows(x, y, &rows, cfg)
}

/// Importances keyed by column label.
pub fn feature_importance(forest: &Forest, labels: &[String]) -> Result<BTreeMap<String, f64>> {
    if forest.trees.is_empty() {
        return Err(Error::Untrained);
    }
    if labels.len() != forest.dim {
        return Err(Error::InvalidInput(format!("{} labels for {} features", labels.len(), forest.dim)));
    }
    Ok(labels.iter().cloned().zip(forest.importances()).collect())
}

pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    if pred.len() != truth.len() || pred.is_empty() {
        return Err(Error::InvalidInput(format!("{} predictions for {} labels", pred.len(), truth.len())));
    }
    Ok(pred.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / pred.len() as f64)
}

/// Mean per-class recall over the classes present in `truth`.
pub fn weighted_accuracy(pred: &[usize], truth: &[usize], classes: usize) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::InvalidInput(format!("{} predictions for {} labels", pred.len(), truth.len())));
    }
    let classes = classes.max(truth.iter().max().map_or(0, |&c| c + 1));
    let mut hits = vec![0usize; classes];
    let mut totals = vec![0usize; classes];
    for (&p, &t) in pred.iter().zip(truth) {
        totals[t] += 1;
        hits[t] += usize::from(p == t);
    }
    let recalls: Vec<f64> = hits
        .iter()
        .zip(&totals)
        .filter(|(_, &n)| n > 0)
        .map(|(&h, &n)| h as f64 / n as f64)
        .collect();
    if recalls.is_empty() {
        return Err(Error::InvalidInput("no labels".into()));
    }
    Ok(recalls.iter().sum::<f64>() / recalls.len() as f64)
}

/// Fold index sets preserving class proportions to within one sample.
pub fn stratified_folds(y: &[usize], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 folds, got {k}")));
    }
    let classes = y.iter().max().map_or(0, |&c| c + 1);
    let mut by_class = vec![Vec::new(); classes];
    for (i, &c) in y.iter().enumerate() {
        by_class[c].push(i);
    }
    if let Some((class, members)) = by_class.iter().enumerate().find(|(_, m)| !m.is_empty() && m.len() < k) {
        return Err(Error::ClassTooSmall { class, count: members.len(), folds: k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for members in &mut by_class {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            folds[next].push(i);
            next = (next + 1) % k;
        }
    }
    folds.iter_mut().for_each(|f| f.sort_unstable());
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub repetition: usize,
    pub fold: usize,
    pub accuracy: f64,
    pub weighted_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy_mean: f64,
    pub accuracy_std: f64,
    pub weighted_accuracy_mean: f64,
    pub weighted_accuracy_std: f64,
    pub folds: usize,
    pub repetitions: usize,
    pub per_fold: Vec<FoldResult>,
    pub importances: BTreeMap<String, f64>,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// `repetitions` rounds of `k`-fold stratified cross-validation. Std is the
/// population standard deviation over all folds of all rounds.
pub fn stratified_cv(
    x: &EmbeddingMatrix,
    y: &[usize],
    k: usize,
    cfg: &ForestConfig,
    repetitions: usize,
) -> Result<EvalReport> {
    if repetitions == 0 {
        return Err(Error::InvalidInput("need at least one repetition".into()));
    }
    if x.rows() != y.len() {
        return Err(Error::RowMismatch { got: y.len(), expected: x.rows() });
    }
    let classes = y.iter().max().map_or(0, |&c| c + 1);
    let mut per_fold = Vec::with_capacity(k * repetitions);
    let mut importance_sum = vec![0.0; x.dim()];
    for rep in 0..repetitions {
        let rep_seed = tree_seed(cfg.seed, 1_000_000 + rep);
        let folds = stratified_folds(y, k, rep_seed)?;
        for (f, test) in folds.iter().enumerate() {
            let mut in_test = vec![false; y.len()];
            test.iter().for_each(|&i| in_test[i] = true);
            let train: Vec<usize> = (0..y.len()).filter(|&i| !in_test[i]).collect();
            let fold_cfg = ForestConfig { seed: tree_seed(rep_seed, f), ..cfg.clone() };
            let forest = Forest::fit_rows(x, y, &train, &fold_cfg)?;
            let pred: Vec<usize> = test.iter().map(|&i| forest.predict_row(x.row(i))).collect();
            let truth: Vec<usize> = test.iter().map(|&i| y[i]).collect();
            per_fold.push(FoldResult {
                repetition: rep,
                fold: f,
                accuracy: accuracy(&pred, &truth)?,
                weighted_accuracy: weighted_accuracy(&pred, &truth, classes)?,
            });
            importance_sum.iter_mut().zip(forest.importances()).for_each(|(a, b)| *a += b);
        }
    }
    let (accuracy_mean, accuracy_std) = mean_std(&per_fold.iter().map(|r| r.accuracy).collect::<Vec<_>>());
    let (weighted_accuracy_mean, weighted_accuracy_std) =
        mean_std(&per_fold.iter().map(|r| r.weighted_accuracy).collect::<Vec<_>>());
    let total: f64 = importance_sum.iter().sum();
    if total > 0.0 {
        importance_sum.iter_mut().for_each(|v| *v /= total);
    }
    Ok(EvalReport {
        accuracy_mean,
        accuracy_std,
        weighted_accuracy_mean,
        weighted_accuracy_std,
        folds: k,
        repetitions,
        per_fold,
        importances: x.labels().iter().cloned().zip(importance_sum).collect(),
    })
}
