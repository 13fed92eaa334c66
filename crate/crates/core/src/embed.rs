//! Node embeddings assembled from rooted homomorphism counts.
//!
//! Every column carries a label that says exactly how it was computed:
//!
//! ```text
//! [log:|dens:]*<pattern name>:<weights>     e.g. C4:ch0, log:tree5:01211:unit
//! rawfeat:<j>                               raw feature column j
//! ```
//!
//! `<weights>` is `unit` for structure-only counts and `ch<j>` for counts
//! weighted by feature channel `j`.

use std::collections::HashSet;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::{FeaturedGraph, Weights};
use crate::hom;
use crate::patterns::{PatternFamily, RootedPattern};

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    /// Row-major `rows x labels.len()`.
    values: Vec<f64>,
    labels: Vec<String>,
    pub source: String,
}

impl EmbeddingMatrix {
    pub fn new(rows: usize, values: Vec<f64>, labels: Vec<String>, source: impl Into<String>) -> Result<Self> {
        if values.len() != rows * labels.len() {
            return Err(Error::InvalidInput(format!(
                "{} values do not fill a {rows} x {} matrix",
                values.len(),
                labels.len()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::DuplicateLabel(dup.clone()));
        }
        Ok(Self { rows, values, labels, source: source.into() })
    }

    /// `rows x 0` matrix, the identity for [`concat_ensemble`].
    pub fn empty(rows: usize) -> Self {
        Self { rows, values: Vec::new(), labels: Vec::new(), source: String::new() }
    }

    fn from_columns(rows: usize, columns: Vec<(String, Vec<f64>)>, source: String) -> Result<Self> {
        let dim = columns.len();
        let mut values = vec![0.0; rows * dim];
        let mut labels = Vec::with_capacity(dim);
        for (j, (label, col)) in columns.into_iter().enumerate() {
            if col.len() != rows {
                return Err(Error::RowMismatch { got: col.len(), expected: rows });
            }
            for (i, x) in col.into_iter().enumerate() {
                values[i * dim + j] = x;
            }
            labels.push(label);
        }
        Self::new(rows, values, labels, source)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.values[i * d..(i + 1) * d]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.dim() + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn column_by_label(&self, label: &str) -> Option<Vec<f64>> {
        self.labels.iter().position(|l| l == label).map(|j| self.column(j))
    }

    /// Vertical stack of matrices with identical labels (one block per graph).
    pub fn stack(parts: &[EmbeddingMatrix]) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Ok(Self::empty(0));
        };
        let mut values = Vec::with_capacity(parts.iter().map(|p| p.values.len()).sum());
        let mut rows = 0;
        for p in parts {
            if p.labels != first.labels {
                return Err(Error::InvalidInput("stacked embeddings have different columns".into()));
            }
            values.extend_from_slice(&p.values);
            rows += p.rows;
        }
        Self::new(rows, values, first.labels.clone(), first.source.clone())
    }

    /// The listed columns, in the listed order.
    pub fn select(&self, labels: &[String]) -> Result<Self> {
        let columns = labels
            .iter()
            .map(|l| self.column_by_label(l).map(|c| (l.clone(), c)).ok_or_else(|| Error::BadLabel(l.clone())))
            .collect::<Result<Vec<_>>>()?;
        Self::from_columns(self.rows, columns, self.source.clone())
    }

    fn map_values(&self, prefix: &str, f: impl Fn(usize, f64) -> f64) -> Self {
        let d = self.dim().max(1);
        Self {
            rows: self.rows,
            values: self.values.iter().enumerate().map(|(k, &x)| f(k % d, x)).collect(),
            labels: self.labels.iter().map(|l| format!("{prefix}{l}")).collect(),
            source: self.source.clone(),
        }
    }
}

/// What a column label says about its column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSpec {
    Count { pattern: String, weights: Weights, transforms: Vec<Transform> },
    RawFeature { channel: usize, transforms: Vec<Transform> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    Log,
    Density,
}

pub fn count_label(pattern: &RootedPattern, weights: Weights) -> String {
    format!("{}:{weights}", pattern.name())
}

pub fn parse_label(label: &str) -> Result<ColumnSpec> {
    let mut rest = label;
    let mut outer = Vec::new();
    loop {
        if let Some(r) = rest.strip_prefix("log:") {
            outer.push(Transform::Log);
            rest = r;
        } else if let Some(r) = rest.strip_prefix("dens:") {
            outer.push(Transform::Density);
            rest = r;
        } else {
            break;
        }
    }
    // Prefixes are written outermost first; apply innermost first.
    let transforms: Vec<Transform> = outer.into_iter().rev().collect();
    if let Some(j) = rest.strip_prefix("rawfeat:") {
        let channel = j.parse().map_err(|_| Error::BadLabel(label.to_string()))?;
        return Ok(ColumnSpec::RawFeature { channel, transforms });
    }
    let (pattern, weights) = rest.rsplit_once(':').ok_or_else(|| Error::BadLabel(label.to_string()))?;
    let weights = weights.parse().map_err(|_| Error::BadLabel(label.to_string()))?;
    if pattern.is_empty() {
        return Err(Error::BadLabel(label.to_string()));
    }
    Ok(ColumnSpec::Count { pattern: pattern.to_string(), weights, transforms })
}

/// Outcome of a deadline-bounded embedding run.
#[derive(Debug, Clone)]
pub struct Embedded {
    pub matrix: EmbeddingMatrix,
    /// At least one column was skipped because the deadline passed.
    pub partial: bool,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EmbedOptions {
    /// Lift the brute-force size guard for general patterns.
    pub force: bool,
    pub deadline: Option<Instant>,
}

/// One block of columns per entry of `channels`, each in family order.
pub fn embed_with(
    g: &FeaturedGraph,
    family: &PatternFamily,
    channels: &[Weights],
    opts: EmbedOptions,
) -> Result<Embedded> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mut columns = Vec::with_capacity(family.len() * channels.len());
    let mut partial = false;
    for &weights in channels {
        let counts = hom::count_family(g, weights, &family.patterns, opts.force, opts.deadline)?;
        for (pattern, col) in family.iter().zip(counts) {
            match col {
                Some(col) => columns.push((count_label(pattern, weights), col)),
                None => partial = true,
            }
        }
    }
    let source = format!("{}|{}|{}", g.name(), family.descriptor(), channel_tag(channels));
    let matrix = EmbeddingMatrix::from_columns(g.node_count(), columns, source)?;
    Ok(Embedded { matrix, partial })
}

fn channel_tag(channels: &[Weights]) -> String {
    channels.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Counts on feature channel 0, one column per family member.
pub fn embed_plain(g: &FeaturedGraph, family: &PatternFamily) -> Result<EmbeddingMatrix> {
    Ok(embed_with(g, family, &[Weights::Channel(0)], EmbedOptions::default())?.matrix)
}

/// Unit-weight counts: the structural embedding, features ignored.
pub fn embed_structural(g: &FeaturedGraph, family: &PatternFamily) -> Result<EmbeddingMatrix> {
    Ok(embed_with(g, family, &[Weights::Unit], EmbedOptions::default())?.matrix)
}

/// Concatenation of the per-channel embeddings of `G_1 .. G_m`.
pub fn embed_tensor(g: &FeaturedGraph, family: &PatternFamily) -> Result<EmbeddingMatrix> {
    let channels: Vec<_> = (0..g.feature_dim()).map(Weights::Channel).collect();
    Ok(embed_with(g, family, &channels, EmbedOptions::default())?.matrix)
}

/// Appends the raw feature columns as `rawfeat:<j>`.
pub fn append_raw_features(e: &EmbeddingMatrix, g: &FeaturedGraph) -> Result<EmbeddingMatrix> {
    if e.rows() != g.node_count() {
        return Err(Error::RowMismatch { got: e.rows(), expected: g.node_count() });
    }
    let columns = (0..g.feature_dim())
        .map(|j| Ok((format!("rawfeat:{j}"), g.channel(j)?)))
        .collect::<Result<Vec<_>>>()?;
    let raw = EmbeddingMatrix::from_columns(g.node_count(), columns, "rawfeat".into())?;
    concat_ensemble(&[e.clone(), raw])
}

/// Column-wise concatenation; labels must stay unique.
pub fn concat_ensemble(parts: &[EmbeddingMatrix]) -> Result<EmbeddingMatrix> {
    let Some(first) = parts.first() else {
        return Ok(EmbeddingMatrix::empty(0));
    };
    let rows = first.rows();
    let mut columns = Vec::new();
    for p in parts {
        if p.rows() != rows {
            return Err(Error::RowMismatch { got: p.rows(), expected: rows });
        }
        for (j, label) in p.labels().iter().enumerate() {
            columns.push((label.clone(), p.column(j)));
        }
    }
    let source = parts
        .iter()
        .map(|p| p.source.as_str())
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join(" + ");
    EmbeddingMatrix::from_columns(rows, columns, source)
}

/// `x -> sign(x)·ln(1 + |x|)`.
pub fn signed_log1p(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().ln_1p()
    }
}

pub fn log_scale(e: &EmbeddingMatrix) -> EmbeddingMatrix {
    e.map_values("log:", |_, x| signed_log1p(x))
}

/// Divides each count column by `|V(G)|^(|V(H)| - 1)`, the number of vertex
/// maps fixing the root. Raw feature columns pass through unchanged.
pub fn density(e: &EmbeddingMatrix, g: &FeaturedGraph, family: &PatternFamily) -> Result<EmbeddingMatrix> {
    density_over(e, g.node_count(), &[family])
}

/// [`density`] for rows stacked from several graphs is not meaningful; this
/// variant takes the graph order directly and any number of families.
pub fn density_over(e: &EmbeddingMatrix, graph_order: usize, families: &[&PatternFamily]) -> Result<EmbeddingMatrix> {
    let n = graph_order as f64;
    let divisors = e
        .labels()
        .iter()
        .map(|label| match parse_label(label)? {
            ColumnSpec::Count { pattern, .. } => {
                let p = families
                    .iter()
                    .find_map(|f| f.get(&pattern))
                    .ok_or_else(|| Error::BadLabel(label.clone()))?;
                Ok(n.powi(p.order() as i32 - 1))
            }
            ColumnSpec::RawFeature { .. } => Ok(1.0),
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut out = e.map_values("", |j, x| x / divisors[j]);
    out.labels = e
        .labels()
        .iter()
        .map(|l| if l.starts_with("rawfeat:") { l.clone() } else { format!("dens:{l}") })
        .collect();
    Ok(out)
}

/// Recomputes one column from its label alone.
pub fn recompute_column(label: &str, g: &FeaturedGraph, families: &[&PatternFamily]) -> Result<Vec<f64>> {
    let (mut col, order, transforms) = match parse_label(label)? {
        ColumnSpec::RawFeature { channel, transforms } => (g.channel(channel)?, 1, transforms),
        ColumnSpec::Count { pattern, weights, transforms } => {
            let family = families
                .iter()
                .find(|f| f.get(&pattern).is_some())
                .ok_or_else(|| Error::BadLabel(label.to_string()))?;
            let j = family.patterns.iter().position(|p| p.name() == pattern).expect("found above");
            let col = hom::count_family(g, weights, &family.patterns, true, None)?
                .swap_remove(j)
                .expect("no deadline");
            (col, family.patterns[j].order(), transforms)
        }
    };
    let divisor = (g.node_count() as f64).powi(order as i32 - 1);
    for t in transforms {
        match t {
            Transform::Log => col.iter_mut().for_each(|x| *x = signed_log1p(*x)),
            Transform::Density => col.iter_mut().for_each(|x| *x /= divisor),
        }
    }
    Ok(col)
}
