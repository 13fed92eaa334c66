use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use homcount_core::embed::{append_raw_features, concat_ensemble, density_over, embed_with, log_scale};
use homcount_core::eval::{stratified_cv, ForestConfig};
use homcount_core::{io, oracle, EmbedOptions, EmbeddingMatrix, FamilySpec, FeaturedGraph, PatternFamily, RootedPattern, SbmSpec, Weights};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::*;
use crate::UsageError;

pub fn execute(cli: &Cli) -> Result<()> {
    let threads = rayon::current_num_threads();
    match &cli.command {
        Command::Patterns(a) => patterns(a, threads),
        Command::Embed(a) => embed(a, threads),
        Command::Oracle(a) => oracle_cmd(a),
        Command::GenSbm(a) => gen_sbm(a, threads),
        Command::Evaluate(a) => evaluate(a, threads),
        Command::Pipeline(a) => pipeline(a, threads),
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

fn write_resolved(dir: &Path, mut config: Value, threads: usize) -> Result<()> {
    config["threads"] = json!(threads);
    config["version"] = json!(env!("CARGO_PKG_VERSION"));
    let path = dir.join("run.resolved.json");
    fs::write(&path, serde_json::to_string_pretty(&config)? + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn parent_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn build_families(specs: &[FamilySpec]) -> Result<Vec<PatternFamily>> {
    specs
        .iter()
        .map(|spec| {
            let t = Instant::now();
            let family = spec.build()?;
            log::info!("family {spec}: {} patterns ({:.1?})", family.len(), t.elapsed());
            Ok(family)
        })
        .collect()
}

fn patterns(a: &PatternsArgs, threads: usize) -> Result<()> {
    let spec = match (&a.family, a.kind, a.max_order) {
        (Some(spec), _, _) => spec.clone(),
        (None, Some(kind), Some(k)) => match kind {
            KindArg::Trees => FamilySpec::Trees(k),
            KindArg::BinaryTrees => FamilySpec::BinaryTrees(k),
            KindArg::Cycles => FamilySpec::Cycles(k),
            KindArg::Paths => FamilySpec::Paths(k),
        },
        _ => return Err(usage("give --family or both --kind and --max-order")),
    };
    let family = &build_families(std::slice::from_ref(&spec))?[0];
    let listing = family.listing();
    match &a.out {
        Some(path) => {
            fs::write(path, listing).with_context(|| format!("writing {}", path.display()))?;
            write_resolved(&parent_dir(path), json!({"command": "patterns", "family": spec.to_string(), "patterns": family.len(), "out": path}), threads)?;
        }
        None => print!("{listing}"),
    }
    Ok(())
}

fn load_graph(input: &GraphInput) -> Result<FeaturedGraph> {
    let edges = io::read_edge_list(&input.graph)?;
    let rows = input.features.as_deref().map(io::read_features).transpose()?;
    let span = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let n = input.nodes.or(rows.as_ref().map(Vec::len)).unwrap_or(span);
    let name = input.graph.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let g = FeaturedGraph::new(n, &edges, rows)
        .with_context(|| format!("loading {}", input.graph.display()))?
        .with_name(name);
    log::info!("graph {}: {} nodes, {} edges, {} feature channels", g.name(), g.node_count(), g.edge_count(), g.feature_dim());
    Ok(g.preprocess_zero_features(input.epsilon)?)
}

fn channels(a: &EmbedArgs, g: &FeaturedGraph) -> Vec<Weights> {
    if a.tensor {
        (0..g.feature_dim()).map(Weights::Channel).collect()
    } else if a.structural {
        vec![Weights::Unit]
    } else {
        vec![Weights::Channel(a.channel.unwrap_or(0))]
    }
}

fn mode(a: &EmbedArgs) -> String {
    if a.tensor {
        "tensor".into()
    } else if a.structural {
        "structural".into()
    } else {
        format!("channel:{}", a.channel.unwrap_or(0))
    }
}

/// Embeds one graph; returns the matrix and the families cut short by the
/// time budget.
fn embed_graph(g: &FeaturedGraph, families: &[PatternFamily], a: &EmbedArgs) -> Result<(EmbeddingMatrix, Vec<String>)> {
    let chans = channels(a, g);
    let mut parts = Vec::with_capacity(families.len());
    let mut partial = Vec::new();
    for family in families {
        let t = Instant::now();
        let opts = EmbedOptions { force: a.force, deadline: a.timeout.map(|s| t + Duration::from_secs_f64(s)) };
        let out = embed_with(g, family, &chans, opts)?;
        log::debug!("{} on {}: {} columns ({:.1?})", family.descriptor(), g.name(), out.matrix.dim(), t.elapsed());
        if out.partial {
            log::warn!("{} on {}: time budget exhausted after {} columns", family.descriptor(), g.name(), out.matrix.dim());
            partial.push(family.descriptor());
        }
        parts.push(out.matrix);
    }
    let mut e = concat_ensemble(&parts)?;
    if a.append_features {
        e = append_raw_features(&e, g)?;
    }
    if a.log {
        e = log_scale(&e);
    } else if a.density {
        let refs: Vec<&PatternFamily> = families.iter().collect();
        e = density_over(&e, g.node_count(), &refs)?;
    }
    Ok((e, partial))
}

fn write_embedding(path: &Path, e: &EmbeddingMatrix, format: Format, node_id: bool) -> Result<()> {
    match format {
        Format::Csv => io::write_embedding_csv(path, e, node_id)?,
        Format::Bin => io::write_embedding_binary(path, e)?,
    }
    log::info!("wrote {} x {} embedding to {}", e.rows(), e.dim(), path.display());
    Ok(())
}

fn embed_config(a: &EmbedArgs) -> Value {
    json!({
        "families": a.families.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "mode": mode(a),
        "log": a.log,
        "density": a.density,
        "append_features": a.append_features,
        "timeout": a.timeout,
        "force": a.force,
    })
}

fn embed(a: &EmbedCmd, threads: usize) -> Result<()> {
    let g = load_graph(&a.input)?;
    let families = build_families(&a.embed.families)?;
    let t = Instant::now();
    let (e, partial) = embed_graph(&g, &families, &a.embed)?;
    log::info!("embedded {} nodes into {} columns ({:.1?})", e.rows(), e.dim(), t.elapsed());
    write_embedding(&a.out, &e, a.format, a.node_id)?;
    let config = json!({
        "command": "embed",
        "graph": a.input.graph,
        "features": a.input.features,
        "nodes": g.node_count(),
        "epsilon": a.input.epsilon,
        "embedding": embed_config(&a.embed),
        "format": format!("{:?}", a.format).to_lowercase(),
        "node_id": a.node_id,
        "out": a.out,
        "partial_families": partial,
    });
    write_resolved(&parent_dir(&a.out), config, threads)
}

fn oracle_cmd(a: &OracleArgs) -> Result<()> {
    let g = load_graph(&a.input)?;
    let pattern = match &a.custom {
        Some(path) => {
            let family = homcount_core::patterns::load_custom_family(path)?;
            family
                .get(&a.pattern)
                .cloned()
                .ok_or_else(|| usage(format!("no pattern `{}` in {}", a.pattern, path.display())))?
        }
        None => RootedPattern::from_name(&a.pattern).map_err(|e| usage(e.to_string()))?,
    };
    let nodes: Vec<usize> = match a.node {
        Some(v) if v >= g.node_count() => return Err(usage(format!("node {v} out of range for {} nodes", g.node_count()))),
        Some(v) => vec![v],
        None => (0..g.node_count()).collect(),
    };
    let mut out = String::new();
    if a.structural || g.is_plain() && a.channel.is_none() {
        for v in nodes {
            out += &format!("{v}\t{}\n", oracle::brute_force_rooted_exact(&g, &pattern, v, a.force)?);
        }
    } else {
        let w = Weights::Channel(a.channel.unwrap_or(0));
        for v in nodes {
            out += &format!("{v}\t{}\n", oracle::brute_force_rooted(&g, w, &pattern, v, a.force)?);
        }
    }
    print!("{out}");
    Ok(())
}

fn sbm_spec(kind: SbmKindArg) -> SbmSpec {
    match kind {
        SbmKindArg::Cluster => SbmSpec::cluster_default(),
        SbmKindArg::Pattern => SbmSpec::pattern_default(),
    }
}

fn gen_sbm(a: &GenSbmArgs, threads: usize) -> Result<()> {
    let mut spec = sbm_spec(a.kind);
    if a.kind == SbmKindArg::Cluster && (a.pattern_p.is_some() || a.pattern_q.is_some()) {
        return Err(usage("--pattern-p/--pattern-q only apply to --kind pattern"));
    }
    spec.num_graphs = a.graphs.unwrap_or(spec.num_graphs);
    spec.nodes = a.nodes.unwrap_or(spec.nodes);
    spec.num_communities = a.communities.unwrap_or(spec.num_communities);
    spec.p_intra = a.p.unwrap_or(spec.p_intra);
    spec.q_inter = a.q.unwrap_or(spec.q_inter);
    spec.seed = a.seed.unwrap_or(spec.seed);
    if let Some(block) = spec.pattern_block.as_mut() {
        block.p = a.pattern_p.unwrap_or(block.p);
        block.q = a.pattern_q.unwrap_or(block.q);
    }
    spec.validate().map_err(|e| usage(e.to_string()))?;
    let t = Instant::now();
    let ds = homcount_core::generate_sbm(&spec)?;
    log::info!("generated {} graphs, {} nodes ({:.1?})", ds.graphs.len(), ds.node_count(), t.elapsed());
    fs::create_dir_all(&a.out)?;
    homcount_core::save_dataset(&ds, &a.out)?;
    write_resolved(&a.out, json!({"command": "gen-sbm", "spec": spec, "out": a.out}), threads)
}

fn forest_config(f: &ForestArgs) -> Result<ForestConfig> {
    if f.trees == 0 {
        return Err(usage("--trees must be at least 1"));
    }
    if f.reps == 0 {
        return Err(usage("--reps must be at least 1"));
    }
    Ok(ForestConfig { num_trees: f.trees, seed: f.seed, ..ForestConfig::default() })
}

fn run_eval(x: &EmbeddingMatrix, y: &[usize], f: &ForestArgs, report: &Path) -> Result<()> {
    let cfg = forest_config(f)?;
    let t = Instant::now();
    let r = stratified_cv(x, y, f.folds, &cfg, f.reps)?;
    log::info!(
        "{}-fold x {}: accuracy {:.4} ± {:.4}, weighted {:.4} ({:.1?})",
        f.folds,
        f.reps,
        r.accuracy_mean,
        r.accuracy_std,
        r.weighted_accuracy_mean,
        t.elapsed()
    );
    let mut top: Vec<_> = r.importances.iter().collect();
    top.sort_by(|a, b| b.1.total_cmp(a.1).then(a.0.cmp(b.0)));
    for (label, score) in top.iter().take(5) {
        log::info!("  importance {label}: {score:.4}");
    }
    fs::write(report, serde_json::to_string_pretty(&r)? + "\n").with_context(|| format!("writing {}", report.display()))?;
    Ok(())
}

fn evaluate(a: &EvaluateArgs, threads: usize) -> Result<()> {
    let parts = a
        .embeddings
        .iter()
        .map(|p| io::read_embedding(p).with_context(|| format!("reading {}", p.display())))
        .collect::<Result<Vec<_>>>()?;
    let x = EmbeddingMatrix::stack(&parts)?;
    let label_sets = a.labels.iter().map(|p| io::read_labels(p)).collect::<homcount_core::Result<Vec<_>>>()?;
    if label_sets.len() == parts.len() {
        for ((e, labels), path) in parts.iter().zip(&label_sets).zip(&a.labels) {
            if labels.len() != e.rows() {
                return Err(homcount_core::Error::RowMismatch { got: labels.len(), expected: e.rows() })
                    .with_context(|| format!("labels in {}", path.display()));
            }
        }
    }
    let y: Vec<usize> = label_sets.concat();
    if y.len() != x.rows() {
        return Err(homcount_core::Error::RowMismatch { got: y.len(), expected: x.rows() }.into());
    }
    run_eval(&x, &y, &a.forest, &a.report)?;
    let config = json!({
        "command": "evaluate",
        "embeddings": a.embeddings,
        "labels": a.labels,
        "folds": a.forest.folds,
        "reps": a.forest.reps,
        "trees": a.forest.trees,
        "seed": a.forest.seed,
        "report": a.report,
    });
    write_resolved(&parent_dir(&a.report), config, threads)
}

fn pipeline(a: &PipelineArgs, threads: usize) -> Result<()> {
    let ds = match (&a.dataset, a.sbm) {
        (Some(dir), _) => homcount_core::load_dataset(dir)?,
        (None, Some(kind)) => {
            let mut spec = sbm_spec(kind);
            spec.num_graphs = a.graphs.unwrap_or(spec.num_graphs);
            spec.seed = a.data_seed.unwrap_or(spec.seed);
            homcount_core::generate_sbm(&spec)?
        }
        (None, None) => return Err(usage("give --dataset or --sbm")),
    };
    log::info!("dataset {}: {} graphs, {} nodes, {} classes", ds.name, ds.graphs.len(), ds.node_count(), ds.classes);
    let families = build_families(&a.embed.families)?;
    let t = Instant::now();
    let embedded = ds
        .graphs
        .par_iter()
        .map(|g| embed_graph(&g.preprocess_zero_features(a.epsilon)?, &families, &a.embed))
        .collect::<Result<Vec<_>>>()?;
    log::info!("embedded {} graphs ({:.1?})", embedded.len(), t.elapsed());

    // A column survives only if every graph finished it.
    let mut partial: Vec<String> = embedded.iter().flat_map(|(_, p)| p.iter().cloned()).collect();
    partial.sort();
    partial.dedup();
    let mut parts: Vec<EmbeddingMatrix> = embedded.into_iter().map(|(e, _)| e).collect();
    if !partial.is_empty() {
        let keep: Vec<String> = parts[0]
            .labels()
            .iter()
            .filter(|l| parts.iter().all(|p| p.labels().contains(l)))
            .cloned()
            .collect();
        parts = parts.iter().map(|p| p.select(&keep)).collect::<homcount_core::Result<_>>()?;
    }
    let x = EmbeddingMatrix::stack(&parts)?;
    let y = ds.stacked_labels();

    fs::create_dir_all(&a.out)?;
    let emb_path = a.out.join(match a.format {
        Format::Csv => "embeddings.csv",
        Format::Bin => "embeddings.bin",
    });
    write_embedding(&emb_path, &x, a.format, a.node_id)?;
    io::write_labels(&a.out.join("labels.txt"), &y)?;
    let report = a.out.join("report.json");
    run_eval(&x, &y, &a.forest, &report)?;

    let spec = ds.spec.as_ref().map(serde_json::to_value).transpose()?;
    let config = json!({
        "command": "pipeline",
        "dataset": a.dataset,
        "sbm": spec,
        "epsilon": a.epsilon,
        "embedding": embed_config(&a.embed),
        "folds": a.forest.folds,
        "reps": a.forest.reps,
        "trees": a.forest.trees,
        "seed": a.forest.seed,
        "format": format!("{:?}", a.format).to_lowercase(),
        "outputs": [emb_path, a.out.join("labels.txt"), report],
        "partial_families": partial,
    });
    write_resolved(&a.out, config, threads)
}
