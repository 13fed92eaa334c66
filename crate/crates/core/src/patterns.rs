//! Left-hand pattern families: rooted trees, full binary trees, cycles,
//! paths, and user-supplied patterns.
//!
//! Tree-shaped patterns are stored in canonical form: vertices are numbered
//! in preorder of the canonical rooted tree, so the root is vertex 0 and the
//! level sequence (depth of each vertex in preorder) is the canonical code.
//! Children are ordered so that the level sequence is lexicographically
//! maximal; two rooted trees are isomorphic iff their codes agree.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Orders above this are allowed for trees but logged as expensive.
pub const TREE_ORDER_SOFT_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyKind {
    Trees,
    BinaryTrees,
    Cycles,
    Paths,
    Custom,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::Trees => "trees",
            FamilyKind::BinaryTrees => "binary_trees",
            FamilyKind::Cycles => "cycles",
            FamilyKind::Paths => "paths",
            FamilyKind::Custom => "custom",
        })
    }
}

/// How the counting engine can treat a pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// Path on `k` vertices rooted at an endpoint.
    Path(usize),
    /// Any other tree.
    Tree,
    /// Cycle on `k` vertices.
    Cycle(usize),
    /// Needs brute force.
    General,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedPattern {
    name: String,
    order: usize,
    root: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    shape: Shape,
    /// Canonical level sequence for trees, empty otherwise.
    code: Vec<u8>,
}

impl RootedPattern {
    /// Builds and validates a pattern: simple, connected, root in range.
    pub fn new(name: impl Into<String>, order: usize, root: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let name = name.into();
        if order == 0 {
            return Err(Error::InvalidOrder(format!("pattern `{name}` has no vertices")));
        }
        if root >= order {
            return Err(Error::BadRoot { name, root, order });
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= order || v >= order {
                return Err(Error::EndpointOutOfRange { u, v, n: order });
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
        let mut neighbors = vec![Vec::new(); order];
        for &(u, v) in &normalized {
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        if bfs_order(&neighbors, root).len() != order {
            return Err(Error::DisconnectedPattern(name));
        }
        let shape = classify(&neighbors, normalized.len(), root);
        let code = match shape {
            Shape::Path(_) | Shape::Tree => canonical_levels(&neighbors, root),
            _ => Vec::new(),
        };
        Ok(Self { name, order, root, edges: normalized, neighbors, shape, code })
    }

    /// Rooted tree from a level sequence (preorder depths, starting at 0).
    pub fn from_levels(name: impl Into<String>, levels: &[u8]) -> Result<Self> {
        let name = name.into();
        if levels.first() != Some(&0) || levels[1..].contains(&0) {
            return Err(Error::InvalidInput(format!("`{name}`: level sequence must start with its only 0")));
        }
        let mut stack: Vec<usize> = Vec::new();
        let mut edges = Vec::with_capacity(levels.len().saturating_sub(1));
        for (i, &depth) in levels.iter().enumerate() {
            let depth = depth as usize;
            if depth > stack.len() {
                return Err(Error::InvalidInput(format!("`{name}`: level sequence skips a level")));
            }
            stack.truncate(depth);
            if let Some(&parent) = stack.last() {
                edges.push((parent, i));
            }
            stack.push(i);
        }
        Self::new(name, levels.len(), 0, &edges)
    }

    pub fn cycle(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidOrder(format!("cycles need at least 3 vertices, got {k}")));
        }
        let edges: Vec<_> = (0..k).map(|i| (i, (i + 1) % k)).collect();
        Self::new(format!("C{k}"), k, 0, &edges)
    }

    pub fn path(k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidOrder("paths need at least 1 vertex".into()));
        }
        let edges: Vec<_> = (1..k).map(|i| (i - 1, i)).collect();
        Self::new(format!("P{k}"), k, 0, &edges)
    }

    /// Rebuilds a family member from its canonical name: `C5`, `P4`,
    /// `tree6:012211` or `btree5:01221`.
    pub fn from_name(name: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("`{name}` is not a canonical pattern name"));
        if let Some((head, levels)) = name.split_once(':') {
            let order: usize = head
                .strip_prefix("btree")
                .or_else(|| head.strip_prefix("tree"))
                .and_then(|k| k.parse().ok())
                .ok_or_else(bad)?;
            let levels = levels
                .chars()
                .map(|c| c.to_digit(36).map(|d| d as u8))
                .collect::<Option<Vec<u8>>>()
                .ok_or_else(bad)?;
            if levels.len() != order {
                return Err(bad());
            }
            return Self::from_levels(name, &levels);
        }
        let k = name.get(1..).and_then(|k| k.parse().ok()).ok_or_else(bad)?;
        match name.as_bytes()[0] {
            b'C' => Self::cycle(k),
            b'P' => Self::path(k),
            _ => Err(bad()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.neighbors[x]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors[u].binary_search(&v).is_ok()
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn is_tree(&self) -> bool {
        matches!(self.shape, Shape::Tree | Shape::Path(_))
    }

    /// Canonical level sequence; empty for non-trees.
    pub fn code(&self) -> &[u8] {
        &self.code
    }

    /// Vertices in breadth-first order from the root, neighbors ascending.
    pub fn bfs_order(&self) -> Vec<usize> {
        bfs_order(&self.neighbors, self.root)
    }

    /// `(vertex, parent)` for every non-root vertex in depth-first
    /// post-order from the root, children visited in ascending index.
    pub fn postorder_edges(&self) -> Result<Vec<(usize, usize)>> {
        if !self.is_tree() {
            return Err(Error::NotATree(self.name.clone()));
        }
        let mut out = Vec::with_capacity(self.order - 1);
        // (vertex, parent, next child position)
        let mut stack = vec![(self.root, usize::MAX, 0usize)];
        while let Some(top) = stack.last_mut() {
            let (x, parent, pos) = *top;
            let next = self.neighbors[x][pos..].iter().position(|&y| y != parent);
            match next {
                Some(offset) => {
                    top.2 = pos + offset + 1;
                    let child = self.neighbors[x][pos + offset];
                    stack.push((child, x, 0));
                }
                None => {
                    stack.pop();
                    if parent != usize::MAX {
                        out.push((x, parent));
                    }
                }
            }
        }
        Ok(out)
    }

    fn sort_key(&self) -> (usize, &[u8]) {
        (self.order, &self.code)
    }
}

fn bfs_order(neighbors: &[Vec<usize>], root: usize) -> Vec<usize> {
    let mut seen = vec![false; neighbors.len()];
    let mut order = Vec::with_capacity(neighbors.len());
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(x) = queue.pop_front() {
        order.push(x);
        for &y in &neighbors[x] {
            if !std::mem::replace(&mut seen[y], true) {
                queue.push_back(y);
            }
        }
    }
    order
}

/// Assumes `neighbors` is connected.
fn classify(neighbors: &[Vec<usize>], edge_count: usize, root: usize) -> Shape {
    let k = neighbors.len();
    if edge_count + 1 == k {
        let max_degree = neighbors.iter().map(Vec::len).max().unwrap_or(0);
        if max_degree <= 2 && neighbors[root].len() <= 1 {
            Shape::Path(k)
        } else {
            Shape::Tree
        }
    } else if edge_count == k && k >= 3 && neighbors.iter().all(|n| n.len() == 2) {
        Shape::Cycle(k)
    } else {
        Shape::General
    }
}

/// Lexicographically maximal level sequence of the tree rooted at `root`.
pub(crate) fn canonical_levels(neighbors: &[Vec<usize>], root: usize) -> Vec<u8> {
    fn code(neighbors: &[Vec<usize>], x: usize, parent: usize, depth: u8) -> Vec<u8> {
        let mut parts: Vec<Vec<u8>> = neighbors[x]
            .iter()
            .filter(|&&y| y != parent)
            .map(|&y| code(neighbors, y, x, depth + 1))
            .collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let mut out = Vec::with_capacity(1 + parts.iter().map(Vec::len).sum::<usize>());
        out.push(depth);
        parts.into_iter().for_each(|p| out.extend(p));
        out
    }
    code(neighbors, root, usize::MAX, 0)
}

/// Centroids of a tree, ascending.
fn centroids(neighbors: &[Vec<usize>]) -> Vec<usize> {
    let n = neighbors.len();
    let order = bfs_order(neighbors, 0);
    let mut parent = vec![usize::MAX; n];
    for &x in &order {
        for &y in &neighbors[x] {
            if y != parent[x] {
                parent[y] = x;
            }
        }
    }
    let mut size = vec![1usize; n];
    for &x in order.iter().rev() {
        if parent[x] != usize::MAX {
            size[parent[x]] += size[x];
        }
    }
    (0..n)
        .filter(|&x| {
            let largest = neighbors[x]
                .iter()
                .map(|&y| if y == parent[x] { n - size[x] } else { size[y] })
                .max()
                .unwrap_or(0);
            2 * largest <= n
        })
        .collect()
}

/// Canonical code of a free tree: the maximal centroid-rooted level sequence.
pub(crate) fn free_tree_code(neighbors: &[Vec<usize>]) -> Vec<u8> {
    centroids(neighbors)
        .into_iter()
        .map(|c| canonical_levels(neighbors, c))
        .max()
        .unwrap_or_default()
}

fn levels_to_neighbors(levels: &[u8]) -> Vec<Vec<usize>> {
    let mut neighbors = vec![Vec::new(); levels.len()];
    let mut stack: Vec<usize> = Vec::new();
    for (i, &depth) in levels.iter().enumerate() {
        stack.truncate(depth as usize);
        if let Some(&p) = stack.last() {
            neighbors[p].push(i);
            neighbors[i].push(p);
        }
        stack.push(i);
    }
    neighbors
}

fn levels_to_string(levels: &[u8]) -> String {
    levels
        .iter()
        .map(|&l| char::from_digit(u32::from(l), 36).expect("tree depth below 36"))
        .collect()
}

/// Rooted-isomorphism test by backtracking; intended for small patterns.
pub fn rooted_isomorphic(a: &RootedPattern, b: &RootedPattern) -> bool {
    if a.order != b.order || a.edges.len() != b.edges.len() {
        return false;
    }
    let mut da: Vec<_> = a.neighbors.iter().map(Vec::len).collect();
    let mut db: Vec<_> = b.neighbors.iter().map(Vec::len).collect();
    if a.neighbors[a.root].len() != b.neighbors[b.root].len() {
        return false;
    }
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return false;
    }

    fn extend(a: &RootedPattern, b: &RootedPattern, order: &[usize], map: &mut [usize], used: &mut [bool], i: usize) -> bool {
        if i == order.len() {
            return true;
        }
        let x = order[i];
        for y in 0..b.order {
            if used[y] || a.neighbors[x].len() != b.neighbors[y].len() {
                continue;
            }
            let consistent = order[..i]
                .iter()
                .all(|&z| a.has_edge(x, z) == b.has_edge(y, map[z]));
            if consistent {
                map[x] = y;
                used[y] = true;
                if extend(a, b, order, map, used, i + 1) {
                    return true;
                }
                used[y] = false;
            }
        }
        false
    }

    let order = a.bfs_order();
    let mut map = vec![usize::MAX; a.order];
    let mut used = vec![false; b.order];
    map[a.root] = b.root;
    used[b.root] = true;
    extend(a, b, &order, &mut map, &mut used, 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternFamily {
    pub kind: FamilyKind,
    pub max_order: usize,
    pub patterns: Vec<RootedPattern>,
}

impl PatternFamily {
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, RootedPattern> {
        self.patterns.iter()
    }

    pub fn get(&self, name: &str) -> Option<&RootedPattern> {
        self.patterns.iter().find(|p| p.name == name)
    }

    pub fn descriptor(&self) -> String {
        format!("{}:{}", self.kind, self.max_order)
    }

    /// Text listing in the custom-family file format, so any listing can be
    /// fed back through [`parse_custom_family`].
    pub fn listing(&self) -> String {
        let mut out = String::new();
        for (i, p) in self.patterns.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let edges: Vec<String> = p.edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
            out.push_str(&format!("{}\nroot {}\nedges {}\n", p.name, p.root, edges.join(",")));
        }
        out
    }
}

impl<'a> IntoIterator for &'a PatternFamily {
    type Item = &'a RootedPattern;
    type IntoIter = std::slice::Iter<'a, RootedPattern>;

    fn into_iter(self) -> Self::IntoIter {
        self.patterns.iter()
    }
}

/// All rooted trees with `k` vertices, as canonical level sequences.
fn rooted_trees_by_order(max_order: usize) -> Vec<BTreeSet<Vec<u8>>> {
    let mut by_order = vec![BTreeSet::new(); max_order + 1];
    if max_order >= 1 {
        by_order[1].insert(vec![0u8]);
    }
    for k in 2..=max_order {
        let mut next = BTreeSet::new();
        for levels in &by_order[k - 1] {
            let base = levels_to_neighbors(levels);
            for attach in 0..base.len() {
                let mut grown = base.clone();
                grown.push(vec![attach]);
                grown[attach].push(k - 1);
                next.insert(canonical_levels(&grown, 0));
            }
        }
        by_order[k] = next;
    }
    by_order
}

/// One pattern per free tree of order `<= max_order`, rooted at its
/// canonical centroid.
pub fn enumerate_trees(max_order: usize) -> Result<PatternFamily> {
    if max_order < 1 {
        return Err(Error::InvalidOrder(format!("tree order must be at least 1, got {max_order}")));
    }
    if max_order > TREE_ORDER_SOFT_CAP {
        log::warn!("enumerating trees up to order {max_order}; family size grows exponentially");
    }
    let rooted = rooted_trees_by_order(max_order);
    let mut patterns = Vec::new();
    for (k, trees) in rooted.iter().enumerate().skip(1) {
        let free: BTreeSet<Vec<u8>> = trees.iter().map(|l| free_tree_code(&levels_to_neighbors(l))).collect();
        for levels in free {
            patterns.push(RootedPattern::from_levels(format!("tree{k}:{}", levels_to_string(&levels)), &levels)?);
        }
    }
    patterns.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(PatternFamily { kind: FamilyKind::Trees, max_order, patterns })
}

/// Full binary trees (every internal vertex has two children) with at most
/// `max_order` vertices, rooted at their root. Children are unordered.
pub fn enumerate_binary_trees(max_order: usize) -> Result<PatternFamily> {
    if max_order < 1 {
        return Err(Error::InvalidOrder(format!("binary tree order must be at least 1, got {max_order}")));
    }
    // by_order[k]: canonical level sequences of full binary trees on k vertices.
    let mut by_order: Vec<BTreeSet<Vec<u8>>> = vec![BTreeSet::new(); max_order + 1];
    by_order[1].insert(vec![0]);
    for k in (3..=max_order).step_by(2) {
        let mut shapes = BTreeSet::new();
        for left in (1..k - 1).step_by(2) {
            let right = k - 1 - left;
            if left > right {
                break;
            }
            for l in &by_order[left] {
                for r in &by_order[right] {
                    let mut levels = Vec::with_capacity(k);
                    levels.push(0);
                    levels.extend(l.iter().map(|d| d + 1));
                    levels.extend(r.iter().map(|d| d + 1));
                    shapes.insert(canonical_levels(&levels_to_neighbors(&levels), 0));
                }
            }
        }
        by_order[k] = shapes;
    }
    let mut patterns = Vec::new();
    for (k, shapes) in by_order.iter().enumerate() {
        for levels in shapes {
            patterns.push(RootedPattern::from_levels(format!("btree{k}:{}", levels_to_string(levels)), levels)?);
        }
    }
    patterns.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(PatternFamily { kind: FamilyKind::BinaryTrees, max_order, patterns })
}

/// `C3 ..= C_max_order`, rooted at vertex 0.
pub fn enumerate_cycles(max_order: usize) -> Result<PatternFamily> {
    if max_order < 3 {
        return Err(Error::InvalidOrder(format!("cycle order must be at least 3, got {max_order}")));
    }
    let patterns = (3..=max_order).map(RootedPattern::cycle).collect::<Result<_>>()?;
    Ok(PatternFamily { kind: FamilyKind::Cycles, max_order, patterns })
}

/// `P1 ..= P_max_order`, rooted at an endpoint.
pub fn enumerate_paths(max_order: usize) -> Result<PatternFamily> {
    if max_order < 1 {
        return Err(Error::InvalidOrder(format!("path order must be at least 1, got {max_order}")));
    }
    let patterns = (1..=max_order).map(RootedPattern::path).collect::<Result<_>>()?;
    Ok(PatternFamily { kind: FamilyKind::Paths, max_order, patterns })
}

/// Parses a custom family:
///
/// ```text
/// # triangle
/// C3
/// root 0
/// edges 0-1,1-2,2-0
/// ```
///
/// Each block is a name line followed by `root <i>` and `edges u-v,...`.
pub fn parse_custom_family(text: &str, source: &str) -> Result<PatternFamily> {
    struct Block {
        name: String,
        line: usize,
        root: Option<usize>,
        edges: Option<Vec<(usize, usize)>>,
    }

    let mut blocks: Vec<Block> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = i + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("root") {
            let block = blocks.last_mut().ok_or_else(|| Error::parse(source, lineno, "`root` before a pattern name"))?;
            let root = rest.trim().parse().map_err(|_| Error::parse(source, lineno, "bad root index"))?;
            block.root = Some(root);
        } else if let Some(rest) = line.strip_prefix("edges") {
            let block = blocks.last_mut().ok_or_else(|| Error::parse(source, lineno, "`edges` before a pattern name"))?;
            let mut edges = Vec::new();
            for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (u, v) = item
                    .split_once('-')
                    .ok_or_else(|| Error::parse(source, lineno, format!("bad edge `{item}`")))?;
                let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| Error::parse(source, lineno, format!("bad edge `{item}`")));
                edges.push((parse(u)?, parse(v)?));
            }
            block.edges = Some(edges);
        } else {
            blocks.push(Block { name: line.to_string(), line: lineno, root: None, edges: None });
        }
    }
    if blocks.is_empty() {
        return Err(Error::EmptyFamily);
    }

    let mut patterns: Vec<RootedPattern> = Vec::with_capacity(blocks.len());
    for block in blocks {
        let root = block.root.ok_or_else(|| Error::parse(source, block.line, format!("pattern `{}` has no root", block.name)))?;
        let edges = block.edges.unwrap_or_default();
        let order = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(1);
        if root >= order {
            return Err(Error::BadRoot { name: block.name, root, order });
        }
        let pattern = RootedPattern::new(block.name, order, root, &edges)?;
        if let Some(prev) = patterns.iter().find(|p| p.name == pattern.name || rooted_isomorphic(p, &pattern)) {
            return Err(Error::DuplicatePattern(pattern.name, prev.name.clone()));
        }
        patterns.push(pattern);
    }
    let max_order = patterns.iter().map(RootedPattern::order).max().unwrap_or(0);
    Ok(PatternFamily { kind: FamilyKind::Custom, max_order, patterns })
}

/// A family named on the command line: `trees:12`, `binary_trees:7`,
/// `cycles:10`, `paths:10` or `custom:FILE`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    Trees(usize),
    BinaryTrees(usize),
    Cycles(usize),
    Paths(usize),
    Custom(PathBuf),
}

impl FamilySpec {
    pub fn build(&self) -> Result<PatternFamily> {
        match self {
            FamilySpec::Trees(k) => enumerate_trees(*k),
            FamilySpec::BinaryTrees(k) => enumerate_binary_trees(*k),
            FamilySpec::Cycles(k) => enumerate_cycles(*k),
            FamilySpec::Paths(k) => enumerate_paths(*k),
            FamilySpec::Custom(path) => load_custom_family(path),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Trees(k) => write!(f, "trees:{k}"),
            FamilySpec::BinaryTrees(k) => write!(f, "binary_trees:{k}"),
            FamilySpec::Cycles(k) => write!(f, "cycles:{k}"),
            FamilySpec::Paths(k) => write!(f, "paths:{k}"),
            FamilySpec::Custom(p) => write!(f, "custom:{}", p.display()),
        }
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidInput(format!("family `{s}` is not of the form kind:arg")))?;
        if kind == "custom" {
            return Ok(FamilySpec::Custom(PathBuf::from(arg)));
        }
        let k: usize = arg
            .parse()
            .map_err(|_| Error::InvalidInput(format!("family `{s}`: bad order `{arg}`")))?;
        match kind {
            "trees" => Ok(FamilySpec::Trees(k)),
            "binary_trees" | "btrees" => Ok(FamilySpec::BinaryTrees(k)),
            "cycles" => Ok(FamilySpec::Cycles(k)),
            "paths" => Ok(FamilySpec::Paths(k)),
            _ => Err(Error::InvalidInput(format!("unknown family kind `{kind}`"))),
        }
    }
}

pub fn load_custom_family(path: &Path) -> Result<PatternFamily> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let text = std::fs::read_to_string(path)?;
    parse_custom_family(&text, &path.display().to_string())
}
