//! Largest common subtrees and smallest common supertrees: exhaustive search
//! for small trees, and linear conversions between the two given witnesses.

use std::sync::Arc;

use thiserror::Error;

use crate::canon::unlabelled_trees;
use crate::embedding::{
    first_embedding, for_each_embedding, Embedding, EmbeddingError, EmbeddingKind,
};
use crate::pullback::{CospanResult, PullbackError};
use crate::pushout::{sum_with, PushoutError, SpanResult};
use crate::tree::{NodeId, RootedTree};
use crate::Checks;

pub const DEFAULT_MAX_NODES: usize = 8;

/// Ordering used to pick among optimal answers. Only one policy exists:
/// least canonical encoding of the shape, then least witness maps in
/// lexicographic order of their image sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    CanonicalThenLexicographic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveConfig {
    pub kind: EmbeddingKind,
    pub max_nodes: usize,
    pub checks: Checks,
    pub tie_break: TieBreak,
}

impl SolveConfig {
    pub fn new(kind: EmbeddingKind) -> Self {
        SolveConfig {
            kind,
            max_nodes: DEFAULT_MAX_NODES,
            checks: Checks::Off,
            tie_break: TieBreak::default(),
        }
    }

    pub fn with_max_nodes(mut self, max_nodes: usize) -> Self {
        self.max_nodes = max_nodes;
        self
    }

    pub fn with_checks(mut self, checks: Checks) -> Self {
        self.checks = checks;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("input of size {size} exceeds the search bound {bound}")]
    BoundExceeded { size: usize, bound: usize },
    #[error("cospan apex is not a smallest common supertree: {0}")]
    NotSmallestSupertree(String),
    #[error("span apex is not a largest common subtree: {0}")]
    NotLargestSubtree(String),
    #[error(transparent)]
    Pushout(#[from] PushoutError),
    #[error(transparent)]
    Pullback(#[from] PullbackError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

fn embed(s: &Arc<RootedTree>, t: &Arc<RootedTree>, kind: EmbeddingKind) -> Option<Embedding> {
    let map = first_embedding(s, t, kind)?;
    Some(Embedding::new(s.clone(), t.clone(), map, kind).expect("search only yields embeddings"))
}

/// Cheap necessary conditions for `small` to embed into `big` at `kind`.
fn may_embed(small: &RootedTree, big: &RootedTree, kind: EmbeddingKind) -> bool {
    small.len() <= big.len()
        && small.height() <= big.height()
        && small.leaf_count() <= big.leaf_count()
        && (kind == EmbeddingKind::Minor || small.max_out_degree() <= big.max_out_degree())
}

/// A largest tree embedding into both inputs, with the least witnesses.
pub fn lcst_bruteforce(
    t1: &Arc<RootedTree>,
    t2: &Arc<RootedTree>,
    cfg: &SolveConfig,
) -> Result<SpanResult, SolveError> {
    let limit = t1.len().min(t2.len());
    if limit > cfg.max_nodes {
        return Err(SolveError::BoundExceeded {
            size: limit,
            bound: cfg.max_nodes,
        });
    }
    for size in (0..=limit).rev() {
        let mut fallback = None;
        for shape in unlabelled_trees(size).iter() {
            if !may_embed(shape, t1, cfg.kind) || !may_embed(shape, t2, cfg.kind) {
                continue;
            }
            let Some(m1) = embed(shape, t1, cfg.kind) else {
                continue;
            };
            let Some(m2) = embed(shape, t2, cfg.kind) else {
                continue;
            };
            if fallback.is_none() {
                fallback = Some(SpanResult::new(m1, m2)?);
            }
            if let Some(span) = summable_witnesses(shape, t1, t2, cfg.kind)? {
                return Ok(span);
            }
        }
        if let Some(span) = fallback.take() {
            return Ok(span);
        }
    }
    Err(SolveError::Internal(
        "the empty tree embeds everywhere".into(),
    ))
}

/// Total length of the paths the arcs of `s` are sent to.
fn stretch(s: &RootedTree, t: &RootedTree, map: &[NodeId]) -> usize {
    s.arcs()
        .map(|(a, b)| t.depth(map[b.index()]) - t.depth(map[a.index()]))
        .sum()
}

/// Witness pair of `shape` in `t1`, `t2` whose sum is a tree. For the
/// stronger kinds this is the least pair. Minor witnesses may send two arcs
/// through a shared unmatched node, and then the sum depends on them: pairs
/// are tried by least total stretch, then lexicographically.
fn summable_witnesses(
    shape: &Arc<RootedTree>,
    t1: &Arc<RootedTree>,
    t2: &Arc<RootedTree>,
    kind: EmbeddingKind,
) -> Result<Option<SpanResult>, SolveError> {
    let all = |t: &Arc<RootedTree>| {
        let mut found = Vec::new();
        for_each_embedding(shape, t, kind, |m| {
            found.push((stretch(shape, t, m), m.to_vec()));
            kind == EmbeddingKind::Minor
        });
        found
    };
    let (lefts, rights) = (all(t1), all(t2));
    let mut pairs: Vec<(usize, usize, usize)> = (0..lefts.len())
        .flat_map(|i| (0..rights.len()).map(move |j| (i, j)))
        .map(|(i, j)| (lefts[i].0 + rights[j].0, i, j))
        .collect();
    pairs.sort_unstable();
    for (_, i, j) in pairs {
        let left = Embedding::new(shape.clone(), t1.clone(), lefts[i].1.clone(), kind)?;
        let right = Embedding::new(shape.clone(), t2.clone(), rights[j].1.clone(), kind)?;
        let span = SpanResult::new(left, right)?;
        if sum_with(&span, Checks::Off).is_ok() {
            return Ok(Some(span));
        }
    }
    Ok(None)
}

/// Size of a largest common subtree.
pub fn lcst_size(
    t1: &Arc<RootedTree>,
    t2: &Arc<RootedTree>,
    cfg: &SolveConfig,
) -> Result<usize, SolveError> {
    Ok(lcst_bruteforce(t1, t2, cfg)?.apex.len())
}

/// A smallest tree into which both inputs embed: least shape with least
/// witnesses, or for minor embeddings a sum of largest common subtrees.
pub fn scst_bruteforce(
    t1: &Arc<RootedTree>,
    t2: &Arc<RootedTree>,
    cfg: &SolveConfig,
) -> Result<CospanResult, SolveError> {
    let total = t1.len() + t2.len();
    if total > 2 * cfg.max_nodes {
        return Err(SolveError::BoundExceeded {
            size: total,
            bound: 2 * cfg.max_nodes,
        });
    }
    if t1.is_empty() {
        let c = CospanResult::new(
            Embedding::from_empty(t2.clone(), cfg.kind),
            Embedding::identity(t2.clone(), cfg.kind),
        )?;
        return Ok(c);
    }
    if t2.is_empty() {
        let c = CospanResult::new(
            Embedding::identity(t1.clone(), cfg.kind),
            Embedding::from_empty(t1.clone(), cfg.kind),
        )?;
        return Ok(c);
    }
    let lower = if cfg.checks == Checks::Full {
        Some(total - lcst_size(t1, t2, &cfg.with_max_nodes(usize::MAX))?)
    } else {
        None
    };
    for size in t1.len().max(t2.len())..=total {
        for shape in unlabelled_trees(size).iter() {
            if !may_embed(t1, shape, cfg.kind) || !may_embed(t2, shape, cfg.kind) {
                continue;
            }
            let Some(f1) = embed(t1, shape, cfg.kind) else {
                continue;
            };
            let Some(f2) = embed(t2, shape, cfg.kind) else {
                continue;
            };
            if let Some(lower) = lower {
                if size < lower {
                    return Err(SolveError::Internal(format!(
                        "common supertree of size {size} is below the bound {lower}"
                    )));
                }
            }
            let found = CospanResult::new(f1, f2)?;
            if cfg.kind == EmbeddingKind::Minor {
                return sum_form_supertree(t1, t2, cfg, found);
            }
            return Ok(found);
        }
    }
    Err(SolveError::Internal(
        "no common supertree up to the size of the disjoint sum".into(),
    ))
}

/// Minor supertrees may route several arcs through shared nodes, and such a
/// supertree is not the sum of its own common part. Among the smallest ones,
/// prefer the sum of the least-stretch largest common subtree.
fn sum_form_supertree(
    t1: &Arc<RootedTree>,
    t2: &Arc<RootedTree>,
    cfg: &SolveConfig,
    found: CospanResult,
) -> Result<CospanResult, SolveError> {
    let span = lcst_bruteforce(t1, t2, &cfg.with_max_nodes(usize::MAX))?;
    match sum_with(&span, Checks::Off) {
        Ok(sigma) if sigma.tree.len() == found.apex.len() => Ok(sigma.cospan()),
        _ => Ok(found),
    }
}

pub fn scst_size(
    t1: &Arc<RootedTree>,
    t2: &Arc<RootedTree>,
    cfg: &SolveConfig,
) -> Result<usize, SolveError> {
    Ok(scst_bruteforce(t1, t2, cfg)?.apex.len())
}

/// The sum of a largest-common-subtree span: a smallest common supertree.
pub fn sub_to_super(s: &SpanResult) -> Result<CospanResult, SolveError> {
    sub_to_super_with(s, Checks::Off, DEFAULT_MAX_NODES)
}

/// As [`sub_to_super`]; with full checks and inputs within `max_nodes`, the
/// apex is first confirmed to be largest by exhaustive search.
pub fn sub_to_super_with(
    s: &SpanResult,
    checks: Checks,
    max_nodes: usize,
) -> Result<CospanResult, SolveError> {
    let (t1, t2) = (s.left.target(), s.right.target());
    if checks == Checks::Full && t1.len().min(t2.len()) <= max_nodes {
        let cfg = SolveConfig::new(s.kind()).with_max_nodes(max_nodes);
        let best = lcst_size(t1, t2, &cfg)?;
        if best != s.apex.len() {
            return Err(SolveError::NotLargestSubtree(format!(
                "apex has {} nodes, a common subtree with {best} exists",
                s.apex.len()
            )));
        }
    }
    Ok(sum_with(s, checks)?.cospan())
}

/// The common part of a smallest-common-supertree cospan: a largest common
/// subtree. Marks the nodes hit by both legs and splices out all others.
pub fn super_to_sub(c: &CospanResult) -> Result<SpanResult, SolveError> {
    super_to_sub_with(c, Checks::Off, DEFAULT_MAX_NODES)
}

pub fn super_to_sub_with(
    c: &CospanResult,
    checks: Checks,
    max_nodes: usize,
) -> Result<SpanResult, SolveError> {
    let (t1, t2) = (c.left.source(), c.right.source());
    let kind = c.left.kind();
    if c.right.kind() != kind {
        return Err(PullbackError::KindMismatch(kind, c.right.kind()).into());
    }
    if checks == Checks::Full && t1.len() + t2.len() <= 2 * max_nodes {
        let cfg = SolveConfig::new(kind).with_max_nodes(max_nodes);
        let best = scst_size(t1, t2, &cfg)?;
        if best != c.apex.len() {
            return Err(SolveError::NotSmallestSupertree(format!(
                "apex has {} nodes, a common supertree with {best} exists",
                c.apex.len()
            )));
        }
    }
    let t = &c.apex;
    let n = t.len();
    // 0 = unmarked, 1 = hit by the left leg, 2 = hit by both
    let mut mark = vec![0u8; n];
    let mut from1 = vec![NodeId(0); n];
    let mut from2 = vec![NodeId(0); n];
    for v in t1.nodes() {
        let x = c.left.apply(v);
        mark[x.index()] = 1;
        from1[x.index()] = v;
    }
    for w in t2.nodes() {
        let x = c.right.apply(w);
        if mark[x.index()] == 1 {
            mark[x.index()] = 2;
            from2[x.index()] = w;
        }
    }
    // splicing a node out hands its children to its parent, so every kept
    // node ends up under its nearest kept ancestor
    let mut slot = vec![usize::MAX; n];
    let mut kept_above = vec![usize::MAX; n];
    let mut labels = Vec::new();
    let mut parents: Vec<Option<usize>> = Vec::new();
    let mut to1 = Vec::new();
    let mut to2 = Vec::new();
    for &v in t.preorder() {
        let above = t.parent(v).map_or(usize::MAX, |p| kept_above[p.index()]);
        if mark[v.index()] == 2 {
            slot[v.index()] = labels.len();
            labels.push(t1.label(from1[v.index()]).to_owned());
            parents.push((above != usize::MAX).then_some(above));
            to1.push(from1[v.index()]);
            to2.push(from2[v.index()]);
            kept_above[v.index()] = slot[v.index()];
        } else {
            kept_above[v.index()] = above;
        }
    }
    let (apex, ids) = RootedTree::from_parent_table_ranked(labels, &parents)
        .map_err(|e| SolveError::NotSmallestSupertree(e.to_string()))?;
    let apex = Arc::new(apex);
    let mut m1 = vec![NodeId(0); apex.len()];
    let mut m2 = vec![NodeId(0); apex.len()];
    for (i, id) in ids.iter().enumerate() {
        m1[id.index()] = to1[i];
        m2[id.index()] = to2[i];
    }
    let left = Embedding::new(apex.clone(), t1.clone(), m1, kind)?;
    let right = Embedding::new(apex, t2.clone(), m2, kind)?;
    Ok(SpanResult::new(left, right)?)
}
