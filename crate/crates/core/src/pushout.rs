//! Join of two trees along a common subtree and its pruning into a tree.
//!
//! The join identifies the two images of every node of the common subtree;
//! arcs of both trees are kept as a set. An arc `(v, w)` of the join is
//! subsumed when another path `v ⇝ w` exists; removing all subsumed arcs
//! gives the sum, which is a tree whenever the common subtree is largest.

use std::collections::BTreeSet;

use rustc_hash::FxHashSet;
use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

use crate::embedding::{Embedding, EmbeddingError, EmbeddingKind};
use crate::pullback::CospanResult;
use crate::tree::{NodeId, RootedTree};
use crate::Checks;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PushoutError {
    #[error("invalid span: {0}")]
    InvalidSpan(String),
    #[error("embedding kinds differ: {0} vs {1}")]
    KindMismatch(EmbeddingKind, EmbeddingKind),
    #[error("the pruned join is not a tree ({0}); the common subtree is not largest")]
    NotATreeAfterPruning(String),
    #[error("leg of the sum is not an embedding: {0}")]
    LegNotEmbedding(String),
    #[error("probe does not commute with the span")]
    NonCommutingProbe,
    #[error("mediating map is not an embedding: {0}")]
    InternalVerificationFailure(String),
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

/// A common subtree with embeddings into both trees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanResult {
    pub apex: Arc<RootedTree>,
    pub left: Embedding,
    pub right: Embedding,
}

impl SpanResult {
    pub fn new(left: Embedding, right: Embedding) -> Result<Self, PushoutError> {
        if left.kind() != right.kind() {
            return Err(PushoutError::KindMismatch(left.kind(), right.kind()));
        }
        if **left.source() != **right.source() {
            return Err(PushoutError::InvalidSpan(
                "the two embeddings have different sources".into(),
            ));
        }
        Ok(SpanResult {
            apex: left.source().clone(),
            left,
            right,
        })
    }

    pub fn kind(&self) -> EmbeddingKind {
        self.left.kind()
    }

    fn check(&self) -> Result<(), PushoutError> {
        if self.left.kind() != self.right.kind() {
            return Err(PushoutError::KindMismatch(
                self.left.kind(),
                self.right.kind(),
            ));
        }
        if **self.left.source() != *self.apex || **self.right.source() != *self.apex {
            return Err(PushoutError::InvalidSpan(
                "embedding sources differ from the apex".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Class {
    /// Unique name, used as node label of the sum.
    pub name: String,
    /// Member in the left tree, if any.
    pub left: Option<NodeId>,
    /// Member in the right tree, if any.
    pub right: Option<NodeId>,
}

impl Class {
    pub fn is_merged(&self) -> bool {
        self.left.is_some() && self.right.is_some()
    }
}

/// The join: classes of identified nodes and the arc set between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientGraph {
    pub classes: Vec<Class>,
    pub arcs: BTreeSet<(usize, usize)>,
    /// Class of every node of the left tree.
    pub left_class: Vec<usize>,
    /// Class of every node of the right tree.
    pub right_class: Vec<usize>,
}

type Parents = Vec<SmallVec<[usize; 2]>>;

impl QuotientGraph {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_of(&self, side: Side, v: NodeId) -> usize {
        match side {
            Side::Left => self.left_class[v.index()],
            Side::Right => self.right_class[v.index()],
        }
    }

    pub fn parents(&self) -> Parents {
        parents_of(self.len(), &self.arcs)
    }

    pub fn in_degree(&self, class: usize) -> usize {
        self.arcs.iter().filter(|&&(_, w)| w == class).count()
    }

    pub fn is_acyclic(&self) -> bool {
        let n = self.len();
        let mut indeg = vec![0usize; n];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(v, w) in &self.arcs {
            indeg[w] += 1;
            out[v].push(w);
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for &w in &out[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
        seen == n
    }
}

fn parents_of(n: usize, arcs: &BTreeSet<(usize, usize)>) -> Parents {
    let mut parents: Parents = vec![SmallVec::new(); n];
    for &(v, w) in arcs {
        parents[w].push(v);
    }
    parents
}

/// Appends `'` to names until all are distinct.
fn make_unique(classes: &mut [Class]) {
    let mut taken: FxHashSet<String> = FxHashSet::default();
    let mut clash = Vec::new();
    {
        let mut seen: FxHashSet<&str> = FxHashSet::default();
        for (i, c) in classes.iter().enumerate() {
            if !seen.insert(&c.name) {
                clash.push(i);
            }
        }
        if clash.is_empty() {
            return;
        }
        taken.extend(seen.into_iter().map(str::to_owned));
    }
    for i in clash {
        let name = &mut classes[i].name;
        while taken.contains(name.as_str()) {
            name.push('\'');
        }
        taken.insert(name.clone());
    }
}

/// Disjoint sum of both trees with the two images of every apex node identified.
pub fn join(s: &SpanResult) -> Result<QuotientGraph, PushoutError> {
    s.check()?;
    let (t1, t2) = (s.left.target(), s.right.target());
    let pre1 = s.left.preimages();
    let mut classes = Vec::with_capacity(t1.len() + t2.len() - s.apex.len());
    let mut left_class = vec![0; t1.len()];
    let mut right_class = vec![usize::MAX; t2.len()];
    for v in t1.nodes() {
        let (name, right) = match pre1[v.index()] {
            Some(c) => (t1.label(v).to_owned(), Some(s.right.apply(c))),
            None => (format!("1:{}", t1.label(v)), None),
        };
        left_class[v.index()] = classes.len();
        if let Some(w) = right {
            right_class[w.index()] = classes.len();
        }
        classes.push(Class {
            name,
            left: Some(v),
            right,
        });
    }
    for w in t2.nodes() {
        if right_class[w.index()] == usize::MAX {
            right_class[w.index()] = classes.len();
            classes.push(Class {
                name: format!("2:{}", t2.label(w)),
                left: None,
                right: Some(w),
            });
        }
    }
    make_unique(&mut classes);
    let arcs = t1
        .arcs()
        .map(|(a, b)| (left_class[a.index()], left_class[b.index()]))
        .chain(
            t2.arcs()
                .map(|(a, b)| (right_class[a.index()], right_class[b.index()])),
        )
        .collect();
    Ok(QuotientGraph {
        classes,
        arcs,
        left_class,
        right_class,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruneResult {
    pub removed: BTreeSet<(usize, usize)>,
    pub arcs: BTreeSet<(usize, usize)>,
}

/// Looks for a subsumed arc into `y` by walking up from both of its parents in
/// lockstep. Each walk only passes through nodes of in-degree 1.
fn subsumed_into(parents: &Parents, y: usize, cap: usize) -> Option<(usize, usize)> {
    let (x, xp) = (parents[y][0], parents[y][1]);
    let step = |cur: usize| (parents[cur].len() == 1).then(|| parents[cur][0]);
    let (mut a, mut b) = (Some(x), Some(xp));
    for _ in 0..=cap {
        if a.is_none() && b.is_none() {
            return None;
        }
        if let Some(cur) = a {
            if cur == xp {
                return Some((xp, y));
            }
            a = step(cur);
        }
        if let Some(cur) = b {
            if cur == x {
                return Some((x, y));
            }
            b = step(cur);
        }
    }
    None
}

/// Removes every arc subsumed by another path, scanning classes of in-degree 2.
pub fn prune_subsumed_arcs(q: &QuotientGraph) -> PruneResult {
    let parents = q.parents();
    let removed: BTreeSet<(usize, usize)> = (0..q.len())
        .filter(|&y| parents[y].len() == 2)
        .filter_map(|y| subsumed_into(&parents, y, q.len()))
        .collect();
    let arcs = q.arcs.difference(&removed).copied().collect();
    PruneResult { removed, arcs }
}

/// Same scan, but visiting classes in `order` and removing each arc as soon as
/// it is found, so later walks see the partially pruned graph.
pub fn prune_subsumed_arcs_in_order(q: &QuotientGraph, order: &[usize]) -> PruneResult {
    let mut parents = q.parents();
    let mut removed = BTreeSet::new();
    for &y in order {
        if parents[y].len() != 2 {
            continue;
        }
        if let Some((v, w)) = subsumed_into(&parents, y, q.len()) {
            parents[w].retain(|p| *p != v);
            removed.insert((v, w));
        }
    }
    let arcs = q.arcs.difference(&removed).copied().collect();
    PruneResult { removed, arcs }
}

/// Arcs `(v, w)` for which some other path `v ⇝ w` exists, by direct search.
pub fn subsumed_arcs_declarative(q: &QuotientGraph) -> BTreeSet<(usize, usize)> {
    let n = q.len();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(v, w) in &q.arcs {
        out[v].push(w);
    }
    q.arcs
        .iter()
        .copied()
        .filter(|&(v, w)| {
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = out[v].iter().copied().filter(|&u| u != w).collect();
            while let Some(u) = stack.pop() {
                if u == w {
                    return true;
                }
                if !std::mem::replace(&mut seen[u], true) {
                    stack.extend(out[u].iter().copied());
                }
            }
            false
        })
        .collect()
}

fn count_paths(
    out: &[Vec<usize>],
    from: usize,
    to: usize,
    skip: (usize, usize),
) -> Vec<Vec<usize>> {
    let mut found = Vec::new();
    let mut stack = vec![vec![from]];
    while let Some(path) = stack.pop() {
        let last = *path.last().unwrap();
        if last == to {
            found.push(path);
            if found.len() > 1 {
                break;
            }
            continue;
        }
        for &next in &out[last] {
            if (last, next) != skip && path.len() <= out.len() {
                let mut p = path.clone();
                p.push(next);
                stack.push(p);
            }
        }
    }
    found
}

/// Structural facts about the join that hold whenever the apex is a largest
/// common subtree: acyclicity, the root condition, and the shape of every
/// subsumed arc's alternative path. Returns the first failure.
pub fn check_join_invariants(
    s: &SpanResult,
    q: &QuotientGraph,
    pruned: &PruneResult,
) -> Result<(), String> {
    if !q.is_acyclic() {
        return Err("join contains a cycle".into());
    }
    if let Some(r) = s.apex.root() {
        let root1 = s.left.target().root();
        let root2 = s.right.target().root();
        if Some(s.left.apply(r)) != root1 && Some(s.right.apply(r)) != root2 {
            return Err("apex root maps to neither root".into());
        }
    }
    let declarative = subsumed_arcs_declarative(q);
    if declarative != pruned.removed {
        return Err(format!(
            "scan removed {:?}, definition requires {:?}",
            pruned.removed, declarative
        ));
    }
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); q.len()];
    for &(v, w) in &q.arcs {
        out[v].push(w);
    }
    for &(v, w) in &pruned.removed {
        if !q.classes[v].is_merged() || !q.classes[w].is_merged() {
            return Err(format!(
                "subsumed arc ({}, {}) has an endpoint outside the apex image",
                q.classes[v].name, q.classes[w].name
            ));
        }
        let paths = count_paths(&out, v, w, (v, w));
        if paths.len() != 1 {
            return Err(format!(
                "subsumed arc ({}, {}) has {} alternative paths",
                q.classes[v].name,
                q.classes[w].name,
                paths.len()
            ));
        }
        let path = &paths[0];
        if path[1..path.len() - 1]
            .iter()
            .any(|&u| q.classes[u].is_merged())
        {
            return Err(format!(
                "alternative path for ({}, {}) passes through the apex image",
                q.classes[v].name, q.classes[w].name
            ));
        }
    }
    Ok(())
}

/// The sum: the pruned join as a tree, with the two quotient embeddings.
#[derive(Debug, Clone)]
pub struct SumResult {
    pub tree: Arc<RootedTree>,
    /// `ℓ₁`: left tree into the sum.
    pub left: Embedding,
    /// `ℓ₂`: right tree into the sum.
    pub right: Embedding,
    pub quotient: QuotientGraph,
    pub removed: BTreeSet<(usize, usize)>,
    /// Class index of every node of `tree`.
    pub class_of_node: Vec<usize>,
}

impl SumResult {
    pub fn cospan(&self) -> CospanResult {
        CospanResult {
            apex: self.tree.clone(),
            left: self.left.clone(),
            right: self.right.clone(),
        }
    }

    /// Labels of the members of the class at `v`: (left label, right label).
    pub fn provenance(&self, s: &SpanResult, v: NodeId) -> (Option<String>, Option<String>) {
        let c = &self.quotient.classes[self.class_of_node[v.index()]];
        (
            c.left.map(|a| s.left.target().label(a).to_owned()),
            c.right.map(|b| s.right.target().label(b).to_owned()),
        )
    }
}

pub fn sum(s: &SpanResult) -> Result<SumResult, PushoutError> {
    sum_with(s, Checks::Off)
}

pub fn sum_with(s: &SpanResult, checks: Checks) -> Result<SumResult, PushoutError> {
    let q = join(s)?;
    let pruned = prune_subsumed_arcs(&q);
    if checks == Checks::Full {
        check_join_invariants(s, &q, &pruned).map_err(PushoutError::InvariantViolated)?;
    }
    let n = q.len();
    let mut parents: Vec<Option<usize>> = vec![None; n];
    for &(v, w) in &pruned.arcs {
        if let Some(other) = parents[w].replace(v) {
            return Err(PushoutError::NotATreeAfterPruning(format!(
                "{} keeps two parents, {} and {}",
                q.classes[w].name, q.classes[other].name, q.classes[v].name
            )));
        }
    }
    let labels: Vec<String> = q.classes.iter().map(|c| c.name.clone()).collect();
    let (tree, node_of_class) = RootedTree::from_parent_table_ranked(labels, &parents)
        .map_err(|e| PushoutError::NotATreeAfterPruning(e.to_string()))?;
    let tree = Arc::new(tree);
    let mut class_of_node = vec![0; n];
    for (i, id) in node_of_class.iter().enumerate() {
        class_of_node[id.index()] = i;
    }
    let kind = s.kind();
    let leg = |side: Side, t: &Arc<RootedTree>| {
        let map = t
            .nodes()
            .map(|v| node_of_class[q.class_of(side, v)])
            .collect();
        Embedding::new(t.clone(), tree.clone(), map, kind)
            .map_err(|e| PushoutError::LegNotEmbedding(e.to_string()))
    };
    let left = leg(Side::Left, s.left.target())?;
    let right = leg(Side::Right, s.right.target())?;
    let expected = s.left.target().len() + s.right.target().len() - s.apex.len();
    if tree.len() != expected {
        return Err(PushoutError::InvariantViolated(format!(
            "sum has {} nodes, expected {expected}",
            tree.len()
        )));
    }
    if s.apex
        .nodes()
        .any(|c| left.apply(s.left.apply(c)) != right.apply(s.right.apply(c)))
    {
        return Err(PushoutError::InvariantViolated("ℓ₁∘m₁ ≠ ℓ₂∘m₂".into()));
    }
    Ok(SumResult {
        tree,
        left,
        right,
        quotient: q,
        removed: pruned.removed,
        class_of_node,
    })
}

/// The unique embedding `f` of the sum with `f ∘ ℓ₁ = h₁` and `f ∘ ℓ₂ = h₂`.
pub fn pushout_mediator(
    s: &SpanResult,
    sigma: &SumResult,
    h1: &Embedding,
    h2: &Embedding,
) -> Result<Embedding, PushoutError> {
    s.check()?;
    let kind = s.kind();
    for k in [h1.kind(), h2.kind()] {
        if k != kind {
            return Err(PushoutError::KindMismatch(kind, k));
        }
    }
    if **h1.source() != **s.left.target()
        || **h2.source() != **s.right.target()
        || **h1.target() != **h2.target()
    {
        return Err(PushoutError::InvalidSpan(
            "probe does not fit the span".into(),
        ));
    }
    if s.apex
        .nodes()
        .any(|c| h1.apply(s.left.apply(c)) != h2.apply(s.right.apply(c)))
    {
        return Err(PushoutError::NonCommutingProbe);
    }
    let map = sigma
        .tree
        .nodes()
        .map(|v| {
            let class = &sigma.quotient.classes[sigma.class_of_node[v.index()]];
            match (class.left, class.right) {
                (Some(a), _) => h1.apply(a),
                (None, Some(b)) => h2.apply(b),
                (None, None) => unreachable!("classes are non-empty"),
            }
        })
        .collect();
    Embedding::new(sigma.tree.clone(), h1.target().clone(), map, kind)
        .map_err(|e| PushoutError::InternalVerificationFailure(e.to_string()))
}
