//! The four embedding relations between rooted trees.
//!
//! An embedding is an injective node map `f: V(S) -> V(T)`. Every kind sends
//! each arc `(a, b)` of `S` to a path `f(a) ⇝ f(b)` of `T` with no
//! intermediate node in `f(V(S))`; the kinds then differ in what the path may
//! look like:
//!
//! | kind           | extra condition on the image paths                 |
//! |----------------|----------------------------------------------------|
//! | `Minor`        | none                                               |
//! | `Topological`  | paths of sibling arcs diverge                      |
//! | `Homeomorphic` | every path is elementary                           |
//! | `Isomorphic`   | every path is a single arc                         |
//!
//! Verification runs in `O(|S| + |T|)` by computing, in one preorder pass over
//! `T`, the nearest image ancestor of every node.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::tree::{NodeId, RootedTree};

/// Embedding kinds, ordered by strength: `Minor < Topological < Homeomorphic < Isomorphic`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EmbeddingKind {
    Minor,
    Topological,
    Homeomorphic,
    Isomorphic,
}

impl EmbeddingKind {
    pub const ALL: [EmbeddingKind; 4] = [
        EmbeddingKind::Minor,
        EmbeddingKind::Topological,
        EmbeddingKind::Homeomorphic,
        EmbeddingKind::Isomorphic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EmbeddingKind::Minor => "minor",
            EmbeddingKind::Topological => "topological",
            EmbeddingKind::Homeomorphic => "homeomorphic",
            EmbeddingKind::Isomorphic => "isomorphic",
        }
    }

    pub fn stronger(self) -> Option<EmbeddingKind> {
        match self {
            EmbeddingKind::Minor => Some(EmbeddingKind::Topological),
            EmbeddingKind::Topological => Some(EmbeddingKind::Homeomorphic),
            EmbeddingKind::Homeomorphic => Some(EmbeddingKind::Isomorphic),
            EmbeddingKind::Isomorphic => None,
        }
    }

    pub fn weaker(self) -> Option<EmbeddingKind> {
        match self {
            EmbeddingKind::Minor => None,
            EmbeddingKind::Topological => Some(EmbeddingKind::Minor),
            EmbeddingKind::Homeomorphic => Some(EmbeddingKind::Topological),
            EmbeddingKind::Isomorphic => Some(EmbeddingKind::Homeomorphic),
        }
    }
}

impl fmt::Display for EmbeddingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EmbeddingKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "min" | "minor" => Ok(EmbeddingKind::Minor),
            "top" | "topo" | "topological" => Ok(EmbeddingKind::Topological),
            "hom" | "homeo" | "homeomorphic" => Ok(EmbeddingKind::Homeomorphic),
            "iso" | "isomorphic" => Ok(EmbeddingKind::Isomorphic),
            other => Err(format!("unknown embedding kind `{other}`")),
        }
    }
}

/// The first condition a map fails, in source-node/arc order.
///
/// Source nodes are ids of the source tree, `image`/`node`/`shared` are ids
/// of the target tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NotInjective {
        first: NodeId,
        second: NodeId,
        image: NodeId,
    },
    /// No path from the image of the parent to the image of the child.
    NoPath {
        arc: (NodeId, NodeId),
    },
    /// The image path contains another image node.
    ImageOnPath {
        arc: (NodeId, NodeId),
        node: NodeId,
    },
    /// Intermediate node with out-degree other than 1.
    NotElementary {
        arc: (NodeId, NodeId),
        node: NodeId,
    },
    NotAnArc {
        arc: (NodeId, NodeId),
    },
    /// Image paths of two sibling arcs share the node after their origin.
    NotDivergent {
        parent: NodeId,
        children: (NodeId, NodeId),
        shared: NodeId,
    },
}

impl Violation {
    /// Human readable account using the labels of both trees.
    pub fn describe(&self, s: &RootedTree, t: &RootedTree, map: &[NodeId]) -> String {
        let sl = |v: NodeId| s.label(v);
        let tl = |v: NodeId| t.label(v);
        let img = |v: NodeId| t.label(map[v.index()]);
        match *self {
            Violation::NotInjective { first, second, image } => format!(
                "nodes {} and {} are both sent to {}",
                sl(first),
                sl(second),
                tl(image)
            ),
            Violation::NoPath { arc: (a, b) } => format!(
                "arc ({}, {}): there is no path {}⇝{}",
                sl(a),
                sl(b),
                img(a),
                img(b)
            ),
            Violation::ImageOnPath { arc: (a, b), node } => format!(
                "arc ({}, {}): the path {}⇝{} contains the node {} of the image",
                sl(a),
                sl(b),
                img(a),
                img(b),
                tl(node)
            ),
            Violation::NotElementary { arc: (a, b), node } => format!(
                "arc ({}, {}): the path {}⇝{} is not elementary, {} has {} children",
                sl(a),
                sl(b),
                img(a),
                img(b),
                tl(node),
                t.out_degree(node)
            ),
            Violation::NotAnArc { arc: (a, b) } => format!(
                "arc ({}, {}): the path {}⇝{} is not an arc",
                sl(a),
                sl(b),
                img(a),
                img(b)
            ),
            Violation::NotDivergent { parent, children: (b, c), shared } => format!(
                "arcs ({p}, {}) and ({p}, {}): the paths from {} do not diverge, both pass through {}",
                sl(b),
                sl(c),
                img(parent),
                tl(shared),
                p = sl(parent)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails(Violation),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(v) => Some(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingError {
    #[error("mapping is not defined on source node `{0}`")]
    PartialMapping(String),
    #[error("mapping sends `{0}` to `{1}`, which is not a node of the target")]
    ValueOutsideTarget(String, String),
    #[error("mapping mentions `{0}`, which is not a node of the source")]
    UnknownSource(String),
    #[error("mapping is not a {kind} embedding: {reason}")]
    Violated { kind: EmbeddingKind, reason: String },
    #[error("trees do not match for composition")]
    TreeMismatch,
    #[error("embedding kinds differ: {0} vs {1}")]
    KindMismatch(EmbeddingKind, EmbeddingKind),
    #[error("the composite of the given maps differs from the expected embedding")]
    CompositionMismatch,
    #[error("{0}")]
    PreconditionViolated(String),
    #[error("source has {nodes} nodes, above the enumeration bound {bound}")]
    BoundExceeded { nodes: usize, bound: usize },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Per-target-node data relative to an image set, computed in one preorder pass.
struct ImageIndex {
    is_image: Vec<bool>,
    /// Nearest proper ancestor that is an image node.
    nearest: Vec<Option<NodeId>>,
    /// Node right below `nearest` on the path towards this node.
    first_step: Vec<Option<NodeId>>,
    /// All nodes strictly between `nearest` and this node have out-degree 1.
    elementary: Vec<bool>,
}

impl ImageIndex {
    fn new(t: &RootedTree, is_image: Vec<bool>) -> Self {
        let n = t.len();
        let mut nearest = vec![None; n];
        let mut first_step = vec![None; n];
        let mut elementary = vec![true; n];
        for &v in t.preorder() {
            let Some(u) = t.parent(v) else { continue };
            if is_image[u.index()] {
                nearest[v.index()] = Some(u);
                first_step[v.index()] = Some(v);
                elementary[v.index()] = true;
            } else {
                nearest[v.index()] = nearest[u.index()];
                first_step[v.index()] = first_step[u.index()];
                elementary[v.index()] = elementary[u.index()] && t.out_degree(u) == 1;
            }
        }
        ImageIndex {
            is_image,
            nearest,
            first_step,
            elementary,
        }
    }
}

fn check_map(s: &RootedTree, t: &RootedTree, map: &[NodeId]) -> Result<(), EmbeddingError> {
    if map.len() != s.len() {
        let missing = s.nodes().nth(map.len()).map(|v| s.label(v).to_owned());
        return Err(EmbeddingError::PartialMapping(missing.unwrap_or_default()));
    }
    for (i, &m) in map.iter().enumerate() {
        if m.index() >= t.len() {
            return Err(EmbeddingError::ValueOutsideTarget(
                s.label(NodeId::from(i)).to_owned(),
                m.to_string(),
            ));
        }
    }
    Ok(())
}

/// Checks whether `map` (indexed by source node) is an embedding of `kind`.
pub fn verify_embedding(
    s: &RootedTree,
    t: &RootedTree,
    map: &[NodeId],
    kind: EmbeddingKind,
) -> Result<Verdict, EmbeddingError> {
    check_map(s, t, map)?;
    Ok(verify_unchecked(s, t, map, kind))
}

pub(crate) fn verify_unchecked(
    s: &RootedTree,
    t: &RootedTree,
    map: &[NodeId],
    kind: EmbeddingKind,
) -> Verdict {
    let mut owner: Vec<Option<NodeId>> = vec![None; t.len()];
    for a in s.nodes() {
        let img = map[a.index()];
        if let Some(first) = owner[img.index()] {
            return Verdict::Fails(Violation::NotInjective {
                first,
                second: a,
                image: img,
            });
        }
        owner[img.index()] = Some(a);
    }
    let idx = ImageIndex::new(t, owner.iter().map(Option::is_some).collect());
    verify_with_index(s, t, map, kind, &idx)
}

fn verify_with_index(
    s: &RootedTree,
    t: &RootedTree,
    map: &[NodeId],
    kind: EmbeddingKind,
    idx: &ImageIndex,
) -> Verdict {
    for (a, b) in s.arcs() {
        let (fa, fb) = (map[a.index()], map[b.index()]);
        if !t.is_proper_ancestor(fa, fb) {
            return Verdict::Fails(Violation::NoPath { arc: (a, b) });
        }
        let near = idx.nearest[fb.index()].expect("fa is an image ancestor of fb");
        if near != fa {
            // the path fa ⇝ fb passes through `near`; report the image node
            // closest to fa
            let mut v = near;
            let mut topmost = near;
            while v != fa {
                if idx.is_image[v.index()] {
                    topmost = v;
                }
                v = t.parent(v).unwrap();
            }
            return Verdict::Fails(Violation::ImageOnPath {
                arc: (a, b),
                node: topmost,
            });
        }
        match kind {
            EmbeddingKind::Isomorphic if t.parent(fb) != Some(fa) => {
                return Verdict::Fails(Violation::NotAnArc { arc: (a, b) });
            }
            EmbeddingKind::Homeomorphic if !idx.elementary[fb.index()] => {
                let path = t.path_between(fa, fb).unwrap().unwrap();
                let node = *path
                    .intermediates()
                    .iter()
                    .find(|&&v| t.out_degree(v) != 1)
                    .unwrap();
                return Verdict::Fails(Violation::NotElementary { arc: (a, b), node });
            }
            _ => {}
        }
    }
    if kind == EmbeddingKind::Topological {
        // every unordered pair of siblings must leave the parent's image
        // through distinct children
        let mut seen: HashMap<NodeId, NodeId> = HashMap::new();
        for a in s.nodes() {
            seen.clear();
            for &b in s.children(a) {
                let step = idx.first_step[map[b.index()].index()].unwrap();
                if let Some(&prev) = seen.get(&step) {
                    return Verdict::Fails(Violation::NotDivergent {
                        parent: a,
                        children: (prev, b),
                        shared: step,
                    });
                }
                seen.insert(step, b);
            }
        }
    }
    Verdict::Holds
}

/// The strongest kind at which `map` is an embedding, if any.
pub fn classify_embedding(
    s: &RootedTree,
    t: &RootedTree,
    map: &[NodeId],
) -> Result<Option<EmbeddingKind>, EmbeddingError> {
    check_map(s, t, map)?;
    Ok(EmbeddingKind::ALL
        .iter()
        .rev()
        .copied()
        .find(|&k| verify_unchecked(s, t, map, k).holds()))
}

/// Resolves a label-level mapping against the two trees.
pub fn resolve_mapping(
    s: &RootedTree,
    t: &RootedTree,
    labels: &BTreeMap<String, String>,
) -> Result<Vec<NodeId>, EmbeddingError> {
    for src in labels.keys() {
        if !s.contains_label(src) {
            return Err(EmbeddingError::UnknownSource(src.clone()));
        }
    }
    s.nodes()
        .map(|v| {
            let src = s.label(v);
            let dst = labels
                .get(src)
                .ok_or_else(|| EmbeddingError::PartialMapping(src.to_owned()))?;
            t.id(dst)
                .map_err(|_| EmbeddingError::ValueOutsideTarget(src.to_owned(), dst.clone()))
        })
        .collect()
}

/// A verified embedding of one tree into another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    source: Arc<RootedTree>,
    target: Arc<RootedTree>,
    map: Vec<NodeId>,
    kind: EmbeddingKind,
}

impl Embedding {
    pub fn new(
        source: Arc<RootedTree>,
        target: Arc<RootedTree>,
        map: Vec<NodeId>,
        kind: EmbeddingKind,
    ) -> Result<Self, EmbeddingError> {
        match verify_embedding(&source, &target, &map, kind)? {
            Verdict::Holds => Ok(Embedding {
                source,
                target,
                map,
                kind,
            }),
            Verdict::Fails(v) => Err(EmbeddingError::Violated {
                kind,
                reason: v.describe(&source, &target, &map),
            }),
        }
    }

    pub fn from_labels(
        source: Arc<RootedTree>,
        target: Arc<RootedTree>,
        labels: &BTreeMap<String, String>,
        kind: EmbeddingKind,
    ) -> Result<Self, EmbeddingError> {
        let map = resolve_mapping(&source, &target, labels)?;
        Self::new(source, target, map, kind)
    }

    pub fn identity(tree: Arc<RootedTree>, kind: EmbeddingKind) -> Self {
        let map = tree.nodes().collect();
        Embedding {
            source: tree.clone(),
            target: tree,
            map,
            kind,
        }
    }

    /// The empty map from the empty tree, valid at every kind.
    pub fn from_empty(target: Arc<RootedTree>, kind: EmbeddingKind) -> Self {
        Embedding {
            source: Arc::new(RootedTree::empty()),
            target,
            map: Vec::new(),
            kind,
        }
    }

    pub fn source(&self) -> &Arc<RootedTree> {
        &self.source
    }

    pub fn target(&self) -> &Arc<RootedTree> {
        &self.target
    }

    pub fn map(&self) -> &[NodeId] {
        &self.map
    }

    pub fn kind(&self) -> EmbeddingKind {
        self.kind
    }

    #[inline]
    pub fn apply(&self, v: NodeId) -> NodeId {
        self.map[v.index()]
    }

    /// Inverse lookup table over target nodes.
    pub fn preimages(&self) -> Vec<Option<NodeId>> {
        let mut inv = vec![None; self.target.len()];
        for (i, &m) in self.map.iter().enumerate() {
            inv[m.index()] = Some(NodeId::from(i));
        }
        inv
    }

    pub fn label_map(&self) -> BTreeMap<String, String> {
        self.source
            .nodes()
            .map(|v| {
                (
                    self.source.label(v).to_owned(),
                    self.target.label(self.apply(v)).to_owned(),
                )
            })
            .collect()
    }

    /// Same map, re-verified at another kind.
    pub fn with_kind(&self, kind: EmbeddingKind) -> Result<Self, EmbeddingError> {
        Self::new(
            self.source.clone(),
            self.target.clone(),
            self.map.clone(),
            kind,
        )
    }

    /// Strongest kind the underlying map satisfies.
    pub fn classify(&self) -> EmbeddingKind {
        classify_embedding(&self.source, &self.target, &self.map)
            .ok()
            .flatten()
            .expect("a verified embedding is at least a minor embedding")
    }
}

fn same_tree(a: &Arc<RootedTree>, b: &Arc<RootedTree>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// `g ∘ f`. Closure under composition is re-verified.
pub fn compose(g: &Embedding, f: &Embedding) -> Result<Embedding, EmbeddingError> {
    if !same_tree(f.target(), g.source()) {
        return Err(EmbeddingError::TreeMismatch);
    }
    if f.kind != g.kind {
        return Err(EmbeddingError::KindMismatch(g.kind, f.kind));
    }
    let map = f.map.iter().map(|&v| g.apply(v)).collect();
    Embedding::new(f.source.clone(), g.target.clone(), map, f.kind)
        .map_err(|e| EmbeddingError::Internal(format!("composite is not an embedding: {e}")))
}

/// Given node map `f: S -> T` with `g: T -> U` and `g ∘ f = gf` both
/// embeddings of at least `kind`, returns `f` as a verified embedding of
/// `kind`. This always succeeds when the preconditions hold.
pub fn left_factor(
    f: &[NodeId],
    g: &Embedding,
    gf: &Embedding,
    kind: EmbeddingKind,
) -> Result<Embedding, EmbeddingError> {
    if g.kind < kind || gf.kind < kind {
        return Err(EmbeddingError::PreconditionViolated(format!(
            "left factor at {kind} needs {kind} embeddings, got {} and {}",
            g.kind, gf.kind
        )));
    }
    if !same_tree(g.target(), gf.target()) {
        return Err(EmbeddingError::TreeMismatch);
    }
    let s = gf.source();
    let t = g.source();
    if f.len() != s.len() || f.iter().any(|v| v.index() >= t.len()) {
        return Err(EmbeddingError::CompositionMismatch);
    }
    if s.nodes().any(|v| g.apply(f[v.index()]) != gf.apply(v)) {
        return Err(EmbeddingError::CompositionMismatch);
    }
    Embedding::new(s.clone(), t.clone(), f.to_vec(), kind)
        .map_err(|e| EmbeddingError::Internal(format!("left factor is not an embedding: {e}")))
}

/// Default cap on source size for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_BOUND: usize = 8;

/// All `kind` embeddings of `s` into `t` in lexicographic order of their
/// image sequences (source nodes in label order), truncated at `limit`.
pub fn enumerate_embeddings(
    s: &Arc<RootedTree>,
    t: &Arc<RootedTree>,
    kind: EmbeddingKind,
    limit: usize,
) -> Result<Vec<Embedding>, EmbeddingError> {
    enumerate_embeddings_bounded(s, t, kind, limit, DEFAULT_ENUMERATION_BOUND)
}

pub fn enumerate_embeddings_bounded(
    s: &Arc<RootedTree>,
    t: &Arc<RootedTree>,
    kind: EmbeddingKind,
    limit: usize,
    bound: usize,
) -> Result<Vec<Embedding>, EmbeddingError> {
    if s.len() > bound {
        return Err(EmbeddingError::BoundExceeded {
            nodes: s.len(),
            bound,
        });
    }
    let mut out = Vec::new();
    for_each_embedding(s, t, kind, |map| {
        out.push(Embedding {
            source: s.clone(),
            target: t.clone(),
            map: map.to_vec(),
            kind,
        });
        out.len() < limit
    });
    Ok(out)
}

/// Least embedding in lexicographic order, if any.
pub fn first_embedding(s: &RootedTree, t: &RootedTree, kind: EmbeddingKind) -> Option<Vec<NodeId>> {
    let mut found = None;
    for_each_embedding(s, t, kind, |m| {
        found = Some(m.to_vec());
        false
    });
    found
}

/// Calls `visit` for every `kind` embedding in lexicographic order until it
/// returns `false`. No size bound is applied here.
pub fn for_each_embedding(
    s: &RootedTree,
    t: &RootedTree,
    kind: EmbeddingKind,
    mut visit: impl FnMut(&[NodeId]) -> bool,
) {
    if s.len() > t.len() {
        return;
    }
    if s.is_empty() {
        visit(&[]);
        return;
    }
    let mut search = Search {
        s,
        t,
        kind,
        map: vec![None; s.len()],
        used: vec![false; t.len()],
        scratch: Vec::with_capacity(s.len()),
    };
    search.run(0, &mut visit);
}

struct Search<'a> {
    s: &'a RootedTree,
    t: &'a RootedTree,
    kind: EmbeddingKind,
    map: Vec<Option<NodeId>>,
    used: Vec<bool>,
    scratch: Vec<NodeId>,
}

impl Search<'_> {
    /// Returns `false` once the visitor asked to stop.
    fn run(&mut self, next: usize, visit: &mut impl FnMut(&[NodeId]) -> bool) -> bool {
        if next == self.s.len() {
            self.scratch.clear();
            self.scratch.extend(self.map.iter().map(|m| m.unwrap()));
            if verify_unchecked(self.s, self.t, &self.scratch, self.kind).holds() {
                return visit(&self.scratch);
            }
            return true;
        }
        let v = NodeId::from(next);
        for cand in self.t.nodes() {
            if self.used[cand.index()] || !self.feasible(v, cand) {
                continue;
            }
            self.map[next] = Some(cand);
            self.used[cand.index()] = true;
            let go_on = self.run(next + 1, visit);
            self.used[cand.index()] = false;
            self.map[next] = None;
            if !go_on {
                return false;
            }
        }
        true
    }

    /// Necessary conditions for `v -> cand` given the partial assignment.
    fn feasible(&self, v: NodeId, cand: NodeId) -> bool {
        let (s, t) = (self.s, self.t);
        // descendants go to descendants, injectively
        if t.subtree_size(cand) < s.subtree_size(v) {
            return false;
        }
        match self.kind {
            EmbeddingKind::Minor => {}
            // sibling paths leave through distinct children
            _ if t.out_degree(cand) < s.out_degree(v) => return false,
            _ => {}
        }
        if let Some(p) = s.parent(v) {
            if let Some(fp) = self.map[p.index()] {
                if !self.arc_feasible(fp, cand) {
                    return false;
                }
            }
        }
        for &c in s.children(v) {
            if let Some(fc) = self.map[c.index()] {
                if !self.arc_feasible(cand, fc) {
                    return false;
                }
            }
        }
        // cand may not sit strictly inside the image path of an assigned arc
        for (a, b) in s.arcs() {
            if let (Some(fa), Some(fb)) = (self.map[a.index()], self.map[b.index()]) {
                if t.is_proper_ancestor(fa, cand) && t.is_proper_ancestor(cand, fb) {
                    return false;
                }
            }
        }
        true
    }

    fn arc_feasible(&self, from: NodeId, to: NodeId) -> bool {
        let t = self.t;
        if !t.is_proper_ancestor(from, to) {
            return false;
        }
        if self.kind == EmbeddingKind::Isomorphic {
            return t.parent(to) == Some(from);
        }
        let mut v = t.parent(to).unwrap();
        while v != from {
            if self.used[v.index()] {
                return false;
            }
            if self.kind == EmbeddingKind::Homeomorphic && t.out_degree(v) != 1 {
                return false;
            }
            v = t.parent(v).unwrap();
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_pair() -> (Arc<RootedTree>, Arc<RootedTree>) {
        let s = RootedTree::from_parts(["r", "x", "y"], [("r", "x"), ("r", "y")], None).unwrap();
        let t = RootedTree::from_parts(
            ["1", "2", "3", "4", "5", "6"],
            [("1", "2"), ("1", "3"), ("3", "4"), ("4", "5"), ("4", "6")],
            None,
        )
        .unwrap();
        (Arc::new(s), Arc::new(t))
    }

    fn map(s: &RootedTree, t: &RootedTree, pairs: &[(&str, &str)]) -> Vec<NodeId> {
        let labels = pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        resolve_mapping(s, t, &labels).unwrap()
    }

    #[test]
    fn example_maps_classify() {
        let (s, t) = sample_pair();
        type Case<'a> = (&'a [(&'a str, &'a str)], Option<EmbeddingKind>);
        let cases: [Case; 6] = [
            (&[("r", "1"), ("x", "3"), ("y", "4")], None),
            (
                &[("r", "1"), ("x", "5"), ("y", "6")],
                Some(EmbeddingKind::Minor),
            ),
            (
                &[("r", "1"), ("x", "2"), ("y", "6")],
                Some(EmbeddingKind::Topological),
            ),
            (
                &[("r", "1"), ("x", "2"), ("y", "4")],
                Some(EmbeddingKind::Homeomorphic),
            ),
            (
                &[("r", "1"), ("x", "2"), ("y", "3")],
                Some(EmbeddingKind::Isomorphic),
            ),
            (
                &[("r", "4"), ("x", "5"), ("y", "6")],
                Some(EmbeddingKind::Isomorphic),
            ),
        ];
        for (pairs, expected) in cases {
            let m = map(&s, &t, pairs);
            assert_eq!(
                classify_embedding(&s, &t, &m).unwrap(),
                expected,
                "{pairs:?}"
            );
        }
    }

    #[test]
    fn violation_reports_are_exact() {
        let (s, t) = sample_pair();
        let id = |l: &str| t.id(l).unwrap();
        let sid = |l: &str| s.id(l).unwrap();

        let f0 = map(&s, &t, &[("r", "1"), ("x", "3"), ("y", "4")]);
        assert_eq!(
            verify_embedding(&s, &t, &f0, EmbeddingKind::Minor).unwrap(),
            Verdict::Fails(Violation::ImageOnPath {
                arc: (sid("r"), sid("y")),
                node: id("3")
            })
        );
        let f1 = map(&s, &t, &[("r", "1"), ("x", "5"), ("y", "6")]);
        assert_eq!(
            verify_embedding(&s, &t, &f1, EmbeddingKind::Topological).unwrap(),
            Verdict::Fails(Violation::NotDivergent {
                parent: sid("r"),
                children: (sid("x"), sid("y")),
                shared: id("3")
            })
        );
        let f2 = map(&s, &t, &[("r", "1"), ("x", "2"), ("y", "6")]);
        assert_eq!(
            verify_embedding(&s, &t, &f2, EmbeddingKind::Homeomorphic).unwrap(),
            Verdict::Fails(Violation::NotElementary {
                arc: (sid("r"), sid("y")),
                node: id("4")
            })
        );
        let f3 = map(&s, &t, &[("r", "1"), ("x", "2"), ("y", "4")]);
        assert_eq!(
            verify_embedding(&s, &t, &f3, EmbeddingKind::Isomorphic).unwrap(),
            Verdict::Fails(Violation::NotAnArc {
                arc: (sid("r"), sid("y"))
            })
        );
        let v = verify_embedding(&s, &t, &f0, EmbeddingKind::Minor).unwrap();
        assert_eq!(
            v.violation().unwrap().describe(&s, &t, &f0),
            "arc (r, y): the path 1⇝4 contains the node 3 of the image"
        );
    }

    #[test]
    fn non_injective_and_no_path() {
        let (s, t) = sample_pair();
        let m = map(&s, &t, &[("r", "1"), ("x", "2"), ("y", "2")]);
        assert!(matches!(
            verify_embedding(&s, &t, &m, EmbeddingKind::Minor).unwrap(),
            Verdict::Fails(Violation::NotInjective { .. })
        ));
        let m = map(&s, &t, &[("r", "2"), ("x", "1"), ("y", "3")]);
        assert!(matches!(
            verify_embedding(&s, &t, &m, EmbeddingKind::Minor).unwrap(),
            Verdict::Fails(Violation::NoPath { .. })
        ));
    }

    #[test]
    fn mapping_errors() {
        let (s, t) = sample_pair();
        let mut labels = BTreeMap::new();
        labels.insert("r".to_string(), "1".to_string());
        assert!(matches!(
            resolve_mapping(&s, &t, &labels),
            Err(EmbeddingError::PartialMapping(_))
        ));
        labels.insert("x".into(), "9".into());
        labels.insert("y".into(), "2".into());
        assert!(matches!(
            resolve_mapping(&s, &t, &labels),
            Err(EmbeddingError::ValueOutsideTarget(..))
        ));
        assert!(matches!(
            verify_embedding(&s, &t, &[NodeId(0)], EmbeddingKind::Minor),
            Err(EmbeddingError::PartialMapping(_))
        ));
    }

    #[test]
    fn identity_holds_at_every_kind() {
        let (s, t) = sample_pair();
        for tree in [s, t] {
            for k in EmbeddingKind::ALL {
                let id: Vec<NodeId> = tree.nodes().collect();
                assert!(verify_embedding(&tree, &tree, &id, k).unwrap().holds());
            }
        }
    }

    #[test]
    fn empty_source_embeds_everywhere() {
        let (_, t) = sample_pair();
        let e = RootedTree::empty();
        for k in EmbeddingKind::ALL {
            assert!(verify_embedding(&e, &t, &[], k).unwrap().holds());
        }
    }

    #[test]
    fn enumerate_isomorphic_s_into_t() {
        let (s, t) = sample_pair();
        let all = enumerate_embeddings(&s, &t, EmbeddingKind::Isomorphic, usize::MAX).unwrap();
        let got: Vec<BTreeMap<String, String>> = all.iter().map(Embedding::label_map).collect();
        let f4 = map(&s, &t, &[("r", "1"), ("x", "2"), ("y", "3")]);
        let f5 = map(&s, &t, &[("r", "4"), ("x", "5"), ("y", "6")]);
        assert_eq!(all.len(), 4, "{got:?}");
        // both isomorphic images and their sibling swaps
        assert!(all.iter().any(|e| e.map() == f4.as_slice()));
        assert!(all.iter().any(|e| e.map() == f5.as_slice()));
        let images: std::collections::BTreeSet<Vec<NodeId>> = all
            .iter()
            .map(|e| {
                let mut v = e.map().to_vec();
                v.sort();
                v
            })
            .collect();
        assert_eq!(images.len(), 2);
    }

    #[test]
    fn enumeration_edge_cases() {
        let (s, _) = sample_pair();
        let all = enumerate_embeddings(&s, &s, EmbeddingKind::Isomorphic, usize::MAX).unwrap();
        assert!(all
            .iter()
            .any(|e| e.map() == s.nodes().collect::<Vec<_>>().as_slice()));
        let one = Arc::new(RootedTree::singleton("z").unwrap());
        assert!(enumerate_embeddings(&s, &one, EmbeddingKind::Minor, 10)
            .unwrap()
            .is_empty());
        let big = Arc::new(
            RootedTree::from_parts(
                (0..9).map(|i| format!("n{i}")).collect::<Vec<_>>(),
                (1..9)
                    .map(|i| ("n0".to_string(), format!("n{i}")))
                    .collect::<Vec<_>>(),
                None,
            )
            .unwrap(),
        );
        assert!(matches!(
            enumerate_embeddings(&big, &big, EmbeddingKind::Minor, 1),
            Err(EmbeddingError::BoundExceeded { .. })
        ));
    }

    #[test]
    fn compose_and_left_factor() {
        let (s, t) = sample_pair();
        let f4 = Embedding::new(
            s.clone(),
            t.clone(),
            map(&s, &t, &[("r", "1"), ("x", "2"), ("y", "3")]),
            EmbeddingKind::Isomorphic,
        )
        .unwrap();
        let id = Embedding::identity(s.clone(), EmbeddingKind::Isomorphic);
        assert_eq!(compose(&f4, &id).unwrap(), f4);
        assert_eq!(compose(&id, &f4), Err(EmbeddingError::TreeMismatch));
        let back = left_factor(id.map(), &f4, &f4, EmbeddingKind::Isomorphic).unwrap();
        assert_eq!(back, id);
        let wrong: Vec<NodeId> = vec![s.id("r").unwrap(), s.id("y").unwrap(), s.id("x").unwrap()];
        assert_eq!(
            left_factor(&wrong, &f4, &f4, EmbeddingKind::Isomorphic),
            Err(EmbeddingError::CompositionMismatch)
        );
        let f4_min = f4.with_kind(EmbeddingKind::Minor).unwrap();
        assert!(matches!(
            left_factor(id.map(), &f4_min, &f4, EmbeddingKind::Isomorphic),
            Err(EmbeddingError::PreconditionViolated(_))
        ));
        assert!(matches!(
            compose(&f4_min, &id),
            Err(EmbeddingError::KindMismatch(..))
        ));
    }

    #[test]
    fn kind_parsing_and_order() {
        assert_eq!(
            "iso".parse::<EmbeddingKind>().unwrap(),
            EmbeddingKind::Isomorphic
        );
        assert_eq!(
            "minor".parse::<EmbeddingKind>().unwrap(),
            EmbeddingKind::Minor
        );
        assert!("bogus".parse::<EmbeddingKind>().is_err());
        assert!(EmbeddingKind::Isomorphic > EmbeddingKind::Homeomorphic);
        assert!(EmbeddingKind::Topological > EmbeddingKind::Minor);
    }
}
