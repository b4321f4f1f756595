//! Immutable node-labelled rooted trees.
//!
//! A [`RootedTree`] is validated once at construction and never mutated
//! afterwards. Nodes are addressed by [`NodeId`], a dense index assigned in
//! ascending lexicographic order of the labels, so iterating `0..len()`
//! always visits nodes in label order.
//!
//! Sizes are measured in nodes throughout the crate. For non-empty trees this
//! orders trees exactly like the arc count does, since `|V| = |E| + 1`.

use std::collections::BTreeSet;

use rustc_hash::FxHashMap;
use std::fmt;

use thiserror::Error;

/// Dense index of a node inside one [`RootedTree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(u32::try_from(i).expect("node index overflows u32"))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("empty node label")]
    EmptyLabel,
    #[error("label `{0}` contains whitespace")]
    InvalidLabel(String),
    #[error("duplicate node label `{0}`")]
    DuplicateLabel(String),
    #[error("arc ({0}, {1}) references an undeclared node")]
    DanglingArc(String, String),
    #[error("node `{0}` has more than one parent")]
    NodeInDegreeExceeded(String),
    #[error("several nodes without parent: {0:?}")]
    MultipleRoots(Vec<String>),
    #[error("declared root `{0}` has a parent")]
    RootHasParent(String),
    #[error("the arcs contain a cycle through `{0}`")]
    CycleDetected(String),
    #[error("node `{0}` is not reachable from the root")]
    UnreachableNode(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("node sequence is not a path of the tree")]
    NotAPath,
    #[error("paths do not share their origin")]
    OriginMismatch,
    #[error("path is trivial")]
    TrivialPath,
}

/// A path `(v0, ..., vk)` along arcs of some tree. `k = 0` is the trivial path.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path(Vec<NodeId>);

impl Path {
    pub fn nodes(&self) -> &[NodeId] {
        &self.0
    }

    pub fn origin(&self) -> NodeId {
        self.0[0]
    }

    pub fn end(&self) -> NodeId {
        *self.0.last().expect("paths are never empty")
    }

    /// Number of arcs.
    pub fn len(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_trivial(&self) -> bool {
        self.0.len() == 1
    }

    /// A trivial path has no arcs.
    pub fn is_empty(&self) -> bool {
        self.is_trivial()
    }

    pub fn intermediates(&self) -> &[NodeId] {
        if self.0.len() <= 2 {
            &[]
        } else {
            &self.0[1..self.0.len() - 1]
        }
    }
}

#[derive(Clone)]
pub struct RootedTree {
    labels: Vec<String>,
    index: FxHashMap<String, NodeId>,
    parent: Vec<Option<NodeId>>,
    // children of `v` are `child_list[child_start[v]..child_start[v + 1]]`
    child_start: Vec<u32>,
    child_list: Vec<NodeId>,
    depth: Vec<u32>,
    // Euler interval: `a` is an ancestor-or-self of `b` iff
    // tin[a] <= tin[b] && tout[b] <= tout[a].
    tin: Vec<u32>,
    tout: Vec<u32>,
    preorder: Vec<NodeId>,
    root: Option<NodeId>,
}

impl fmt::Debug for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arcs: Vec<(&str, &str)> = self
            .arcs()
            .map(|(a, b)| (self.label(a), self.label(b)))
            .collect();
        f.debug_struct("RootedTree")
            .field("root", &self.root.map(|r| self.label(r)))
            .field("arcs", &arcs)
            .finish()
    }
}

impl PartialEq for RootedTree {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other) || (self.labels == other.labels && self.parent == other.parent)
    }
}

impl Eq for RootedTree {}

fn check_label(label: &str) -> Result<(), TreeError> {
    if label.is_empty() {
        return Err(TreeError::EmptyLabel);
    }
    if label.chars().any(char::is_whitespace) {
        return Err(TreeError::InvalidLabel(label.to_owned()));
    }
    Ok(())
}

impl RootedTree {
    /// The tree with no nodes.
    pub fn empty() -> Self {
        RootedTree {
            labels: Vec::new(),
            index: FxHashMap::default(),
            parent: Vec::new(),
            child_start: vec![0],
            child_list: Vec::new(),
            depth: Vec::new(),
            tin: Vec::new(),
            tout: Vec::new(),
            preorder: Vec::new(),
            root: None,
        }
    }

    pub fn singleton(label: impl Into<String>) -> Result<Self, TreeError> {
        Self::from_parts([label.into()], Vec::<(String, String)>::new(), None)
    }

    /// Validates a candidate node set, arc set and optional root.
    ///
    /// Repeated arcs collapse (arcs form a set). When `root` is `None` the root
    /// is inferred as the unique node without parent.
    pub fn from_parts<N, A, S>(nodes: N, arcs: A, root: Option<String>) -> Result<Self, TreeError>
    where
        N: IntoIterator<Item = S>,
        S: Into<String>,
        A: IntoIterator<Item = (S, S)>,
    {
        let mut labels: Vec<String> = nodes.into_iter().map(Into::into).collect();
        for l in &labels {
            check_label(l)?;
        }
        labels.sort_unstable();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(TreeError::DuplicateLabel(w[0].clone()));
        }
        let index: FxHashMap<String, NodeId> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), NodeId::from(i)))
            .collect();

        let mut arc_ids = Vec::new();
        for (a, b) in arcs {
            let (a, b): (String, String) = (a.into(), b.into());
            let (Some(&ia), Some(&ib)) = (index.get(&a), index.get(&b)) else {
                return Err(TreeError::DanglingArc(a, b));
            };
            arc_ids.push((ia, ib));
        }
        let root = match root {
            Some(r) => Some(
                *index
                    .get(&r)
                    .ok_or_else(|| TreeError::UnknownNode(r.clone()))?,
            ),
            None => None,
        };
        Self::from_ids(labels, index, arc_ids, root)
    }

    /// Same as [`RootedTree::from_parts`] for callers that already hold a
    /// parent table over their own node numbering. `labels[i]` names node `i`
    /// of the caller's numbering.
    pub fn from_parent_table(
        labels: Vec<String>,
        parents: &[Option<usize>],
    ) -> Result<Self, TreeError> {
        Ok(Self::from_parent_table_ranked(labels, parents)?.0)
    }

    /// As [`RootedTree::from_parent_table`], also returning the id given to
    /// each entry of the table.
    pub(crate) fn from_parent_table_ranked(
        labels: Vec<String>,
        parents: &[Option<usize>],
    ) -> Result<(Self, Vec<NodeId>), TreeError> {
        assert_eq!(labels.len(), parents.len());
        for l in &labels {
            check_label(l)?;
        }
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.sort_unstable_by(|&a, &b| labels[a].cmp(&labels[b]));
        let mut rank = vec![NodeId(0); labels.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = NodeId::from(r);
        }
        let mut labels: Vec<Option<String>> = labels.into_iter().map(Some).collect();
        let sorted: Vec<String> = order.iter().map(|&i| labels[i].take().unwrap()).collect();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(TreeError::DuplicateLabel(w[0].clone()));
        }
        let index = sorted
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), NodeId::from(i)))
            .collect();
        let arcs = parents
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.map(|p| (rank[p], rank[c])))
            .collect();
        Ok((Self::from_ids(sorted, index, arcs, None)?, rank))
    }

    fn from_ids(
        labels: Vec<String>,
        index: FxHashMap<String, NodeId>,
        mut arcs: Vec<(NodeId, NodeId)>,
        declared_root: Option<NodeId>,
    ) -> Result<Self, TreeError> {
        let n = labels.len();
        arcs.sort_unstable();
        arcs.dedup();

        let mut parent: Vec<Option<NodeId>> = vec![None; n];
        let mut child_start = vec![0u32; n + 1];
        let mut child_list = Vec::with_capacity(arcs.len());
        for &(a, b) in &arcs {
            if a == b {
                return Err(TreeError::CycleDetected(labels[a.index()].clone()));
            }
            if parent[b.index()].is_some() {
                return Err(TreeError::NodeInDegreeExceeded(labels[b.index()].clone()));
            }
            parent[b.index()] = Some(a);
            child_start[a.index() + 1] += 1;
            child_list.push(b);
        }
        for v in 0..n {
            child_start[v + 1] += child_start[v];
        }
        let children = |v: NodeId| {
            &child_list[child_start[v.index()] as usize..child_start[v.index() + 1] as usize]
        };
        // arcs were sorted by (parent, child) so each child list is sorted

        if n == 0 {
            return Ok(Self::empty());
        }

        let parentless: Vec<NodeId> = (0..n)
            .map(NodeId::from)
            .filter(|v| parent[v.index()].is_none())
            .collect();
        let root = match declared_root {
            Some(r) => {
                if parent[r.index()].is_some() {
                    return Err(TreeError::RootHasParent(labels[r.index()].clone()));
                }
                if let Some(&other) = parentless.iter().find(|&&v| v != r) {
                    return Err(TreeError::UnreachableNode(labels[other.index()].clone()));
                }
                r
            }
            None => match parentless.as_slice() {
                [r] => *r,
                [] => {
                    // every node has a parent: following parents must loop
                    let v = find_cycle(&parent, NodeId(0));
                    return Err(TreeError::CycleDetected(labels[v.index()].clone()));
                }
                many => {
                    return Err(TreeError::MultipleRoots(
                        many.iter().map(|v| labels[v.index()].clone()).collect(),
                    ))
                }
            },
        };

        let mut depth = vec![0u32; n];
        let mut tin = vec![0u32; n];
        let mut tout = vec![0u32; n];
        let mut preorder = Vec::with_capacity(n);
        let mut clock = 0u32;
        // iterative DFS: (node, next child index)
        let mut stack: Vec<(NodeId, usize)> = vec![(root, 0)];
        tin[root.index()] = clock;
        clock += 1;
        preorder.push(root);
        while let Some(top) = stack.last_mut() {
            let (v, ref mut next) = *top;
            if let Some(&c) = children(v).get(*next) {
                *next += 1;
                depth[c.index()] = depth[v.index()] + 1;
                tin[c.index()] = clock;
                clock += 1;
                preorder.push(c);
                stack.push((c, 0));
            } else {
                tout[v.index()] = clock;
                clock += 1;
                stack.pop();
            }
        }
        if preorder.len() != n {
            let mut seen = vec![false; n];
            for v in &preorder {
                seen[v.index()] = true;
            }
            let missing = NodeId::from(seen.iter().position(|s| !s).unwrap());
            let v = find_cycle(&parent, missing);
            return Err(TreeError::CycleDetected(labels[v.index()].clone()));
        }

        Ok(RootedTree {
            labels,
            index,
            parent,
            child_start,
            child_list,
            depth,
            tin,
            tout,
            preorder,
            root: Some(root),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of arcs.
    pub fn arc_count(&self) -> usize {
        self.len().saturating_sub(1)
    }

    pub fn root(&self) -> Option<NodeId> {
        self.root
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn id(&self, label: &str) -> Result<NodeId, TreeError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| TreeError::UnknownNode(label.to_owned()))
    }

    pub fn contains_label(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    /// Nodes in ascending label order.
    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        (0..self.len()).map(NodeId::from)
    }

    /// Arcs sorted by `(parent, child)`.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes()
            .flat_map(move |p| self.children(p).iter().map(move |&c| (p, c)))
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v.index()]
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.child_list
            [self.child_start[v.index()] as usize..self.child_start[v.index() + 1] as usize]
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        (self.child_start[v.index() + 1] - self.child_start[v.index()]) as usize
    }

    pub fn depth(&self, v: NodeId) -> usize {
        self.depth[v.index()] as usize
    }

    /// Nodes in depth-first preorder from the root; children visited in label order.
    pub fn preorder(&self) -> &[NodeId] {
        &self.preorder
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.out_degree(v) == 0
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes().filter(|&v| self.is_leaf(v)).count()
    }

    pub fn max_out_degree(&self) -> usize {
        self.nodes().map(|v| self.out_degree(v)).max().unwrap_or(0)
    }

    /// Number of arcs on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0) as usize
    }

    /// Number of nodes in the subtree rooted at `v`, including `v`.
    pub fn subtree_size(&self, v: NodeId) -> usize {
        // tin/tout each tick once per node inside the interval
        (self.tout[v.index()] - self.tin[v.index()]).div_ceil(2) as usize
    }

    /// `a` is `b` or lies on the path from the root to `b`.
    #[inline]
    pub fn is_ancestor_or_self(&self, a: NodeId, b: NodeId) -> bool {
        self.tin[a.index()] <= self.tin[b.index()] && self.tout[b.index()] <= self.tout[a.index()]
    }

    #[inline]
    pub fn is_proper_ancestor(&self, a: NodeId, b: NodeId) -> bool {
        a != b && self.is_ancestor_or_self(a, b)
    }

    /// There is a path `a ⇝ b` or `b ⇝ a`.
    pub fn path_connected(&self, a: NodeId, b: NodeId) -> bool {
        self.is_ancestor_or_self(a, b) || self.is_ancestor_or_self(b, a)
    }

    fn check_id(&self, v: NodeId) -> Result<(), TreeError> {
        if v.index() < self.len() {
            Ok(())
        } else {
            Err(TreeError::UnknownNode(v.to_string()))
        }
    }

    /// The unique path from `a` to `b`, or `None` when `a` is not an ancestor of `b`.
    pub fn path_between(&self, a: NodeId, b: NodeId) -> Result<Option<Path>, TreeError> {
        self.check_id(a)?;
        self.check_id(b)?;
        if !self.is_ancestor_or_self(a, b) {
            return Ok(None);
        }
        let mut nodes = vec![b];
        let mut cur = b;
        while cur != a {
            cur = self.parent[cur.index()].expect("ancestor reached before the root");
            nodes.push(cur);
        }
        nodes.reverse();
        Ok(Some(Path(nodes)))
    }

    /// Checks that `nodes` follows arcs of this tree.
    pub fn path(&self, nodes: Vec<NodeId>) -> Result<Path, TreeError> {
        if nodes.is_empty() {
            return Err(TreeError::NotAPath);
        }
        for &v in &nodes {
            self.check_id(v)?;
        }
        if nodes
            .windows(2)
            .any(|w| self.parent[w[1].index()] != Some(w[0]))
        {
            return Err(TreeError::NotAPath);
        }
        Ok(Path(nodes))
    }

    pub fn path_from_labels(&self, labels: &[&str]) -> Result<Path, TreeError> {
        let ids = labels
            .iter()
            .map(|l| self.id(l))
            .collect::<Result<Vec<_>, _>>()?;
        self.path(ids)
    }

    /// Every intermediate node of `p` has out-degree 1.
    pub fn is_elementary(&self, p: &Path) -> bool {
        p.intermediates().iter().all(|&v| self.out_degree(v) == 1)
    }

    /// Least common ancestor. For path-connected nodes this is the shallower
    /// of the two, i.e. the origin of the connecting path.
    pub fn least_common_ancestor(&self, b: NodeId, c: NodeId) -> Result<NodeId, TreeError> {
        self.check_id(b)?;
        self.check_id(c)?;
        let (mut x, mut y) = (b, c);
        while self.depth[x.index()] > self.depth[y.index()] {
            x = self.parent[x.index()].unwrap();
        }
        while self.depth[y.index()] > self.depth[x.index()] {
            y = self.parent[y.index()].unwrap();
        }
        while x != y {
            x = self.parent[x.index()].unwrap();
            y = self.parent[y.index()].unwrap();
        }
        Ok(x)
    }

    /// Two non-trivial paths with a common origin diverge iff that origin is
    /// their only shared node, i.e. their first arcs differ.
    pub fn paths_diverge(&self, p: &Path, q: &Path) -> Result<bool, TreeError> {
        if p.origin() != q.origin() {
            return Err(TreeError::OriginMismatch);
        }
        if p.is_trivial() || q.is_trivial() {
            return Err(TreeError::TrivialPath);
        }
        Ok(p.nodes()[1] != q.nodes()[1])
    }

    /// Arcs as label pairs, sorted.
    pub fn arc_labels(&self) -> BTreeSet<(String, String)> {
        self.arcs()
            .map(|(a, b)| (self.label(a).to_owned(), self.label(b).to_owned()))
            .collect()
    }

    /// Same shape with every label passed through `rename`.
    pub fn relabel(&self, mut rename: impl FnMut(&str) -> String) -> Result<Self, TreeError> {
        let labels: Vec<String> = self.labels.iter().map(|l| rename(l)).collect();
        let parents: Vec<Option<usize>> =
            self.parent.iter().map(|p| p.map(NodeId::index)).collect();
        Self::from_parent_table(labels, &parents)
    }
}

fn find_cycle(parent: &[Option<NodeId>], start: NodeId) -> NodeId {
    // walk n steps up: we are then guaranteed to be on the cycle
    let mut v = start;
    for _ in 0..parent.len() {
        match parent[v.index()] {
            Some(p) => v = p,
            None => return v,
        }
    }
    v
}

/// Builds a tree from a node set, an arc set and an optional root, rejecting
/// anything that is not a rooted tree.
pub fn validate_tree<S: Into<String>>(
    nodes: impl IntoIterator<Item = S>,
    arcs: impl IntoIterator<Item = (S, S)>,
    root: Option<String>,
) -> Result<RootedTree, TreeError> {
    RootedTree::from_parts(nodes, arcs, root)
}
