//! Intersection of two subtrees of a common supertree, and its universal
//! property.

use std::sync::Arc;

use thiserror::Error;

use crate::embedding::{left_factor, Embedding, EmbeddingError, EmbeddingKind};
use crate::tree::{NodeId, RootedTree, TreeError};

/// Label of the root added when the intersection is a forest.
pub const FRESH_ROOT: &str = "⊥";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PullbackError {
    #[error("embedding kinds differ: {0} vs {1}")]
    KindMismatch(EmbeddingKind, EmbeddingKind),
    #[error("invalid cospan: {0}")]
    InvalidCospan(String),
    #[error("probe does not commute with the cospan")]
    NonCommutingProbe,
    #[error("the intersection is a forest; minor cospans of this shape have no pullback")]
    MinorForestUnsupported,
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Two embeddings into a common tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CospanResult {
    pub apex: Arc<RootedTree>,
    pub left: Embedding,
    pub right: Embedding,
}

impl CospanResult {
    pub fn new(left: Embedding, right: Embedding) -> Result<Self, PullbackError> {
        if left.kind() != right.kind() {
            return Err(PullbackError::KindMismatch(left.kind(), right.kind()));
        }
        if **left.target() != **right.target() {
            return Err(PullbackError::InvalidCospan(
                "the two embeddings have different targets".into(),
            ));
        }
        Ok(CospanResult {
            apex: left.target().clone(),
            left,
            right,
        })
    }

    pub fn kind(&self) -> EmbeddingKind {
        self.left.kind()
    }

    fn check(&self) -> Result<(), PullbackError> {
        if self.left.kind() != self.right.kind() {
            return Err(PullbackError::KindMismatch(
                self.left.kind(),
                self.right.kind(),
            ));
        }
        if **self.left.target() != *self.apex || **self.right.target() != *self.apex {
            return Err(PullbackError::InvalidCospan(
                "embedding targets differ from the apex".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Tree,
    Forest,
}

#[derive(Debug, Clone)]
pub struct IntersectionResult {
    /// Common image nodes, in apex coordinates, sorted.
    pub graph_nodes: Vec<NodeId>,
    /// Arcs of the intersection graph, in apex coordinates, sorted.
    pub graph_arcs: Vec<(NodeId, NodeId)>,
    pub shape: Shape,
    /// The intersection itself, or the intersection with an added root when
    /// it is a forest.
    pub tree: Arc<RootedTree>,
    pub fresh_root: Option<NodeId>,
    pub left_inclusion: Embedding,
    pub right_inclusion: Embedding,
    /// For each node of `tree`, its labels in the two cospan legs' sources.
    pub provenance: Vec<(String, String)>,
}

impl IntersectionResult {
    pub fn kind(&self) -> EmbeddingKind {
        self.left_inclusion.kind()
    }

    /// Node of `tree` sitting over an apex node, if any.
    pub fn node_over(&self, apex_node: NodeId, cospan: &CospanResult) -> Option<NodeId> {
        let inv = self.left_inclusion.preimages();
        let src = cospan.left.preimages()[apex_node.index()]?;
        inv[src.index()]
    }
}

/// For every node of `t` the nearest proper ancestor among `marked`.
fn nearest_marked_ancestor(t: &RootedTree, marked: &[bool]) -> Vec<Option<NodeId>> {
    let mut near = vec![None; t.len()];
    for &v in t.preorder() {
        if let Some(p) = t.parent(v) {
            near[v.index()] = if marked[p.index()] {
                Some(p)
            } else {
                near[p.index()]
            };
        }
    }
    near
}

/// The intersection of the two legs' images, with inclusions into both legs.
pub fn intersection(c: &CospanResult) -> Result<IntersectionResult, PullbackError> {
    c.check()?;
    let kind = c.kind();
    let (t1, t2) = (c.left.source().clone(), c.right.source().clone());
    let pre1 = c.left.preimages();
    let pre2 = c.right.preimages();

    // common nodes, in T₁ numbering
    let common1: Vec<bool> = t1
        .nodes()
        .map(|v| pre2[c.left.apply(v).index()].is_some())
        .collect();
    let common2: Vec<bool> = t2
        .nodes()
        .map(|v| pre1[c.right.apply(v).index()].is_some())
        .collect();
    let near1 = nearest_marked_ancestor(&t1, &common1);
    let near2 = nearest_marked_ancestor(&t2, &common2);

    let members: Vec<NodeId> = t1.nodes().filter(|v| common1[v.index()]).collect();
    let mut slot = vec![usize::MAX; t1.len()];
    for (i, v) in members.iter().enumerate() {
        slot[v.index()] = i;
    }
    let mut parents: Vec<Option<usize>> = Vec::with_capacity(members.len() + 1);
    let mut graph_arcs = Vec::new();
    for &v in &members {
        let w = pre2[c.left.apply(v).index()].unwrap();
        let from1 = near1[v.index()].map(|p| c.left.apply(p));
        let from2 = near2[w.index()].map(|p| c.right.apply(p));
        match (from1, from2) {
            (Some(a), Some(b)) if a == b => {
                let p1 = near1[v.index()].unwrap();
                parents.push(Some(slot[p1.index()]));
                graph_arcs.push((a, c.left.apply(v)));
            }
            _ => parents.push(None),
        }
    }
    let mut graph_nodes: Vec<NodeId> = members.iter().map(|&v| c.left.apply(v)).collect();
    graph_nodes.sort();
    graph_arcs.sort();

    let mut labels: Vec<String> = members.iter().map(|&v| t1.label(v).to_owned()).collect();
    let mut provenance: Vec<(String, String)> = members
        .iter()
        .map(|&v| {
            let w = pre2[c.left.apply(v).index()].unwrap();
            (t1.label(v).to_owned(), t2.label(w).to_owned())
        })
        .collect();
    let mut to1: Vec<NodeId> = members.clone();
    let mut to2: Vec<NodeId> = members
        .iter()
        .map(|&v| pre2[c.left.apply(v).index()].unwrap())
        .collect();

    let roots = parents.iter().filter(|p| p.is_none()).count();
    let shape = if roots <= 1 {
        Shape::Tree
    } else {
        Shape::Forest
    };
    let tree_kind = match shape {
        Shape::Tree => kind,
        Shape::Forest => {
            if kind != EmbeddingKind::Minor {
                return Err(PullbackError::Internal(format!(
                    "intersection of a {kind} cospan is not a tree"
                )));
            }
            let fresh = members.len();
            for p in parents.iter_mut() {
                if p.is_none() {
                    *p = Some(fresh);
                }
            }
            parents.push(None);
            labels.push(FRESH_ROOT.to_owned());
            provenance.push((FRESH_ROOT.to_owned(), FRESH_ROOT.to_owned()));
            to1.push(t1.root().unwrap());
            to2.push(t2.root().unwrap());
            EmbeddingKind::Minor
        }
    };

    // node i of the caller numbering becomes `rank[i]` after label sorting
    let tree = Arc::new(RootedTree::from_parent_table(labels.clone(), &parents)?);
    let mut map1 = vec![NodeId(0); tree.len()];
    let mut map2 = vec![NodeId(0); tree.len()];
    let mut prov = vec![(String::new(), String::new()); tree.len()];
    for (i, l) in labels.iter().enumerate() {
        let id = tree.id(l)?;
        map1[id.index()] = to1[i];
        map2[id.index()] = to2[i];
        prov[id.index()] = provenance[i].clone();
    }
    let fresh_root = (shape == Shape::Forest).then(|| tree.id(FRESH_ROOT).unwrap());
    let internal = |e: EmbeddingError| {
        PullbackError::Internal(format!("intersection inclusion is not an embedding: {e}"))
    };
    let left_inclusion = Embedding::new(tree.clone(), t1, map1, tree_kind).map_err(internal)?;
    let right_inclusion = Embedding::new(tree.clone(), t2, map2, tree_kind).map_err(internal)?;
    Ok(IntersectionResult {
        graph_nodes,
        graph_arcs,
        shape,
        tree,
        fresh_root,
        left_inclusion,
        right_inclusion,
        provenance: prov,
    })
}

/// The unique embedding `g: X -> T_p` with `ι₁ ∘ g = g₁` and `ι₂ ∘ g = g₂`.
pub fn pullback_mediator(
    c: &CospanResult,
    r: &IntersectionResult,
    g1: &Embedding,
    g2: &Embedding,
) -> Result<Embedding, PullbackError> {
    c.check()?;
    if r.shape == Shape::Forest {
        return Err(PullbackError::MinorForestUnsupported);
    }
    let kind = c.kind();
    for k in [g1.kind(), g2.kind()] {
        if k != kind {
            return Err(PullbackError::KindMismatch(kind, k));
        }
    }
    if **g1.source() != **g2.source()
        || **g1.target() != **c.left.source()
        || **g2.target() != **c.right.source()
    {
        return Err(PullbackError::InvalidCospan(
            "probe does not fit the cospan".into(),
        ));
    }
    let x = g1.source();
    if x.nodes()
        .any(|v| c.left.apply(g1.apply(v)) != c.right.apply(g2.apply(v)))
    {
        return Err(PullbackError::NonCommutingProbe);
    }
    let inv = r.left_inclusion.preimages();
    let map: Vec<NodeId> = x
        .nodes()
        .map(|v| {
            inv[g1.apply(v).index()].ok_or_else(|| {
                PullbackError::Internal("commuting probe leaves the intersection".into())
            })
        })
        .collect::<Result<_, _>>()?;
    let g = left_factor(&map, &r.left_inclusion, g1, kind)?;
    if x.nodes()
        .any(|v| r.right_inclusion.apply(g.apply(v)) != g2.apply(v))
    {
        return Err(PullbackError::Internal(
            "mediator does not commute with ι₂".into(),
        ));
    }
    Ok(g)
}
