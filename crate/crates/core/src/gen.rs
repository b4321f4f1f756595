//! Seeded random trees and embeddings for tests and benchmarks.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::{Embedding, EmbeddingKind};
use crate::pullback::CospanResult;
use crate::tree::{NodeId, RootedTree};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random recursive tree on `n` nodes labelled `{prefix}0 ..` in random order.
pub fn random_tree(rng: &mut impl Rng, n: usize, prefix: &str) -> RootedTree {
    let mut labels: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
    labels.shuffle(rng);
    let parents: Vec<Option<usize>> = (0..n)
        .map(|i| (i > 0).then(|| rng.gen_range(0..i)))
        .collect();
    RootedTree::from_parent_table(labels, &parents).expect("recursive trees are trees")
}

pub fn path_tree(n: usize, prefix: &str) -> RootedTree {
    let parents: Vec<Option<usize>> = (0..n).map(|i| i.checked_sub(1)).collect();
    RootedTree::from_parent_table((0..n).map(|i| format!("{prefix}{i}")).collect(), &parents)
        .unwrap()
}

pub fn star_tree(n: usize, prefix: &str) -> RootedTree {
    let parents: Vec<Option<usize>> = (0..n).map(|i| (i > 0).then_some(0)).collect();
    RootedTree::from_parent_table((0..n).map(|i| format!("{prefix}{i}")).collect(), &parents)
        .unwrap()
}

/// Adds to `chosen` whatever the kind needs for the induced map to be an
/// embedding of that kind.
fn close(t: &RootedTree, chosen: &mut BTreeSet<NodeId>, kind: EmbeddingKind) {
    if chosen.is_empty() {
        return;
    }
    match kind {
        EmbeddingKind::Minor => {
            let mut it = chosen.iter().copied();
            let first = it.next().unwrap();
            let top = it.fold(first, |acc, v| t.least_common_ancestor(acc, v).unwrap());
            chosen.insert(top);
        }
        EmbeddingKind::Topological | EmbeddingKind::Homeomorphic => loop {
            let before = chosen.len();
            let nodes: Vec<NodeId> = chosen.iter().copied().collect();
            for (i, &a) in nodes.iter().enumerate() {
                for &b in &nodes[i + 1..] {
                    chosen.insert(t.least_common_ancestor(a, b).unwrap());
                }
            }
            if kind == EmbeddingKind::Homeomorphic {
                let nodes: Vec<NodeId> = chosen.iter().copied().collect();
                let top = *nodes.iter().min_by_key(|&&v| t.depth(v)).unwrap();
                for &v in nodes.iter().filter(|&&v| v != top) {
                    let mut u = t.parent(v);
                    while let Some(w) = u {
                        if chosen.contains(&w) {
                            break;
                        }
                        if t.out_degree(w) != 1 {
                            chosen.insert(w);
                        }
                        u = t.parent(w);
                    }
                }
            }
            if chosen.len() == before {
                break;
            }
        },
        EmbeddingKind::Isomorphic => {
            close(t, chosen, EmbeddingKind::Minor);
            let top = *chosen.iter().min_by_key(|&&v| t.depth(v)).unwrap();
            let nodes: Vec<NodeId> = chosen.iter().copied().collect();
            for v in nodes {
                let mut u = v;
                while u != top {
                    u = t.parent(u).unwrap();
                    chosen.insert(u);
                }
            }
        }
    }
}

/// A subtree of `t` on about `size` nodes (more if the kind forces it), with
/// its `kind` embedding into `t`. Nodes are relabelled `{prefix}0 ..` randomly.
pub fn random_subtree_embedding(
    rng: &mut impl Rng,
    t: &Arc<RootedTree>,
    kind: EmbeddingKind,
    size: usize,
    prefix: &str,
) -> Embedding {
    let mut all: Vec<NodeId> = t.nodes().collect();
    all.shuffle(rng);
    let mut chosen: BTreeSet<NodeId> = all.into_iter().take(size.min(t.len())).collect();
    close(t, &mut chosen, kind);
    induced_embedding(rng, t, &chosen, kind, prefix)
}

fn induced_embedding(
    rng: &mut impl Rng,
    t: &Arc<RootedTree>,
    chosen: &BTreeSet<NodeId>,
    kind: EmbeddingKind,
    prefix: &str,
) -> Embedding {
    let members: Vec<NodeId> = chosen.iter().copied().collect();
    let mut slot = vec![usize::MAX; t.len()];
    for (i, v) in members.iter().enumerate() {
        slot[v.index()] = i;
    }
    let parents: Vec<Option<usize>> = members
        .iter()
        .map(|&v| {
            let mut u = t.parent(v);
            while let Some(w) = u {
                if slot[w.index()] != usize::MAX {
                    return Some(slot[w.index()]);
                }
                u = t.parent(w);
            }
            None
        })
        .collect();
    let mut labels: Vec<String> = (0..members.len()).map(|i| format!("{prefix}{i}")).collect();
    labels.shuffle(rng);
    let s = Arc::new(RootedTree::from_parent_table(labels.clone(), &parents).unwrap());
    let mut map = vec![NodeId(0); s.len()];
    for (i, l) in labels.iter().enumerate() {
        map[s.id(l).unwrap().index()] = members[i];
    }
    Embedding::new(s, t.clone(), map, kind).expect("closed subsets induce embeddings")
}

/// Random tree on `n` nodes with two random `kind` subtrees of it.
pub fn random_cospan(rng: &mut impl Rng, n: usize, kind: EmbeddingKind) -> CospanResult {
    let t = Arc::new(random_tree(rng, n, "t"));
    let s1 = rng.gen_range(1..=n);
    let s2 = rng.gen_range(1..=n);
    let f1 = random_subtree_embedding(rng, &t, kind, s1, "a");
    let f2 = random_subtree_embedding(rng, &t, kind, s2, "b");
    CospanResult::new(f1, f2).expect("same target and kind")
}

/// `u` with every arc `(a, b)` replaced by a path `a -> s -> b`, and the
/// homeomorphic embedding of `u` into it.
pub fn subdivide_arcs(u: &Arc<RootedTree>, prefix: &str) -> Embedding {
    let n = u.len();
    let mut labels: Vec<String> = u.labels().to_vec();
    let mut parents: Vec<Option<usize>> = vec![None; n];
    for (a, b) in u.arcs() {
        labels.push(format!("{prefix}{}", b.index()));
        parents.push(Some(a.index()));
        parents[b.index()] = Some(labels.len() - 1);
    }
    let t = Arc::new(RootedTree::from_parent_table(labels, &parents).unwrap());
    let map = u.nodes().map(|v| t.id(u.label(v)).unwrap()).collect();
    Embedding::new(u.clone(), t, map, EmbeddingKind::Homeomorphic).unwrap()
}
