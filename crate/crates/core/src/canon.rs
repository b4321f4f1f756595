//! Label-independent canonical forms (AHU) and enumeration of unlabelled
//! rooted trees.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use crate::tree::{NodeId, RootedTree};

/// Encoding of the empty tree.
pub const EMPTY_ENCODING: &[u8] = b"-";

/// AHU encoding: every node is `(` followed by the sorted encodings of its
/// children and `)`. Two trees get equal encodings iff they are isomorphic
/// as unlabelled rooted trees.
pub fn canonical_encoding(t: &RootedTree) -> Vec<u8> {
    let Some(root) = t.root() else {
        return EMPTY_ENCODING.to_vec();
    };
    let mut enc: Vec<Option<Vec<u8>>> = vec![None; t.len()];
    for &v in t.preorder().iter().rev() {
        let mut parts: Vec<Vec<u8>> = t
            .children(v)
            .iter()
            .map(|c| enc[c.index()].take().unwrap())
            .collect();
        parts.sort_unstable();
        let mut s = Vec::with_capacity(2 + parts.iter().map(Vec::len).sum::<usize>());
        s.push(b'(');
        for p in parts {
            s.extend_from_slice(&p);
        }
        s.push(b')');
        enc[v.index()] = Some(s);
    }
    enc[root.index()].take().unwrap()
}

/// Isomorphism test that interns child-code multisets in a dictionary shared
/// by both trees, so it does not build the (possibly quadratic) byte
/// encodings. Agrees with comparing [`canonical_encoding`]s.
pub fn trees_isomorphic(a: &RootedTree, b: &RootedTree) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let (Some(ra), Some(rb)) = (a.root(), b.root()) else {
        return true;
    };
    let mut dict: HashMap<Vec<u32>, u32> = HashMap::new();
    let ca = ahu_codes(a, &mut dict);
    let cb = ahu_codes(b, &mut dict);
    ca[ra.index()] == cb[rb.index()]
}

fn ahu_codes(t: &RootedTree, dict: &mut HashMap<Vec<u32>, u32>) -> Vec<u32> {
    let mut code = vec![0u32; t.len()];
    for &v in t.preorder().iter().rev() {
        let mut key: Vec<u32> = t.children(v).iter().map(|c| code[c.index()]).collect();
        key.sort_unstable();
        let next = dict.len() as u32;
        code[v.index()] = *dict.entry(key).or_insert(next);
    }
    code
}

/// Children of every node reordered by canonical encoding, so that a preorder
/// walk yields the same sequence for isomorphic trees.
fn canonical_children(t: &RootedTree) -> Vec<Vec<NodeId>> {
    let mut enc: Vec<Vec<u8>> = vec![Vec::new(); t.len()];
    let mut kids: Vec<Vec<NodeId>> = vec![Vec::new(); t.len()];
    for &v in t.preorder().iter().rev() {
        let mut cs: Vec<NodeId> = t.children(v).to_vec();
        cs.sort_by(|x, y| enc[x.index()].cmp(&enc[y.index()]));
        let mut s = vec![b'('];
        for c in &cs {
            s.extend_from_slice(&enc[c.index()]);
        }
        s.push(b')');
        enc[v.index()] = s;
        kids[v.index()] = cs;
    }
    kids
}

/// Label used for node `i` of generated shapes. Zero padded so that label
/// order equals preorder for the sizes we enumerate.
pub fn shape_label(i: usize) -> String {
    format!("v{i:02}")
}

/// Relabels `t` as `v00, v01, ...` in canonical preorder.
pub fn canonical_form(t: &RootedTree) -> RootedTree {
    let Some(root) = t.root() else {
        return RootedTree::empty();
    };
    let kids = canonical_children(t);
    let mut order = Vec::with_capacity(t.len());
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        order.push(v);
        stack.extend(kids[v.index()].iter().rev());
    }
    let mut pos = vec![0usize; t.len()];
    for (i, v) in order.iter().enumerate() {
        pos[v.index()] = i;
    }
    let labels = (0..order.len()).map(shape_label).collect();
    let parents: Vec<Option<usize>> = order
        .iter()
        .map(|&v| t.parent(v).map(|p| pos[p.index()]))
        .collect();
    RootedTree::from_parent_table(labels, &parents).expect("relabelling preserves validity")
}

fn decode(enc: &[u8]) -> RootedTree {
    if enc == EMPTY_ENCODING {
        return RootedTree::empty();
    }
    let mut parents: Vec<Option<usize>> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    for &b in enc {
        match b {
            b'(' => {
                parents.push(stack.last().copied());
                stack.push(parents.len() - 1);
            }
            b')' => {
                stack.pop();
            }
            _ => unreachable!("canonical encodings only contain parentheses"),
        }
    }
    let labels = (0..parents.len()).map(shape_label).collect();
    RootedTree::from_parent_table(labels, &parents).expect("well-formed encoding")
}

type Catalog = Vec<Arc<Vec<Arc<RootedTree>>>>;

fn catalog() -> &'static Mutex<Catalog> {
    static CATALOG: OnceLock<Mutex<Catalog>> = OnceLock::new();
    CATALOG.get_or_init(|| Mutex::new(Vec::new()))
}

/// All unlabelled rooted trees with exactly `n` nodes, one per isomorphism
/// class, sorted by canonical encoding and labelled in canonical preorder.
///
/// Results are memoised; the counts follow OEIS A000081 (1, 1, 1, 2, 4, 9,
/// 20, 48, 115, 286, ...).
pub fn unlabelled_trees(n: usize) -> Arc<Vec<Arc<RootedTree>>> {
    let mut cat = catalog().lock().unwrap();
    while cat.len() <= n {
        let k = cat.len();
        let encs: BTreeSet<Vec<u8>> = match k {
            0 => BTreeSet::from([EMPTY_ENCODING.to_vec()]),
            1 => BTreeSet::from([b"()".to_vec()]),
            _ => cat[k - 1]
                .iter()
                .flat_map(|t| {
                    t.nodes()
                        .map(|v| {
                            let mut labels: Vec<String> = t.labels().to_vec();
                            labels.push("zz".into());
                            let mut parents: Vec<Option<usize>> =
                                t.nodes().map(|u| t.parent(u).map(NodeId::index)).collect();
                            parents.push(Some(v.index()));
                            let grown = RootedTree::from_parent_table(labels, &parents)
                                .expect("adding a leaf keeps a tree");
                            canonical_encoding(&grown)
                        })
                        .collect::<Vec<_>>()
                })
                .collect(),
        };
        let trees: Vec<Arc<RootedTree>> = encs.iter().map(|e| Arc::new(decode(e))).collect();
        cat.push(Arc::new(trees));
    }
    cat[n].clone()
}
