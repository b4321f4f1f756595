use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;

use treespan::embedding::verify_embedding;
use treespan::gen::{random_cospan, random_subtree_embedding, random_tree, rng, subdivide_arcs};
use treespan::pushout::Side;
use treespan::*;

const STRICT: [EmbeddingKind; 3] = [
    EmbeddingKind::Topological,
    EmbeddingKind::Homeomorphic,
    EmbeddingKind::Isomorphic,
];

fn tree(seed: u64, n: usize, prefix: &str) -> Arc<RootedTree> {
    Arc::new(random_tree(&mut rng(seed), n, prefix))
}

fn kind_strategy() -> impl Strategy<Value = EmbeddingKind> {
    prop::sample::select(EmbeddingKind::ALL.to_vec())
}

/// Every injective map from `s` into `t`, as image sequences in lexicographic order.
fn injective_maps(s: usize, t: usize) -> Vec<Vec<NodeId>> {
    fn go(
        s: usize,
        t: usize,
        cur: &mut Vec<NodeId>,
        used: &mut [bool],
        out: &mut Vec<Vec<NodeId>>,
    ) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for v in 0..t {
            if !used[v] {
                used[v] = true;
                cur.push(NodeId::from(v));
                go(s, t, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(s, t, &mut Vec::new(), &mut vec![false; t], &mut out);
    out
}

fn reachable(n: usize, arcs: &BTreeSet<(usize, usize)>, from: usize, to: usize) -> bool {
    let mut out = vec![Vec::new(); n];
    for &(a, b) in arcs {
        out[a].push(b);
    }
    let mut seen = vec![false; n];
    let mut stack = out[from].clone();
    while let Some(v) = stack.pop() {
        if v == to {
            return true;
        }
        if !std::mem::replace(&mut seen[v], true) {
            stack.extend(out[v].iter().copied());
        }
    }
    false
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn serialize_then_parse_is_identity(seed: u64, n in 0usize..30) {
        let t = tree(seed, n, "n");
        let text = serialize_tree(&t);
        prop_assert_eq!(&parse_tree(&text).unwrap(), &*t);
        let noisy: String = text.lines().map(|l| format!("  {l}   # note\n\n")).collect();
        prop_assert_eq!(&parse_tree(&noisy).unwrap(), &*t);
    }

    #[test]
    fn mapping_round_trip(seed: u64, n in 1usize..12, kind in kind_strategy()) {
        let t = tree(seed, n, "t");
        let e = random_subtree_embedding(&mut rng(seed ^ 1), &t, kind, n / 2 + 1, "s");
        let m = e.label_map();
        prop_assert_eq!(parse_mapping(&serialize_mapping(&m)).unwrap(), m);
    }

    #[test]
    fn classification_ignores_labels(seed: u64, n in 1usize..9, kind in kind_strategy(), size in 1usize..6) {
        let t = tree(seed, n, "t");
        let e = random_subtree_embedding(&mut rng(seed ^ 2), &t, kind, size, "s");
        let before = classify_embedding(e.source(), &t, e.map()).unwrap();
        let flip = |l: &str| format!("r{}", l.chars().rev().collect::<String>());
        let s2 = e.source().relabel(flip).unwrap();
        let t2 = t.relabel(flip).unwrap();
        let mut map = vec![NodeId::from(0); s2.len()];
        for v in e.source().nodes() {
            let image = t2.id(&flip(t.label(e.apply(v)))).unwrap();
            map[s2.id(&flip(e.source().label(v))).unwrap().index()] = image;
        }
        prop_assert_eq!(classify_embedding(&s2, &t2, &map).unwrap(), before);
        prop_assert!(before >= Some(kind));
    }

    #[test]
    fn canonical_encoding_is_label_free(seed: u64, n in 0usize..25) {
        let t = tree(seed, n, "a");
        let u = t.relabel(|l| format!("z{}", l.len()) + l).unwrap();
        prop_assert_eq!(canonical_encoding(&t), canonical_encoding(&u));
        prop_assert!(trees_isomorphic(&t, &u));
        let c = canonical_form(&t);
        prop_assert!(trees_isomorphic(&c, &t));
        prop_assert_eq!(canonical_encoding(&c), canonical_encoding(&t));
    }

    #[test]
    fn isomorphism_agrees_with_bijective_isomorphic_embeddings(a: u64, b: u64, n in 1usize..7) {
        let s = tree(a, n, "s");
        let t = tree(b, n, "t");
        let found = !enumerate_embeddings(&s, &t, EmbeddingKind::Isomorphic, 1).unwrap().is_empty();
        prop_assert_eq!(found, trees_isomorphic(&s, &t));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn enumeration_matches_exhaustive_maps(a: u64, b: u64, ns in 0usize..5, nt in 1usize..6, kind in kind_strategy()) {
        let s = tree(a, ns, "s");
        let t = tree(b, nt, "t");
        let got: HashSet<Vec<NodeId>> = enumerate_embeddings(&s, &t, kind, usize::MAX)
            .unwrap()
            .into_iter()
            .map(|e| e.map().to_vec())
            .collect();
        let want: HashSet<Vec<NodeId>> = injective_maps(ns, nt)
            .into_iter()
            .filter(|m| verify_embedding(&s, &t, m, kind).unwrap().holds())
            .collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn pullback_mediator_recovers_probe(seed: u64, n in 1usize..8, k in 0usize..3) {
        let kind = STRICT[k];
        let mut r = rng(seed);
        let c = random_cospan(&mut r, n, kind);
        let p = intersection(&c).unwrap();
        prop_assume!(!p.tree.is_empty());
        let size = r.gen_range(1..=p.tree.len());
        let g = random_subtree_embedding(&mut r, &p.tree, kind, size, "x");
        let g1 = compose(&p.left_inclusion, &g).unwrap();
        let g2 = compose(&p.right_inclusion, &g).unwrap();
        let h = pullback_mediator(&c, &p, &g1, &g2).unwrap();
        prop_assert_eq!(h.map(), g.map());
    }

    #[test]
    fn pushout_mediator_recovers_probe(a: u64, b: u64, n1 in 1usize..6, n2 in 1usize..6, kind in kind_strategy()) {
        let t1 = tree(a, n1, "a");
        let t2 = tree(b, n2, "b");
        let span = lcst_bruteforce(&t1, &t2, &SolveConfig::new(kind)).unwrap();
        let sigma = sum(&span).unwrap();
        let h = if kind == EmbeddingKind::Isomorphic {
            Embedding::identity(sigma.tree.clone(), kind)
        } else {
            subdivide_arcs(&sigma.tree, "s").with_kind(kind).unwrap()
        };
        let h1 = compose(&h, &sigma.left).unwrap();
        let h2 = compose(&h, &sigma.right).unwrap();
        let f = pushout_mediator(&span, &sigma, &h1, &h2).unwrap();
        prop_assert_eq!(f.map(), h.map());
    }

    #[test]
    fn join_paths_reflect_subtree_paths(a: u64, b: u64, n1 in 1usize..7, n2 in 1usize..7, kind in kind_strategy()) {
        let t1 = tree(a, n1, "a");
        let t2 = tree(b, n2, "b");
        let span = lcst_bruteforce(&t1, &t2, &SolveConfig::new(kind)).unwrap();
        let q = join(&span).unwrap();
        let mu = &span.apex;
        for z in mu.nodes() {
            for y in mu.nodes() {
                if z == y {
                    continue;
                }
                let cz = q.class_of(Side::Left, span.left.apply(z));
                let cy = q.class_of(Side::Left, span.left.apply(y));
                prop_assert_eq!(reachable(q.len(), &q.arcs, cz, cy), mu.is_proper_ancestor(z, y));
            }
        }
    }

    #[test]
    fn stronger_kinds_give_smaller_subtrees_and_larger_supertrees(a: u64, b: u64, n1 in 1usize..6, n2 in 1usize..6) {
        let t1 = tree(a, n1, "a");
        let t2 = tree(b, n2, "b");
        let sizes: Vec<(usize, usize)> = EmbeddingKind::ALL
            .iter()
            .map(|&k| {
                let cfg = SolveConfig::new(k);
                (lcst_size(&t1, &t2, &cfg).unwrap(), scst_size(&t1, &t2, &cfg).unwrap())
            })
            .collect();
        for w in sizes.windows(2) {
            prop_assert!(w[1].0 <= w[0].0);
            prop_assert!(w[1].1 >= w[0].1);
        }
    }

    #[test]
    fn counterexamples_replay(seed: u64, n in 2usize..7, k in 0usize..3) {
        let kind = STRICT[k];
        let c = random_cospan(&mut rng(seed), n, kind);
        let (t1, t2) = (c.left.source().clone(), c.right.source().clone());
        let empty = SpanResult::new(Embedding::from_empty(t1, kind), Embedding::from_empty(t2, kind)).unwrap();
        let rep = check_pullback(&c, &empty, 3).unwrap();
        if let Some(cx) = &rep.counterexample {
            prop_assert_eq!(treespan::category::replay_pullback(&c, &empty, cx), Some(cx.mode));
        } else {
            prop_assert!(intersection(&c).unwrap().tree.is_empty());
        }
    }
}

#[test]
fn pushout_counterexample_replays() {
    let k = EmbeddingKind::Isomorphic;
    let p = Arc::new(RootedTree::singleton("p").unwrap());
    let q = Arc::new(RootedTree::singleton("q").unwrap());
    let span = SpanResult::new(
        Embedding::from_empty(p.clone(), k),
        Embedding::from_empty(q.clone(), k),
    )
    .unwrap();
    let z = Arc::new(RootedTree::singleton("z").unwrap());
    let leg = |s: &Arc<RootedTree>| {
        Embedding::new(s.clone(), z.clone(), vec![NodeId::from(0)], k).unwrap()
    };
    let cand = CospanResult::new(leg(&p), leg(&q)).unwrap();
    let rep = check_pushout(&span, &cand, 3).unwrap();
    let cx = rep
        .counterexample
        .expect("two singletons over nothing have no pushout");
    assert_eq!(
        treespan::category::replay_pushout(&span, &cand, &cx),
        Some(cx.mode)
    );
}
