use std::sync::Arc;

use rand::Rng;
use treespan::embedding::verify_embedding;
use treespan::gen::{random_cospan, random_subtree_embedding, random_tree, rng, TestRng};
use treespan::{
    check_pullback, check_pushout, classify_embedding, intersection, lcst_bruteforce, parse_tree,
    scst_bruteforce, serialize_tree, sub_to_super, sum, super_to_sub, trees_isomorphic,
    EmbeddingKind, NodeId, Shape, SolveConfig, SpanResult, UniversalVerdict,
};

use crate::error::CliError;
use crate::output::Output;

type Suite = fn(&mut TestRng, usize) -> Result<usize, String>;

const STRICT: [EmbeddingKind; 3] = [
    EmbeddingKind::Topological,
    EmbeddingKind::Homeomorphic,
    EmbeddingKind::Isomorphic,
];

fn sized(r: &mut TestRng, lo: usize, hi: usize, prefix: &str) -> Arc<treespan::RootedTree> {
    let n = r.gen_range(lo..=hi);
    Arc::new(random_tree(r, n, prefix))
}

fn round_trip(r: &mut TestRng, cases: usize) -> Result<usize, String> {
    for _ in 0..cases {
        let t = sized(r, 0, 20, "n");
        if parse_tree(&serialize_tree(&t)).map_err(|e| e.to_string())? != *t {
            return Err(format!("parse∘serialize changed\n{}", serialize_tree(&t)));
        }
    }
    Ok(cases)
}

fn hierarchy(r: &mut TestRng, cases: usize) -> Result<usize, String> {
    let mut maps = 0;
    for _ in 0..cases {
        let s = sized(r, 1, 5, "s");
        let t = sized(r, s.len(), 6, "t");
        let mut image: Vec<NodeId> = t.nodes().collect();
        for i in 0..s.len() {
            let j = r.gen_range(i..image.len());
            image.swap(i, j);
        }
        image.truncate(s.len());
        let best = classify_embedding(&s, &t, &image).map_err(|e| e.to_string())?;
        for k in EmbeddingKind::ALL {
            let holds = verify_embedding(&s, &t, &image, k)
                .map_err(|e| e.to_string())?
                .holds();
            if holds != (best >= Some(k)) {
                return Err(format!(
                    "map {image:?} holds at {k} = {holds} but classifies as {best:?}"
                ));
            }
        }
        maps += 1;
    }
    Ok(maps)
}

fn intersections(r: &mut TestRng, cases: usize) -> Result<usize, String> {
    for i in 0..cases {
        let kind = STRICT[i % 3];
        let n = r.gen_range(1..=7);
        let c = random_cospan(r, n, kind);
        let p = intersection(&c).map_err(|e| e.to_string())?;
        if p.shape != Shape::Tree {
            return Err(format!("{kind} cospan gave a forest"));
        }
        let cone =
            SpanResult::new(p.left_inclusion, p.right_inclusion).map_err(|e| e.to_string())?;
        if i % 10 == 0 {
            let rep = check_pullback(&c, &cone, 3).map_err(|e| e.to_string())?;
            if rep.verdict != UniversalVerdict::VerifiedUpToBound {
                return Err(format!("{kind} pullback refuted"));
            }
        }
    }
    Ok(cases)
}

fn duality(r: &mut TestRng, cases: usize) -> Result<usize, String> {
    for i in 0..cases {
        let kind = EmbeddingKind::ALL[i % 4];
        let cfg = SolveConfig::new(kind);
        let t1 = sized(r, 1, 5, "a");
        let t2 = sized(r, 1, 5, "b");
        let lcst = lcst_bruteforce(&t1, &t2, &cfg).map_err(|e| e.to_string())?;
        let scst = scst_bruteforce(&t1, &t2, &cfg).map_err(|e| e.to_string())?;
        let up = sub_to_super(&lcst).map_err(|e| e.to_string())?;
        let down = super_to_sub(&scst).map_err(|e| e.to_string())?;
        if up.apex.len() != scst.apex.len() || down.apex.len() != lcst.apex.len() {
            return Err(format!(
                "{kind}: sizes {} / {} vs {} / {}",
                up.apex.len(),
                down.apex.len(),
                scst.apex.len(),
                lcst.apex.len()
            ));
        }
        let back = super_to_sub(&up).map_err(|e| e.to_string())?;
        if !trees_isomorphic(&back.apex, &lcst.apex) {
            return Err(format!("{kind}: subtree round trip"));
        }
        if i % 10 == 0 {
            let sigma = sum(&lcst).map_err(|e| e.to_string())?;
            let rep = check_pushout(&lcst, &sigma.cospan(), 3).map_err(|e| e.to_string())?;
            if rep.verdict != UniversalVerdict::VerifiedUpToBound {
                return Err(format!("{kind}: pushout refuted"));
            }
        }
    }
    Ok(cases)
}

fn embeddings(r: &mut TestRng, cases: usize) -> Result<usize, String> {
    for i in 0..cases {
        let kind = EmbeddingKind::ALL[i % 4];
        let t = sized(r, 1, 12, "t");
        let size = r.gen_range(0..=t.len());
        let e = random_subtree_embedding(r, &t, kind, size, "s");
        let got = classify_embedding(e.source(), &t, e.map()).map_err(|e| e.to_string())?;
        if got < Some(kind) {
            return Err(format!("generated {kind} embedding classified as {got:?}"));
        }
    }
    Ok(cases)
}

/// Runs every suite; the report is deterministic in `seed` and `cases`.
pub fn run(out: &mut Output, seed: u64, cases: usize) -> Result<i32, CliError> {
    let suites: [(&str, Suite); 5] = [
        ("serialization round trip", round_trip),
        ("kind hierarchy", hierarchy),
        ("generated embeddings", embeddings),
        ("intersections", intersections),
        ("subtree/supertree duality", duality),
    ];
    out.line(format!("seed {seed}"));
    for (i, (name, suite)) in suites.iter().enumerate() {
        let mut r = rng(seed.wrapping_add(i as u64));
        match suite(&mut r, cases) {
            Ok(n) => out.line(format!("PASS {name}: {n} instances")),
            Err(e) => {
                out.line(format!("FAIL {name}: {e}"));
                return Err(CliError::Internal(format!(
                    "property suite `{name}` failed"
                )));
            }
        }
    }
    Ok(0)
}
