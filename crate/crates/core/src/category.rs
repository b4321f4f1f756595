//! Bounded checks of the pullback and pushout universal properties.
//!
//! Every tree up to a size bound is used as a probe, together with every
//! commuting pair of embeddings between the probe and the diagram. For each
//! such pair the mediating map into (or out of) the candidate must exist, be
//! unique, and be an embedding of the diagram's kind.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::canon::unlabelled_trees;
use crate::embedding::{for_each_embedding, verify_embedding, Embedding, EmbeddingKind};
use crate::pullback::CospanResult;
use crate::pushout::SpanResult;
use crate::tree::{NodeId, RootedTree};

pub const MAX_PROBE_BOUND: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniversalVerdict {
    VerifiedUpToBound,
    CounterexampleFound,
}

impl fmt::Display for UniversalVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UniversalVerdict::VerifiedUpToBound => "VerifiedUpToBound",
            UniversalVerdict::CounterexampleFound => "CounterexampleFound",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureMode {
    /// No map satisfies the mediating equations.
    NoMediator,
    /// Several embeddings satisfy them.
    MultipleMediators,
    /// The only maps satisfying them are not embeddings of the kind.
    MediatorNotEmbedding,
}

impl fmt::Display for FailureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureMode::NoMediator => "NoMediator",
            FailureMode::MultipleMediators => "MultipleMediators",
            FailureMode::MediatorNotEmbedding => "MediatorNotEmbedding",
        })
    }
}

/// A probe tree, its two legs, and how the candidate fails on them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub probe: Arc<RootedTree>,
    pub first: Embedding,
    pub second: Embedding,
    pub mode: FailureMode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalReport {
    pub verdict: UniversalVerdict,
    pub bound: usize,
    /// Number of commuting probe pairs examined.
    pub probes_checked: usize,
    pub counterexample: Option<Counterexample>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CategoryError {
    #[error("probe bound {bound} exceeds the maximum {max}")]
    BoundExceeded { bound: usize, max: usize },
    #[error("embedding kinds differ: {0} vs {1}")]
    KindMismatch(EmbeddingKind, EmbeddingKind),
    #[error("candidate does not fit the diagram: {0}")]
    InvalidCandidate(String),
    #[error("candidate does not commute with the diagram")]
    CandidateNotCommuting,
}

fn check_bound(bound: usize) -> Result<(), CategoryError> {
    if bound > MAX_PROBE_BOUND {
        return Err(CategoryError::BoundExceeded {
            bound,
            max: MAX_PROBE_BOUND,
        });
    }
    Ok(())
}

fn probes(bound: usize) -> impl Iterator<Item = Arc<RootedTree>> {
    (0..=bound).flat_map(|n| unlabelled_trees(n).iter().cloned().collect::<Vec<_>>())
}

fn report(
    bound: usize,
    checked: usize,
    cx: Option<Counterexample>,
    note: Option<String>,
) -> UniversalReport {
    UniversalReport {
        verdict: if cx.is_some() {
            UniversalVerdict::CounterexampleFound
        } else {
            UniversalVerdict::VerifiedUpToBound
        },
        bound,
        probes_checked: checked,
        counterexample: cx,
        note,
    }
}

fn validate_pullback_candidate(c: &CospanResult, p: &SpanResult) -> Result<(), CategoryError> {
    let kind = c.kind();
    for k in [c.right.kind(), p.left.kind(), p.right.kind()] {
        if k != kind {
            return Err(CategoryError::KindMismatch(kind, k));
        }
    }
    if **p.left.target() != **c.left.source() || **p.right.target() != **c.right.source() {
        return Err(CategoryError::InvalidCandidate(
            "candidate legs do not end in the cospan's trees".into(),
        ));
    }
    if p.apex
        .nodes()
        .any(|v| c.left.apply(p.left.apply(v)) != c.right.apply(p.right.apply(v)))
    {
        return Err(CategoryError::CandidateNotCommuting);
    }
    Ok(())
}

/// The mediator `X -> P` is forced by injectivity of `p₁`: `h = p₁⁻¹ ∘ g₁`.
fn pullback_failure(
    c_kind: EmbeddingKind,
    p: &SpanResult,
    p1_inv: &[Option<NodeId>],
    x: &RootedTree,
    g1: &[NodeId],
    g2: &[NodeId],
) -> Option<FailureMode> {
    let mut h = Vec::with_capacity(x.len());
    for v in x.nodes() {
        let Some(a) = p1_inv[g1[v.index()].index()] else {
            return Some(FailureMode::NoMediator);
        };
        if p.right.apply(a) != g2[v.index()] {
            return Some(FailureMode::NoMediator);
        }
        h.push(a);
    }
    match verify_embedding(x, &p.apex, &h, c_kind) {
        Ok(v) if v.holds() => None,
        _ => Some(FailureMode::MediatorNotEmbedding),
    }
}

/// Checks that the cone `candidate` over the cospan `c` is a pullback for all
/// probes with at most `bound` nodes.
pub fn check_pullback(
    c: &CospanResult,
    candidate: &SpanResult,
    bound: usize,
) -> Result<UniversalReport, CategoryError> {
    check_bound(bound)?;
    validate_pullback_candidate(c, candidate)?;
    let kind = c.kind();
    let (t1, t2) = (c.left.source(), c.right.source());
    let f2_inv = c.right.preimages();
    let p1_inv = candidate.left.preimages();
    let mut checked = 0;
    for x in probes(bound) {
        let mut found = None;
        for_each_embedding(&x, t1, kind, |g1| {
            // g₂ is forced by injectivity of f₂
            let Some(g2) = g1
                .iter()
                .map(|&a| f2_inv[c.left.apply(a).index()])
                .collect::<Option<Vec<NodeId>>>()
            else {
                return true;
            };
            if !verify_embedding(&x, t2, &g2, kind)
                .map(|v| v.holds())
                .unwrap_or(false)
            {
                return true;
            }
            checked += 1;
            match pullback_failure(kind, candidate, &p1_inv, &x, g1, &g2) {
                None => true,
                Some(mode) => {
                    found = Some((g1.to_vec(), g2, mode));
                    false
                }
            }
        });
        if let Some((g1, g2, mode)) = found {
            let cx = Counterexample {
                probe: x.clone(),
                first: Embedding::new(x.clone(), t1.clone(), g1, kind).expect("enumerated"),
                second: Embedding::new(x, t2.clone(), g2, kind).expect("verified"),
                mode,
            };
            return Ok(report(bound, checked, Some(cx), None));
        }
    }
    Ok(report(bound, checked, None, None))
}

/// Re-runs the mediator search of [`check_pullback`] on a recorded probe.
pub fn replay_pullback(
    c: &CospanResult,
    candidate: &SpanResult,
    cx: &Counterexample,
) -> Option<FailureMode> {
    let p1_inv = candidate.left.preimages();
    if cx
        .probe
        .nodes()
        .any(|v| c.left.apply(cx.first.apply(v)) != c.right.apply(cx.second.apply(v)))
    {
        return None;
    }
    pullback_failure(
        c.kind(),
        candidate,
        &p1_inv,
        &cx.probe,
        cx.first.map(),
        cx.second.map(),
    )
}

fn validate_pushout_candidate(s: &SpanResult, q: &CospanResult) -> Result<(), CategoryError> {
    let kind = s.kind();
    for k in [s.right.kind(), q.left.kind(), q.right.kind()] {
        if k != kind {
            return Err(CategoryError::KindMismatch(kind, k));
        }
    }
    if **q.left.source() != **s.left.target() || **q.right.source() != **s.right.target() {
        return Err(CategoryError::InvalidCandidate(
            "candidate legs do not start at the span's trees".into(),
        ));
    }
    if s.apex
        .nodes()
        .any(|c| q.left.apply(s.left.apply(c)) != q.right.apply(s.right.apply(c)))
    {
        return Err(CategoryError::CandidateNotCommuting);
    }
    Ok(())
}

/// Mediators `Q -> X` are fixed on the legs' images; the remaining nodes of
/// `Q` are completed in every possible way.
fn pushout_failure(
    kind: EmbeddingKind,
    q: &CospanResult,
    x: &RootedTree,
    g1: &[NodeId],
    g2: &[NodeId],
) -> Option<FailureMode> {
    let apex = &q.apex;
    let mut h: Vec<Option<NodeId>> = vec![None; apex.len()];
    let assigned = q
        .left
        .source()
        .nodes()
        .map(|a| (q.left.apply(a), g1[a.index()]))
        .chain(
            q.right
                .source()
                .nodes()
                .map(|b| (q.right.apply(b), g2[b.index()])),
        );
    for (node, value) in assigned {
        match h[node.index()] {
            Some(prev) if prev != value => return Some(FailureMode::NoMediator),
            _ => h[node.index()] = Some(value),
        }
    }
    let free: Vec<usize> = (0..apex.len()).filter(|&i| h[i].is_none()).collect();
    let mut full: Vec<NodeId> = h.iter().map(|v| v.unwrap_or(NodeId(0))).collect();
    let mut count = 0;
    complete(apex, x, kind, &free, 0, &mut full, &mut count);
    match count {
        0 => Some(FailureMode::MediatorNotEmbedding),
        1 => None,
        _ => Some(FailureMode::MultipleMediators),
    }
}

fn complete(
    apex: &RootedTree,
    x: &RootedTree,
    kind: EmbeddingKind,
    free: &[usize],
    at: usize,
    full: &mut Vec<NodeId>,
    count: &mut usize,
) {
    if *count > 1 {
        return;
    }
    if at == free.len() {
        if verify_embedding(apex, x, full, kind)
            .map(|v| v.holds())
            .unwrap_or(false)
        {
            *count += 1;
        }
        return;
    }
    for cand in x.nodes() {
        full[free[at]] = cand;
        complete(apex, x, kind, free, at + 1, full, count);
    }
}

/// Checks that the cocone `candidate` under the span `s` is a pushout for all
/// probes with at most `bound` nodes.
pub fn check_pushout(
    s: &SpanResult,
    candidate: &CospanResult,
    bound: usize,
) -> Result<UniversalReport, CategoryError> {
    check_bound(bound)?;
    validate_pushout_candidate(s, candidate)?;
    let kind = s.kind();
    let (t1, t2) = (s.left.target(), s.right.target());
    let note = (s.apex.is_empty() && !t1.is_empty() && !t2.is_empty()).then(|| {
        "probes are trees; a probe with two components is replaced by tree-shaped probes"
            .to_string()
    });
    let mut checked = 0;
    for x in probes(bound) {
        let mut seconds: Vec<Vec<NodeId>> = Vec::new();
        for_each_embedding(t2, &x, kind, |g2| {
            seconds.push(g2.to_vec());
            true
        });
        if seconds.is_empty() {
            continue;
        }
        let mut found = None;
        for_each_embedding(t1, &x, kind, |g1| {
            for g2 in &seconds {
                let commutes = s
                    .apex
                    .nodes()
                    .all(|c| g1[s.left.apply(c).index()] == g2[s.right.apply(c).index()]);
                if !commutes {
                    continue;
                }
                checked += 1;
                if let Some(mode) = pushout_failure(kind, candidate, &x, g1, g2) {
                    found = Some((g1.to_vec(), g2.clone(), mode));
                    return false;
                }
            }
            true
        });
        if let Some((g1, g2, mode)) = found {
            let cx = Counterexample {
                probe: x.clone(),
                first: Embedding::new(t1.clone(), x.clone(), g1, kind).expect("enumerated"),
                second: Embedding::new(t2.clone(), x, g2, kind).expect("enumerated"),
                mode,
            };
            return Ok(report(bound, checked, Some(cx), note));
        }
    }
    Ok(report(bound, checked, None, note))
}

/// Re-runs the mediator search of [`check_pushout`] on a recorded probe.
pub fn replay_pushout(
    s: &SpanResult,
    candidate: &CospanResult,
    cx: &Counterexample,
) -> Option<FailureMode> {
    if s.apex
        .nodes()
        .any(|c| cx.first.apply(s.left.apply(c)) != cx.second.apply(s.right.apply(c)))
    {
        return None;
    }
    pushout_failure(
        s.kind(),
        candidate,
        &cx.probe,
        cx.first.map(),
        cx.second.map(),
    )
}
