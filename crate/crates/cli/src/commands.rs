use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use treespan::category::UniversalReport;
use treespan::embedding::verify_embedding;
use treespan::pullback::IntersectionResult;
use treespan::pushout::{prune_subsumed_arcs, sum_with, SumResult};
use treespan::solvers::{sub_to_super_with, super_to_sub_with};
use treespan::{
    check_pullback, check_pushout, classify_embedding, intersection, join, lcst_bruteforce,
    parse_mapping, parse_tree, scst_bruteforce, Checks, CospanResult, Embedding, EmbeddingKind,
    RootedTree, Shape, SolveConfig, SpanResult,
};

use crate::args::{CospanFiles, Probe, SpanFiles};
use crate::error::CliError;
use crate::output::Output;

pub fn read_tree(path: &Path) -> Result<Arc<RootedTree>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::at(path, e))?;
    Ok(Arc::new(
        parse_tree(&text).map_err(|e| CliError::at(path, e))?,
    ))
}

fn read_map(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::at(path, e))?;
    parse_mapping(&text).map_err(|e| CliError::at(path, e))
}

fn read_embedding(
    path: &Path,
    s: &Arc<RootedTree>,
    t: &Arc<RootedTree>,
    kind: EmbeddingKind,
) -> Result<Embedding, CliError> {
    Embedding::from_labels(s.clone(), t.clone(), &read_map(path)?, kind)
        .map_err(|e| CliError::at(path, e))
}

fn read_node_map(
    path: &Path,
    s: &RootedTree,
    t: &RootedTree,
) -> Result<Vec<treespan::NodeId>, CliError> {
    treespan::embedding::resolve_mapping(s, t, &read_map(path)?).map_err(|e| CliError::at(path, e))
}

fn read_span(files: &SpanFiles, kind: EmbeddingKind) -> Result<SpanResult, CliError> {
    let t1 = read_tree(&files.t1)?;
    let t2 = read_tree(&files.t2)?;
    let mu = read_tree(&files.mu)?;
    let m1 = read_embedding(&files.m1, &mu, &t1, kind)?;
    let m2 = read_embedding(&files.m2, &mu, &t2, kind)?;
    Ok(SpanResult::new(m1, m2)?)
}

fn read_cospan(files: &CospanFiles, kind: EmbeddingKind) -> Result<CospanResult, CliError> {
    let t1 = read_tree(&files.t1)?;
    let t2 = read_tree(&files.t2)?;
    let t = read_tree(&files.t)?;
    let f1 = read_embedding(&files.f1, &t1, &t, kind)?;
    let f2 = read_embedding(&files.f2, &t2, &t, kind)?;
    Ok(CospanResult::new(f1, f2)?)
}

fn checks(debug_oracle: bool) -> Checks {
    if debug_oracle {
        Checks::Full
    } else {
        Checks::Off
    }
}

/// Exit status 0 when the mapping is a `kind` embedding, 1 otherwise.
pub fn verify(
    out: &mut Output,
    kind: EmbeddingKind,
    s: &Path,
    t: &Path,
    f: &Path,
) -> Result<i32, CliError> {
    let (st, tt) = (read_tree(s)?, read_tree(t)?);
    let map = read_node_map(f, &st, &tt)?;
    let verdict = verify_embedding(&st, &tt, &map, kind)?;
    if let Some(v) = verdict.violation() {
        out.line(format!("{kind}: no ({})", v.describe(&st, &tt, &map)));
        return Ok(1);
    }
    match kind.stronger() {
        Some(next) => {
            let holds = verify_embedding(&st, &tt, &map, next)?.holds();
            out.line(format!(
                "{kind}: yes; {next}: {}",
                if holds { "yes" } else { "no" }
            ));
        }
        None => out.line(format!("{kind}: yes")),
    }
    Ok(0)
}

pub fn classify(out: &mut Output, s: &Path, t: &Path, f: &Path) -> Result<i32, CliError> {
    let (st, tt) = (read_tree(s)?, read_tree(t)?);
    let map = read_node_map(f, &st, &tt)?;
    match classify_embedding(&st, &tt, &map)? {
        Some(k) => out.line(k.to_string()),
        None => out.line("none"),
    }
    Ok(0)
}

fn provenance_marks(p: &IntersectionResult) -> BTreeMap<String, String> {
    p.tree
        .nodes()
        .filter(|&v| Some(v) != p.fresh_root)
        .map(|v| {
            let (a, b) = &p.provenance[v.index()];
            (p.tree.label(v).to_owned(), format!("{a}|{b}"))
        })
        .collect()
}

pub fn intersect(
    out: &mut Output,
    kind: EmbeddingKind,
    files: &CospanFiles,
) -> Result<i32, CliError> {
    let c = read_cospan(files, kind)?;
    let p = intersection(&c)?;
    out.line(format!(
        "shape: {}",
        match p.shape {
            Shape::Tree => "tree",
            Shape::Forest => "forest",
        }
    ));
    let arcs: BTreeSet<(String, String)> = p
        .graph_arcs
        .iter()
        .map(|&(a, b)| (c.apex.label(a).to_owned(), c.apex.label(b).to_owned()))
        .collect();
    out.line("# common image nodes");
    for &v in &p.graph_nodes {
        out.line(format!("node {}", c.apex.label(v)));
    }
    out.arcs("common image arcs", &arcs);
    out.tree("intersection", &p.tree, Some(&provenance_marks(&p)))?;
    out.leg("left", "left.map", &p.left_inclusion, false)?;
    out.leg("right", "right.map", &p.right_inclusion, false)?;
    Ok(0)
}

pub fn join_cmd(out: &mut Output, kind: EmbeddingKind, files: &SpanFiles) -> Result<i32, CliError> {
    let s = read_span(files, kind)?;
    let q = join(&s)?;
    let (t1, t2) = (s.left.target(), s.right.target());
    out.line("# classes");
    for c in &q.classes {
        let l = c.left.map_or("-", |v| t1.label(v));
        let r = c.right.map_or("-", |v| t2.label(v));
        out.line(format!("class {} {l} {r}", c.name));
    }
    let name = |(a, b): &(usize, usize)| (q.classes[*a].name.clone(), q.classes[*b].name.clone());
    out.arcs("arcs", &q.arcs.iter().map(name).collect());
    let pruned = prune_subsumed_arcs(&q);
    out.arcs("subsumed", &pruned.removed.iter().map(name).collect());
    Ok(0)
}

fn sum_marks(s: &SpanResult, sigma: &SumResult) -> BTreeMap<String, String> {
    sigma
        .tree
        .nodes()
        .filter_map(|v| match sigma.provenance(s, v) {
            (Some(a), Some(b)) => Some((sigma.tree.label(v).to_owned(), format!("{a}|{b}"))),
            _ => None,
        })
        .collect()
}

fn print_cospan(
    out: &mut Output,
    c: &CospanResult,
    marks: Option<&BTreeMap<String, String>>,
) -> Result<(), CliError> {
    out.tree("supertree", &c.apex, marks)?;
    out.leg("left", "left.map", &c.left, true)?;
    out.leg("right", "right.map", &c.right, true)
}

fn print_span(out: &mut Output, s: &SpanResult) -> Result<(), CliError> {
    out.tree("subtree", &s.apex, None)?;
    out.leg("left", "left.map", &s.left, false)?;
    out.leg("right", "right.map", &s.right, false)
}

pub fn sum_cmd(
    out: &mut Output,
    kind: EmbeddingKind,
    files: &SpanFiles,
    debug: bool,
) -> Result<i32, CliError> {
    let s = read_span(files, kind)?;
    let sigma = sum_with(&s, checks(debug))?;
    let removed: BTreeSet<(String, String)> = sigma
        .removed
        .iter()
        .map(|&(a, b)| {
            (
                sigma.quotient.classes[a].name.clone(),
                sigma.quotient.classes[b].name.clone(),
            )
        })
        .collect();
    print_cospan(out, &sigma.cospan(), Some(&sum_marks(&s, &sigma)))?;
    out.arcs("subsumed", &removed);
    Ok(0)
}

pub fn lcst(
    out: &mut Output,
    kind: EmbeddingKind,
    max: usize,
    t1: &Path,
    t2: &Path,
    debug: bool,
) -> Result<i32, CliError> {
    let (a, b) = (read_tree(t1)?, read_tree(t2)?);
    let cfg = SolveConfig::new(kind)
        .with_max_nodes(max)
        .with_checks(checks(debug));
    let s = lcst_bruteforce(&a, &b, &cfg)?;
    out.line(format!("size: {}", s.apex.len()));
    print_span(out, &s)?;
    Ok(0)
}

pub fn scst(
    out: &mut Output,
    kind: EmbeddingKind,
    max: usize,
    t1: &Path,
    t2: &Path,
    debug: bool,
) -> Result<i32, CliError> {
    let (a, b) = (read_tree(t1)?, read_tree(t2)?);
    let cfg = SolveConfig::new(kind)
        .with_max_nodes(max)
        .with_checks(checks(debug));
    let c = scst_bruteforce(&a, &b, &cfg)?;
    out.line(format!("size: {}", c.apex.len()));
    print_cospan(out, &c, None)?;
    Ok(0)
}

pub fn sub_to_super(
    out: &mut Output,
    kind: EmbeddingKind,
    max: usize,
    files: &SpanFiles,
    debug: bool,
) -> Result<i32, CliError> {
    let s = read_span(files, kind)?;
    let c = sub_to_super_with(&s, checks(debug), max)?;
    out.line(format!("size: {}", c.apex.len()));
    print_cospan(out, &c, None)?;
    Ok(0)
}

pub fn super_to_sub(
    out: &mut Output,
    kind: EmbeddingKind,
    max: usize,
    files: &CospanFiles,
    debug: bool,
) -> Result<i32, CliError> {
    let c = read_cospan(files, kind)?;
    let s = super_to_sub_with(&c, checks(debug), max)?;
    out.line(format!("size: {}", s.apex.len()));
    print_span(out, &s)?;
    Ok(0)
}

fn candidate_paths(probe: &Probe) -> Option<(&PathBuf, &PathBuf, &PathBuf)> {
    probe.candidate.as_ref().map(|v| (&v[0], &v[1], &v[2]))
}

fn print_report(out: &mut Output, rep: &UniversalReport) {
    out.line(format!("verdict: {}", rep.verdict));
    out.line(format!("bound: {}", rep.bound));
    out.line(format!("probes checked: {}", rep.probes_checked));
    if let Some(note) = &rep.note {
        out.line(format!("note: {note}"));
    }
    if let Some(cx) = &rep.counterexample {
        out.line(format!("failure: {}", cx.mode));
        out.line("# probe");
        out.text.push_str(&treespan::serialize_tree(&cx.probe));
        out.line("# first");
        out.text
            .push_str(&treespan::serialize_mapping(&cx.first.label_map()));
        out.line("# second");
        out.text
            .push_str(&treespan::serialize_mapping(&cx.second.label_map()));
    }
}

pub fn check_pullback_cmd(
    out: &mut Output,
    kind: EmbeddingKind,
    probe: &Probe,
    files: &CospanFiles,
) -> Result<i32, CliError> {
    let c = read_cospan(files, kind)?;
    let (t1, t2) = (c.left.source().clone(), c.right.source().clone());
    let candidate = match candidate_paths(probe) {
        Some((apex, l, r)) => {
            let apex = read_tree(apex)?;
            SpanResult::new(
                read_embedding(l, &apex, &t1, kind)?,
                read_embedding(r, &apex, &t2, kind)?,
            )?
        }
        None => {
            let p = intersection(&c)?;
            if p.shape == Shape::Forest {
                out.line("candidate: empty tree (the intersection is a forest)");
                SpanResult::new(
                    Embedding::from_empty(t1, kind),
                    Embedding::from_empty(t2, kind),
                )?
            } else {
                out.line("candidate: intersection");
                SpanResult::new(p.left_inclusion, p.right_inclusion)?
            }
        }
    };
    let rep = check_pullback(&c, &candidate, probe.bound)?;
    print_report(out, &rep);
    Ok(0)
}

pub fn check_pushout_cmd(
    out: &mut Output,
    kind: EmbeddingKind,
    probe: &Probe,
    files: &SpanFiles,
) -> Result<i32, CliError> {
    let s = read_span(files, kind)?;
    let (t1, t2) = (s.left.target().clone(), s.right.target().clone());
    let candidate = match candidate_paths(probe) {
        Some((apex, l, r)) => {
            let apex = read_tree(apex)?;
            CospanResult::new(
                read_embedding(l, &t1, &apex, kind)?,
                read_embedding(r, &t2, &apex, kind)?,
            )?
        }
        None => {
            let sigma = treespan::sum(&s).map_err(|e| {
                CliError::Input(format!("{e}; pass --candidate to check another cocone"))
            })?;
            out.line("candidate: sum");
            sigma.cospan()
        }
    };
    let rep = check_pushout(&s, &candidate, probe.bound)?;
    print_report(out, &rep);
    Ok(0)
}
