//! Line-oriented text formats for trees and node mappings, and DOT export.
//!
//! Trees:
//!
//! ```text
//! # comment
//! root 1
//! arc 1 2
//! arc 1 3
//! ```
//!
//! Mappings are lines `map <source> <target>`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::pullback::FRESH_ROOT;
use crate::tree::{RootedTree, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    SyntaxError { line: usize, message: String },
    #[error("line {line}: label `{label}` is reserved")]
    ReservedLabel { line: usize, label: String },
    #[error("line {line}: `{label}` is mapped twice")]
    DuplicateSource { line: usize, label: String },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Directive {
    Root(String),
    Arc(String, String),
}

/// Directives of a tree file in order of appearance.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TreeDocument {
    pub directives: Vec<Directive>,
}

impl TreeDocument {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        let mut directives = Vec::new();
        let mut root_line = None;
        for (i, tokens) in lines(text) {
            let directive = match tokens.as_slice() {
                ["root", r] => {
                    if let Some(prev) = root_line.replace(i) {
                        return Err(IoError::SyntaxError {
                            line: i,
                            message: format!("second `root` line (first on line {prev})"),
                        });
                    }
                    Directive::Root(label(i, r)?)
                }
                ["arc", a, b] => Directive::Arc(label(i, a)?, label(i, b)?),
                [kw, ..] if *kw == "root" || *kw == "arc" => {
                    return Err(IoError::SyntaxError {
                        line: i,
                        message: format!("wrong number of arguments to `{kw}`"),
                    })
                }
                [kw, ..] => {
                    return Err(IoError::SyntaxError {
                        line: i,
                        message: format!("unknown directive `{kw}`"),
                    })
                }
                [] => unreachable!("blank lines are skipped"),
            };
            directives.push(directive);
        }
        Ok(TreeDocument { directives })
    }

    pub fn to_tree(&self) -> Result<RootedTree, IoError> {
        let mut nodes = BTreeSet::new();
        let mut arcs = Vec::new();
        let mut root = None;
        for d in &self.directives {
            match d {
                Directive::Root(r) => {
                    nodes.insert(r.clone());
                    root = Some(r.clone());
                }
                Directive::Arc(a, b) => {
                    nodes.insert(a.clone());
                    nodes.insert(b.clone());
                    arcs.push((a.clone(), b.clone()));
                }
            }
        }
        Ok(RootedTree::from_parts(nodes, arcs, root)?)
    }
}

/// Non-blank lines with comments stripped, split into tokens; 1-based numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let content = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn label(line: usize, token: &str) -> Result<String, IoError> {
    if token == FRESH_ROOT {
        return Err(IoError::ReservedLabel {
            line,
            label: token.to_owned(),
        });
    }
    Ok(token.to_owned())
}

pub fn parse_tree(text: &str) -> Result<RootedTree, IoError> {
    TreeDocument::parse(text)?.to_tree()
}

/// `root` line first, then arcs in sorted order. The empty tree is the empty text.
pub fn serialize_tree(t: &RootedTree) -> String {
    let mut out = String::new();
    if let Some(r) = t.root() {
        writeln!(out, "root {}", t.label(r)).unwrap();
    }
    for (a, b) in t.arc_labels() {
        writeln!(out, "arc {a} {b}").unwrap();
    }
    out
}

pub fn parse_mapping(text: &str) -> Result<BTreeMap<String, String>, IoError> {
    let mut map = BTreeMap::new();
    for (i, tokens) in lines(text) {
        match tokens.as_slice() {
            ["map", src, dst] => {
                let (src, dst) = (label(i, src)?, label(i, dst)?);
                if map.contains_key(&src) {
                    return Err(IoError::DuplicateSource {
                        line: i,
                        label: src,
                    });
                }
                map.insert(src, dst);
            }
            ["map", ..] => {
                return Err(IoError::SyntaxError {
                    line: i,
                    message: "`map` takes a source and a target".into(),
                })
            }
            [kw, ..] => {
                return Err(IoError::SyntaxError {
                    line: i,
                    message: format!("unknown directive `{kw}`"),
                })
            }
            [] => unreachable!("blank lines are skipped"),
        }
    }
    Ok(map)
}

pub fn serialize_mapping(map: &BTreeMap<String, String>) -> String {
    map.iter().map(|(a, b)| format!("map {a} {b}\n")).collect()
}

fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for ch in s.chars() {
        if ch == '"' || ch == '\\' {
            q.push('\\');
        }
        q.push(ch);
    }
    q.push('"');
    q
}

/// Deterministic DOT digraph. `marks` gives display labels for some nodes,
/// keyed by node label; other nodes are shown by their label.
pub fn export_dot(t: &RootedTree, marks: Option<&BTreeMap<String, String>>) -> String {
    let mut out = String::from("digraph tree {\n");
    let mut labels: Vec<&str> = t.labels().iter().map(String::as_str).collect();
    labels.sort_unstable();
    for l in labels {
        let shown = marks.and_then(|m| m.get(l)).map_or(l, String::as_str);
        writeln!(out, "  {} [label={}];", quote(l), quote(shown)).unwrap();
    }
    for (a, b) in t.arc_labels() {
        writeln!(out, "  {} -> {};", quote(&a), quote(&b)).unwrap();
    }
    out.push_str("}\n");
    out
}
