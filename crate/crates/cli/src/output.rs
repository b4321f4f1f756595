use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use treespan::{export_dot, serialize_mapping, serialize_tree, Embedding, RootedTree};

use crate::error::CliError;

/// Collects stdout text and the optional side files.
pub struct Output {
    pub text: String,
    plain: bool,
    dot: Option<PathBuf>,
    out: Option<PathBuf>,
    // display name of every label of the produced tree
    names: BTreeMap<String, String>,
}

fn strip_tag(l: &str) -> &str {
    l.strip_prefix("1:")
        .or_else(|| l.strip_prefix("2:"))
        .unwrap_or(l)
}

impl Output {
    pub fn new(plain: bool, dot: Option<PathBuf>, out: Option<PathBuf>) -> Self {
        Output {
            text: String::new(),
            plain,
            dot,
            out,
            names: BTreeMap::new(),
        }
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    /// Chooses display names for the labels of `t`; with `--plain`, tags are
    /// dropped unless that would make two names equal.
    fn name_tree(&mut self, t: &RootedTree) {
        self.names = t.labels().iter().map(|l| (l.clone(), l.clone())).collect();
        if !self.plain {
            return;
        }
        let mut count: BTreeMap<&str, usize> = BTreeMap::new();
        for l in t.labels() {
            *count.entry(strip_tag(l)).or_default() += 1;
        }
        for l in t.labels() {
            if count[strip_tag(l)] == 1 {
                self.names.insert(l.clone(), strip_tag(l).to_owned());
            }
        }
    }

    fn show<'a>(&'a self, l: &'a str) -> &'a str {
        self.names.get(l).map_or(l, String::as_str)
    }

    fn shown_tree(&self, t: &RootedTree) -> Result<RootedTree, CliError> {
        Ok(t.relabel(|l| self.show(l).to_owned())?)
    }

    fn section(&mut self, title: &str, body: &str) {
        self.line(format!("# {title}"));
        self.text.push_str(body);
    }

    /// Prints the produced tree and writes the DOT file if requested.
    pub fn tree(
        &mut self,
        title: &str,
        t: &RootedTree,
        marks: Option<&BTreeMap<String, String>>,
    ) -> Result<(), CliError> {
        self.name_tree(t);
        let shown = self.shown_tree(t)?;
        self.section(title, &serialize_tree(&shown));
        if let Some(path) = self.dot.clone() {
            let marks: Option<BTreeMap<String, String>> = marks.map(|m| {
                m.iter()
                    .map(|(k, v)| (self.show(k).to_owned(), v.clone()))
                    .collect()
            });
            write(&path, &export_dot(&shown, marks.as_ref()))?;
        }
        if let Some(dir) = self.out.clone() {
            write(&dir.join("apex.tree"), &serialize_tree(&shown))?;
        }
        Ok(())
    }

    /// Prints a leg of the produced tree: out of it for a span, into it for a
    /// cospan. Labels of the produced tree are shown by display name.
    pub fn leg(
        &mut self,
        title: &str,
        file: &str,
        e: &Embedding,
        into: bool,
    ) -> Result<(), CliError> {
        let m: BTreeMap<String, String> = e
            .label_map()
            .into_iter()
            .map(|(a, b)| {
                if into {
                    (a, self.show(&b).to_owned())
                } else {
                    (self.show(&a).to_owned(), b)
                }
            })
            .collect();
        let text = serialize_mapping(&m);
        self.section(title, &text);
        if let Some(dir) = self.out.clone() {
            write(&dir.join(file), &text)?;
        }
        Ok(())
    }

    pub fn arcs(&mut self, title: &str, arcs: &BTreeSet<(String, String)>) {
        let mut body = String::new();
        for (a, b) in arcs {
            writeln!(body, "arc {} {}", self.show(a), self.show(b)).unwrap();
        }
        self.section(title, &body);
    }
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::at(dir, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::at(path, e))
}
