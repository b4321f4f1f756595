use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use treespan::solvers::DEFAULT_MAX_NODES;
use treespan::EmbeddingKind;

#[derive(Debug, Parser)]
#[command(
    name = "treespan",
    version,
    about = "Rooted tree embeddings: verification, intersections, sums, common subtrees and supertrees"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Also write the produced tree as a DOT digraph to this file.
    #[arg(long, global = true, value_name = "PATH")]
    pub dot: Option<PathBuf>,

    /// Strip the `1:` / `2:` origin tags from node labels where unambiguous.
    #[arg(long, global = true)]
    pub plain: bool,

    /// Cross-check optimality preconditions and internal invariants by brute force.
    #[arg(long, global = true)]
    pub debug_oracle: bool,

    /// Also write results as `apex.tree`, `left.map`, `right.map` into this directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KindArg {
    /// minor, topological, homeomorphic or isomorphic (min, top, hom, iso).
    #[arg(long, short)]
    pub kind: EmbeddingKind,
}

#[derive(Debug, Args)]
pub struct MaxNodes {
    /// Largest input handled by exhaustive search.
    #[arg(long, env = "TREESPAN_MAX_NODES", default_value_t = DEFAULT_MAX_NODES)]
    pub max_nodes: usize,
}

/// Two trees, a tree embedded in both, and the two embeddings.
#[derive(Debug, Args)]
pub struct SpanFiles {
    pub t1: PathBuf,
    pub t2: PathBuf,
    pub mu: PathBuf,
    pub m1: PathBuf,
    pub m2: PathBuf,
}

/// Two trees, a tree both embed into, and the two embeddings.
#[derive(Debug, Args)]
pub struct CospanFiles {
    pub t1: PathBuf,
    pub t2: PathBuf,
    pub t: PathBuf,
    pub f1: PathBuf,
    pub f2: PathBuf,
}

#[derive(Debug, Args)]
pub struct Probe {
    /// Largest probe tree, in nodes.
    #[arg(long, default_value_t = 4)]
    pub bound: usize,

    /// Candidate to check instead of the constructed one: apex tree and the two leg mappings.
    #[arg(long, num_args = 3, value_names = ["APEX", "LEFT", "RIGHT"])]
    pub candidate: Option<Vec<PathBuf>>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check whether a mapping is an embedding of the given kind (exit 0 yes, 1 no).
    Verify {
        #[command(flatten)]
        kind: KindArg,
        s: PathBuf,
        t: PathBuf,
        f: PathBuf,
    },
    /// Print the strongest kind a mapping is an embedding of.
    Classify { s: PathBuf, t: PathBuf, f: PathBuf },
    /// Intersection of two trees through embeddings into a common tree.
    Intersect {
        #[command(flatten)]
        kind: KindArg,
        #[command(flatten)]
        files: CospanFiles,
    },
    /// Quotient graph of two trees glued along a common subtree.
    Join {
        #[command(flatten)]
        kind: KindArg,
        #[command(flatten)]
        files: SpanFiles,
    },
    /// The join with subsumed arcs removed.
    Sum {
        #[command(flatten)]
        kind: KindArg,
        #[command(flatten)]
        files: SpanFiles,
    },
    /// A largest common subtree, by exhaustive search.
    Lcst {
        #[command(flatten)]
        kind: KindArg,
        #[command(flatten)]
        max: MaxNodes,
        t1: PathBuf,
        t2: PathBuf,
    },
    /// A smallest common supertree, by exhaustive search.
    Scst {
        #[command(flatten)]
        kind: KindArg,
        #[command(flatten)]
        max: MaxNodes,
        t1: PathBuf,
        t2: PathBuf,
    },
    /// Smallest common supertree from a largest common subtree.
    #[command(name = "sub2super")]
    SubToSuper {
        #[command(flatten)]
        kind: KindArg,
        #[command(flatten)]
        max: MaxNodes,
        #[command(flatten)]
        files: SpanFiles,
    },
    /// Largest common subtree from a smallest common supertree.
    #[command(name = "super2sub")]
    SuperToSub {
        #[command(flatten)]
        kind: KindArg,
        #[command(flatten)]
        max: MaxNodes,
        #[command(flatten)]
        files: CospanFiles,
    },
    /// Test the pullback property of the intersection (or a candidate) up to a probe bound.
    CheckPullback {
        #[command(flatten)]
        kind: KindArg,
        #[command(flatten)]
        probe: Probe,
        #[command(flatten)]
        files: CospanFiles,
    },
    /// Test the pushout property of the sum (or a candidate) up to a probe bound.
    CheckPushout {
        #[command(flatten)]
        kind: KindArg,
        #[command(flatten)]
        probe: Probe,
        #[command(flatten)]
        files: SpanFiles,
    },
    /// Run the randomized property suites.
    Proptest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Instances per suite.
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
}
