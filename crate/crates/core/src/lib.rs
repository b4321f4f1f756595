//! Rooted-tree embeddings and the pullback/pushout constructions built on
//! them: largest common subtrees, smallest common supertrees and the
//! conversions between the two.

pub mod canon;
pub mod category;
pub mod embedding;
pub mod gen;
pub mod io;
pub mod pullback;
pub mod pushout;
pub mod solvers;
pub mod tree;

pub use canon::{canonical_encoding, canonical_form, trees_isomorphic, unlabelled_trees};
pub use category::{
    check_pullback, check_pushout, CategoryError, FailureMode, UniversalReport, UniversalVerdict,
};
pub use embedding::{
    classify_embedding, compose, enumerate_embeddings, left_factor, verify_embedding, Embedding,
    EmbeddingError, EmbeddingKind, Verdict, Violation,
};
pub use io::{export_dot, parse_mapping, parse_tree, serialize_mapping, serialize_tree, IoError};
pub use pullback::{
    intersection, pullback_mediator, CospanResult, IntersectionResult, PullbackError, Shape,
};
pub use pushout::{
    join, prune_subsumed_arcs, pushout_mediator, sum, PushoutError, QuotientGraph, SpanResult,
};
pub use solvers::{
    lcst_bruteforce, lcst_size, scst_bruteforce, scst_size, sub_to_super, super_to_sub,
    SolveConfig, SolveError,
};
pub use tree::{validate_tree, NodeId, Path, RootedTree, TreeError};

/// Whether expensive invariant assertions and brute-force cross-checks run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Checks {
    #[default]
    Off,
    Full,
}
