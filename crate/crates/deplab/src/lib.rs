//! deplab is a small laboratory for data-driven dependency parsing
//! experiments: it reads CoNLL-format treebanks, trains a graph-based
//! (maximum spanning arborescence) parser and a greedy transition-based
//! parser, scores their output with attachment metrics, and breaks the
//! errors down by structural factors of the trees (dependency length,
//! distance to root, sibling counts, arc degree, part of speech,
//! dependency type).
//!
//! The numeric core is generic over the scalar used for arc scores and
//! model weights (any ordered additive type for decoding, any float for
//! learning); the aliases below fix the concrete types the command-line
//! harness uses.

pub mod analysis;
pub mod decode;
pub mod eval;
pub mod factors;
pub mod features;
pub mod graph;
pub mod harness;
pub mod learn;
pub mod model_io;
pub mod synthetic;
pub mod transition;
pub mod treebank;

pub use treebank::{DependencyGraph, Sentence, Token, Treebank};

/// Scalar used for scores and weights by the concrete models.
pub type Score = f64;

/// Labeled arc-score matrix over the default scalar.
pub type ScoreMatrix = graph::LabeledScores<Score>;

/// Arc-factored model over the default scalar.
pub type GraphModel = graph::ArcFactorModel<Score>;

/// Greedy transition model over the default scalar.
pub type GreedyModel = transition::TransitionModel<Score>;
