//! Greedy shift-reduce parser with an online-reordering swap move,
//! a static oracle, hashed configuration features, and averaged-
//! perceptron training.
//!
//! A configuration holds a stack (the artificial root starts at the
//! bottom), a buffer of unread tokens, and the arcs built so far. Four
//! move families drive it:
//!
//! * `SHIFT` - move the front of the buffer onto the stack;
//! * `LEFT-ARC(label)` - attach the second stack item to the top and
//!   remove it (the second item may not be the root);
//! * `RIGHT-ARC(label)` - attach the top to the second item and pop it;
//! * `SWAP` - move the second stack item back to the front of the
//!   buffer, allowed only while it precedes the top in original word
//!   order and is not the root.
//!
//! `SWAP` reorders tokens on the fly, which is what lets a greedy
//! stack parser build crossing arcs. The static oracle swaps exactly
//! when the stack order disagrees with an in-order traversal of the
//! gold tree, so projective sentences never trigger it.
//!
//! # Configuration template set (version `config-v1`)
//!
//! Twenty-three templates describe a configuration, writing `s0..s2`
//! for the top three stack items, `b0..b2` for the front of the buffer,
//! `f`/`p` for form and POS, and `ld`/`rd` for the dependency label of
//! a node's leftmost/rightmost child built so far:
//!
//! `s0f; s0p; s0f,s0p; s1f; s1p; s1f,s1p; s2p; b0f; b0p; b0f,b0p; b1f;
//! b1p; b2p; s0p,s1p; s0p,b0p; s0f,s1f; s0p,s1p,b0p; s0p,b0p,b1p;
//! ld(s0); rd(s0); ld(s1); rd(s1);` signed binned distance from `s1`
//! to `s0`.
//!
//! Missing positions render as `<nil>`, the artificial root as
//! `<root>`, an absent child as `<none>`. Each (feature, move) pair
//! owns one weight; features themselves carry no move marker. Changing
//! any of this invalidates saved models, so the version tag must be
//! bumped in lockstep.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use num_traits::{Float, FromPrimitive};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::features::{distance_bin, FeatureBuilder, FeatureVector};
use crate::graph::{NIL_MARK, ROOT_MARK};
use crate::learn::{AveragedWeights, TrainError, TrainOptions};
use crate::treebank::{DependencyGraph, Sentence, Treebank};

/// Version tag of the configuration template set; stored in model files.
pub const CONFIG_TEMPLATE_VERSION: &str = "config-v1";

const NO_CHILD_MARK: &str = "<none>";

/// One parser move. Label payloads are ordinals into the model's label
/// inventory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transition {
    Shift,
    Swap,
    LeftArc(u16),
    RightArc(u16),
}

impl Transition {
    /// Dense id under an inventory of `num_labels` labels: `SHIFT` = 0,
    /// `SWAP` = 1, then all `LEFT-ARC`s, then all `RIGHT-ARC`s.
    pub fn id(self, num_labels: usize) -> u32 {
        match self {
            Transition::Shift => 0,
            Transition::Swap => 1,
            Transition::LeftArc(l) => 2 + l as u32,
            Transition::RightArc(l) => 2 + num_labels as u32 + l as u32,
        }
    }

    /// Inverse of [`Transition::id`].
    pub fn from_id(id: u32, num_labels: usize) -> Transition {
        let l = num_labels as u32;
        assert!(id < 2 + 2 * l, "move id {id} out of range for {num_labels} labels");
        match id {
            0 => Transition::Shift,
            1 => Transition::Swap,
            x if x < 2 + l => Transition::LeftArc((x - 2) as u16),
            x => Transition::RightArc((x - 2 - l) as u16),
        }
    }

    /// Number of distinct moves under an inventory of `num_labels`.
    pub fn count(num_labels: usize) -> u32 {
        2 + 2 * num_labels as u32
    }
}

/// Parser state: stack, buffer, and the arcs built so far, plus child
/// bookkeeping so features and the oracle stay O(1) per query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    stack: Vec<usize>,
    buffer: VecDeque<usize>,
    head: Vec<Option<(usize, u16)>>,
    num_children: Vec<usize>,
    leftmost_child: Vec<Option<(usize, u16)>>,
    rightmost_child: Vec<Option<(usize, u16)>>,
}

impl Configuration {
    /// Starting state for a sentence of `n` tokens: root on the stack,
    /// all tokens in the buffer, no arcs.
    pub fn initial(n: usize) -> Configuration {
        Configuration {
            stack: vec![0],
            buffer: (1..=n).collect(),
            head: vec![None; n + 1],
            num_children: vec![0; n + 1],
            leftmost_child: vec![None; n + 1],
            rightmost_child: vec![None; n + 1],
        }
    }

    pub fn n(&self) -> usize {
        self.head.len() - 1
    }

    pub fn stack(&self) -> &[usize] {
        &self.stack
    }

    pub fn buffer_len(&self) -> usize {
        self.buffer.len()
    }

    /// `k`-th item from the top of the stack (0 = top).
    pub fn stack_item(&self, k: usize) -> Option<usize> {
        self.stack.len().checked_sub(k + 1).map(|i| self.stack[i])
    }

    /// `k`-th item from the front of the buffer (0 = next to read).
    pub fn buffer_item(&self, k: usize) -> Option<usize> {
        self.buffer.get(k).copied()
    }

    /// Head and label ordinal assigned to `dep` so far, if any.
    pub fn head_of(&self, dep: usize) -> Option<(usize, u16)> {
        self.head[dep]
    }

    pub fn is_terminal(&self) -> bool {
        self.buffer.is_empty() && self.stack.len() == 1
    }

    /// Structural legality; label payloads never affect it.
    pub fn is_legal(&self, t: Transition) -> bool {
        let len = self.stack.len();
        match t {
            Transition::Shift => !self.buffer.is_empty(),
            Transition::LeftArc(_) => len >= 2 && self.stack[len - 2] != 0,
            Transition::RightArc(_) => len >= 2,
            Transition::Swap => {
                len >= 2 && self.stack[len - 2] != 0 && self.stack[len - 2] < self.stack[len - 1]
            }
        }
    }

    fn record_child(&mut self, head: usize, dep: usize, label: u16) {
        self.head[dep] = Some((head, label));
        self.num_children[head] += 1;
        if self.leftmost_child[head].is_none_or(|(c, _)| dep < c) {
            self.leftmost_child[head] = Some((dep, label));
        }
        if self.rightmost_child[head].is_none_or(|(c, _)| dep > c) {
            self.rightmost_child[head] = Some((dep, label));
        }
    }

    /// Applies a legal move; calling this with an illegal one is a bug
    /// in the caller.
    pub fn apply(&mut self, t: Transition) {
        debug_assert!(self.is_legal(t), "illegal move {t:?} in {self:?}");
        match t {
            Transition::Shift => {
                let v = self.buffer.pop_front().expect("non-empty buffer");
                self.stack.push(v);
            }
            Transition::Swap => {
                let second = self.stack.remove(self.stack.len() - 2);
                self.buffer.push_front(second);
            }
            Transition::LeftArc(label) => {
                let top = *self.stack.last().expect("stack with two items");
                let second = self.stack.remove(self.stack.len() - 2);
                self.record_child(top, second, label);
            }
            Transition::RightArc(label) => {
                let top = self.stack.pop().expect("stack with two items");
                let second = *self.stack.last().expect("stack with two items");
                self.record_child(second, top, label);
            }
        }
    }

    /// Extracts the parse built so far. Tokens the derivation never
    /// attached (possible only when greedy parsing hits its step cap)
    /// fall back to the root with label ordinal 0.
    pub fn into_graph(&self, labels: &[String]) -> DependencyGraph {
        let n = self.n();
        let mut heads = vec![0usize; n + 1];
        let mut names = vec![String::new(); n + 1];
        for d in 1..=n {
            let (h, l) = self.head[d].unwrap_or((0, 0));
            heads[d] = h;
            names[d] = labels[l as usize].clone();
        }
        DependencyGraph::from_parts(heads, names)
    }
}

/// Hard ceiling on derivation length for a sentence of `n` tokens; the
/// oracle stays well under it, and greedy parsing bails out beyond it.
pub fn step_limit(n: usize) -> usize {
    n * n + 2 * n + 4
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("gold graph is not a valid dependency tree")]
    InvalidTree,
    #[error("gold label `{0}` is missing from the inventory")]
    UnknownLabel(String),
    #[error("oracle exceeded its step limit without finishing")]
    NoProgress,
}

/// Ordinal of each label in inventory order.
pub fn label_index(labels: &[String]) -> HashMap<String, u16> {
    labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), i as u16))
        .collect()
}

/// Position of every node in an in-order traversal of the tree: each
/// node sits after its children with smaller indices and before its
/// children with larger ones. For a projective tree this recovers the
/// linear order; inversions mark exactly the places a swap is needed.
pub fn projective_order(gold: &DependencyGraph) -> Vec<usize> {
    fn visit(v: usize, table: &[Vec<usize>], next: &mut usize, out: &mut [usize]) {
        for &c in table[v].iter().filter(|&&c| c < v) {
            visit(c, table, next, out);
        }
        out[v] = *next;
        *next += 1;
        for &c in table[v].iter().filter(|&&c| c > v) {
            visit(c, table, next, out);
        }
    }
    let table = gold.child_table();
    let mut order = vec![0usize; gold.n() + 1];
    let mut next = 0usize;
    visit(0, &table, &mut next, &mut order);
    order
}

/// Derives the move sequence that rebuilds `gold` exactly. With the top
/// two stack items `top` and `second`:
///
/// 1. `LEFT-ARC` when `second`'s gold head is `top` and all of
///    `second`'s gold children are already attached;
/// 2. else `RIGHT-ARC` when `top`'s gold head is `second` and `top` is
///    likewise finished;
/// 3. else `SWAP` when the pair's in-order positions are inverted;
/// 4. else `SHIFT`.
pub fn static_oracle(
    gold: &DependencyGraph,
    labels: &HashMap<String, u16>,
) -> Result<Vec<Transition>, OracleError> {
    if !gold.validate(false).is_valid() {
        return Err(OracleError::InvalidTree);
    }
    let n = gold.n();
    let label_of = |d: usize| -> Result<u16, OracleError> {
        let name = gold.label_of(d);
        labels
            .get(name)
            .copied()
            .ok_or_else(|| OracleError::UnknownLabel(name.to_string()))
    };
    let gold_children: Vec<usize> = {
        let table = gold.child_table();
        table.iter().map(Vec::len).collect()
    };
    let order = projective_order(gold);
    let mut config = Configuration::initial(n);
    let mut actions = Vec::new();
    while !config.is_terminal() {
        if actions.len() > step_limit(n) {
            return Err(OracleError::NoProgress);
        }
        let t = match (config.stack_item(0), config.stack_item(1)) {
            (Some(top), Some(second)) => {
                let done = |v: usize| config.num_children[v] == gold_children[v];
                if second != 0 && gold.head_of(second) == top && done(second) {
                    Transition::LeftArc(label_of(second)?)
                } else if gold.head_of(top) == second && done(top) {
                    Transition::RightArc(label_of(top)?)
                } else if second != 0 && second < top && order[top] < order[second] {
                    Transition::Swap
                } else if config.buffer_len() > 0 {
                    Transition::Shift
                } else {
                    return Err(OracleError::NoProgress);
                }
            }
            _ if config.buffer_len() > 0 => Transition::Shift,
            _ => return Err(OracleError::NoProgress),
        };
        actions.push(t);
        config.apply(t);
    }
    Ok(actions)
}

/// Hashed features of one configuration under the `config-v1` template
/// set.
pub fn config_features(
    sentence: &Sentence,
    config: &Configuration,
    labels: &[String],
) -> FeatureVector {
    let form = |v: Option<usize>| -> &str {
        match v {
            None => NIL_MARK,
            Some(0) => ROOT_MARK,
            Some(i) => &sentence.token(i).form,
        }
    };
    let pos = |v: Option<usize>| -> &str {
        match v {
            None => NIL_MARK,
            Some(0) => ROOT_MARK,
            Some(i) => &sentence.token(i).pos,
        }
    };
    let child = |v: Option<usize>, table: &[Option<(usize, u16)>]| -> &str {
        match v {
            None => NIL_MARK,
            Some(node) => match table[node] {
                Some((_, label)) => &labels[label as usize],
                None => NO_CHILD_MARK,
            },
        }
    };

    let s0 = config.stack_item(0);
    let s1 = config.stack_item(1);
    let s2 = config.stack_item(2);
    let b0 = config.buffer_item(0);
    let b1 = config.buffer_item(1);
    let b2 = config.buffer_item(2);

    let (s0f, s0p) = (form(s0), pos(s0));
    let (s1f, s1p) = (form(s1), pos(s1));
    let s2p = pos(s2);
    let (b0f, b0p) = (form(b0), pos(b0));
    let (b1f, b1p) = (form(b1), pos(b1));
    let b2p = pos(b2);
    let s0ld = child(s0, &config.leftmost_child);
    let s0rd = child(s0, &config.rightmost_child);
    let s1ld = child(s1, &config.leftmost_child);
    let s1rd = child(s1, &config.rightmost_child);

    let mut b = FeatureBuilder::new();
    b.emit(|s| { let _ = write!(s, "c01:s0f={s0f}"); });
    b.emit(|s| { let _ = write!(s, "c02:s0p={s0p}"); });
    b.emit(|s| { let _ = write!(s, "c03:s0f={s0f}|s0p={s0p}"); });
    b.emit(|s| { let _ = write!(s, "c04:s1f={s1f}"); });
    b.emit(|s| { let _ = write!(s, "c05:s1p={s1p}"); });
    b.emit(|s| { let _ = write!(s, "c06:s1f={s1f}|s1p={s1p}"); });
    b.emit(|s| { let _ = write!(s, "c07:s2p={s2p}"); });
    b.emit(|s| { let _ = write!(s, "c08:b0f={b0f}"); });
    b.emit(|s| { let _ = write!(s, "c09:b0p={b0p}"); });
    b.emit(|s| { let _ = write!(s, "c10:b0f={b0f}|b0p={b0p}"); });
    b.emit(|s| { let _ = write!(s, "c11:b1f={b1f}"); });
    b.emit(|s| { let _ = write!(s, "c12:b1p={b1p}"); });
    b.emit(|s| { let _ = write!(s, "c13:b2p={b2p}"); });
    b.emit(|s| { let _ = write!(s, "c14:s0p={s0p}|s1p={s1p}"); });
    b.emit(|s| { let _ = write!(s, "c15:s0p={s0p}|b0p={b0p}"); });
    b.emit(|s| { let _ = write!(s, "c16:s0f={s0f}|s1f={s1f}"); });
    b.emit(|s| { let _ = write!(s, "c17:s0p={s0p}|s1p={s1p}|b0p={b0p}"); });
    b.emit(|s| { let _ = write!(s, "c18:s0p={s0p}|b0p={b0p}|b1p={b1p}"); });
    b.emit(|s| { let _ = write!(s, "c19:s0ld={s0ld}"); });
    b.emit(|s| { let _ = write!(s, "c20:s0rd={s0rd}"); });
    b.emit(|s| { let _ = write!(s, "c21:s1ld={s1ld}"); });
    b.emit(|s| { let _ = write!(s, "c22:s1rd={s1rd}"); });
    b.emit(|s| match (s0, s1) {
        (Some(a), Some(c)) => {
            let (sign, dist) = if c <= a { ('+', a - c) } else { ('-', c - a) };
            let _ = write!(s, "c23:dist={sign}{}", distance_bin(dist));
        }
        _ => {
            let _ = write!(s, "c23:dist={NIL_MARK}");
        }
    });
    b.finish()
}

/// Greedy shift-reduce parsing model: averaged-perceptron weights over
/// (configuration feature, move) pairs plus the label inventory.
#[derive(Debug, Clone)]
pub struct TransitionModel<W> {
    weights: AveragedWeights<(u64, u32), W>,
    labels: Vec<String>,
}

impl<W> TransitionModel<W>
where
    W: Float + FromPrimitive + std::ops::AddAssign + std::fmt::Debug,
{
    pub fn new(labels: Vec<String>) -> Self {
        assert!(!labels.is_empty(), "label inventory must be non-empty");
        TransitionModel {
            weights: AveragedWeights::new(),
            labels,
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &AveragedWeights<(u64, u32), W> {
        &self.weights
    }

    /// Rebuilds a model (typically from persisted averaged weights).
    pub fn from_parts(labels: Vec<String>, weights: AveragedWeights<(u64, u32), W>) -> Self {
        assert!(!labels.is_empty(), "label inventory must be non-empty");
        TransitionModel { weights, labels }
    }

    pub fn num_transitions(&self) -> u32 {
        Transition::count(self.labels.len())
    }

    fn score(&self, features: &FeatureVector, move_id: u32) -> W {
        let mut total = W::zero();
        for (id, count) in features.iter() {
            total += self.weights.effective((id, move_id)) * W::from_u32(count).expect("count fits");
        }
        total
    }

    /// Best legal move id for the configuration; score ties keep the
    /// smallest id. Returns `None` only when no move is legal, i.e. in
    /// a terminal configuration.
    fn best_legal(&self, features: &FeatureVector, config: &Configuration) -> Option<u32> {
        let mut best: Option<(W, u32)> = None;
        for move_id in 0..self.num_transitions() {
            if !config.is_legal(Transition::from_id(move_id, self.labels.len())) {
                continue;
            }
            let score = self.score(features, move_id);
            if best.as_ref().is_none_or(|(b, _)| score > *b) {
                best = Some((score, move_id));
            }
        }
        best.map(|(_, id)| id)
    }

    /// Parses greedily: repeatedly apply the best legal move until the
    /// configuration is terminal or the step cap trips.
    pub fn parse(&self, sentence: &Sentence) -> DependencyGraph {
        let n = sentence.len();
        let mut config = Configuration::initial(n);
        let mut steps = 0usize;
        while !config.is_terminal() && steps < step_limit(n) {
            let features = config_features(sentence, &config, &self.labels);
            match self.best_legal(&features, &config) {
                Some(move_id) => config.apply(Transition::from_id(move_id, self.labels.len())),
                None => break,
            }
            steps += 1;
        }
        config.into_graph(&self.labels)
    }
}

/// Trains a greedy model by replaying each sentence's oracle sequence:
/// at every configuration the model predicts among legal moves, a wrong
/// prediction shifts weight from the predicted move's features to the
/// oracle move's, and the derivation then follows the oracle regardless.
/// Sentence order is reshuffled every epoch from a ChaCha8 stream seeded
/// with `options.seed`, so training is deterministic per seed.
pub fn train_transition_model<W>(
    treebank: &Treebank,
    options: &TrainOptions,
) -> Result<TransitionModel<W>, TrainError>
where
    W: Float + FromPrimitive + std::ops::AddAssign + std::fmt::Debug,
{
    if treebank.is_empty() {
        return Err(TrainError::EmptyTreebank);
    }
    let labels = treebank.label_inventory();
    let index = label_index(&labels);
    let mut oracles = Vec::with_capacity(treebank.len());
    for (i, sentence) in treebank.sentences.iter().enumerate() {
        let seq = static_oracle(&sentence.graph(), &index)
            .map_err(|_| TrainError::InvalidGoldTree { index: i })?;
        oracles.push(seq);
    }
    let mut model = TransitionModel::new(labels);
    let num_labels = model.labels.len();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut order: Vec<usize> = (0..treebank.len()).collect();
    for _ in 0..options.epochs {
        order.shuffle(&mut rng);
        for &si in &order {
            let sentence = &treebank.sentences[si];
            let mut config = Configuration::initial(sentence.len());
            for &gold_move in &oracles[si] {
                let features = config_features(sentence, &config, &model.labels);
                let gold_id = gold_move.id(num_labels);
                if let Some(pred_id) = model.best_legal(&features, &config) {
                    if pred_id != gold_id {
                        for (id, count) in features.iter() {
                            let delta = W::from_u32(count).expect("count fits");
                            model.weights.add((id, gold_id), delta);
                            model.weights.add((id, pred_id), -delta);
                        }
                    }
                }
                model.weights.tick();
                config.apply(gold_move);
            }
        }
    }
    model.weights.finalize();
    Ok(model)
}
