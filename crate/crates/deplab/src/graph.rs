//! Arc-factored graph parser: hashed arc features, a labeled score
//! matrix, spanning-tree decoding, and averaged-perceptron training.
//!
//! # Arc template set (version `arc-v1`)
//!
//! Twelve templates describe an arc `head -> dependent`, writing `hf/hp`
//! for the head's form and POS, `df/dp` for the dependent's, `bp` for a
//! token strictly between them, and suffix `+1`/`-1` for linear
//! neighbours:
//!
//!  1. `hf`
//!  2. `hp`
//!  3. `df`
//!  4. `dp`
//!  5. `hf, hp`
//!  6. `df, dp`
//!  7. `hf, df`
//!  8. `hp, dp`
//!  9. `hf, hp, df, dp`
//! 10. `hp, bp, dp` - one instantiation per between token
//! 11. `hp, hp+1, dp-1, dp` and `hp-1, hp, dp+1, dp` - the two
//!     surrounding-POS windows
//! 12. signed, binned linear distance from head to dependent
//!
//! Every instantiation is emitted twice: bare, and with the arc label
//! appended. The artificial root renders as `<root>`, positions outside
//! the sentence as `<nil>`. Changing any of this invalidates saved
//! models, so the version tag must be bumped in lockstep.

use std::fmt::Write as _;

use num_traits::{Float, FromPrimitive};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::decode::{max_arborescence, max_arborescence_single_root, ArcMatrix, ArcScore};
use crate::features::{distance_bin, FeatureBuilder, FeatureVector};
use crate::learn::{AveragedWeights, TrainError, TrainOptions};
use crate::treebank::{DependencyGraph, Sentence, Treebank};

/// Version tag of the arc template set; stored in model files.
pub const ARC_TEMPLATE_VERSION: &str = "arc-v1";

/// Rendering of the artificial root in feature strings.
pub(crate) const ROOT_MARK: &str = "<root>";
/// Rendering of positions outside the sentence in feature strings.
pub(crate) const NIL_MARK: &str = "<nil>";

/// Which variants of each template instantiation to emit.
#[derive(Clone, Copy)]
enum LabelMode<'a> {
    Unlabeled,
    LabeledOnly(&'a str),
    Both(&'a str),
}

fn form_pos(sentence: &Sentence, v: usize) -> (&str, &str) {
    if v == 0 {
        (ROOT_MARK, ROOT_MARK)
    } else {
        let t = sentence.token(v);
        (&t.form, &t.pos)
    }
}

fn pos_at(sentence: &Sentence, v: isize) -> &str {
    if v == 0 {
        ROOT_MARK
    } else if v < 0 || v as usize > sentence.len() {
        NIL_MARK
    } else {
        &sentence.token(v as usize).pos
    }
}

fn signed_distance(head: usize, dep: usize) -> (char, usize) {
    if head < dep {
        ('+', dep - head)
    } else {
        ('-', head - dep)
    }
}

fn build_arc_features(
    sentence: &Sentence,
    head: usize,
    dep: usize,
    mode: LabelMode<'_>,
) -> FeatureVector {
    let (hf, hp) = form_pos(sentence, head);
    let (df, dp) = form_pos(sentence, dep);
    let mut b = FeatureBuilder::new();
    {
        let mut emit = |fill: &dyn Fn(&mut String)| match mode {
            LabelMode::Unlabeled => b.emit(fill),
            LabelMode::LabeledOnly(l) => b.emit(|s| {
                fill(s);
                let _ = write!(s, "|L={l}");
            }),
            LabelMode::Both(l) => b.emit_with_label(l, fill),
        };
        emit(&|s| { let _ = write!(s, "01:hf={hf}"); });
        emit(&|s| { let _ = write!(s, "02:hp={hp}"); });
        emit(&|s| { let _ = write!(s, "03:df={df}"); });
        emit(&|s| { let _ = write!(s, "04:dp={dp}"); });
        emit(&|s| { let _ = write!(s, "05:hf={hf}|hp={hp}"); });
        emit(&|s| { let _ = write!(s, "06:df={df}|dp={dp}"); });
        emit(&|s| { let _ = write!(s, "07:hf={hf}|df={df}"); });
        emit(&|s| { let _ = write!(s, "08:hp={hp}|dp={dp}"); });
        emit(&|s| { let _ = write!(s, "09:hf={hf}|hp={hp}|df={df}|dp={dp}"); });
        let (lo, hi) = if head < dep { (head, dep) } else { (dep, head) };
        for between in lo + 1..hi {
            let bp = pos_at(sentence, between as isize);
            emit(&|s| { let _ = write!(s, "10:hp={hp}|bp={bp}|dp={dp}"); });
        }
        let hp_next = pos_at(sentence, head as isize + 1);
        let hp_prev = pos_at(sentence, head as isize - 1);
        let dp_next = pos_at(sentence, dep as isize + 1);
        let dp_prev = pos_at(sentence, dep as isize - 1);
        emit(&|s| { let _ = write!(s, "11:hp={hp}|hp+1={hp_next}|dp-1={dp_prev}|dp={dp}"); });
        emit(&|s| { let _ = write!(s, "11:hp-1={hp_prev}|hp={hp}|dp={dp}|dp+1={dp_next}"); });
        let (sign, dist) = signed_distance(head, dep);
        let bin = distance_bin(dist);
        emit(&|s| { let _ = write!(s, "12:dist={sign}{bin}"); });
    }
    b.finish()
}

/// Full feature vector of a labeled arc: every template instantiation
/// bare and with the label appended.
pub fn extract_arc_features(
    sentence: &Sentence,
    head: usize,
    dep: usize,
    label: &str,
) -> FeatureVector {
    build_arc_features(sentence, head, dep, LabelMode::Both(label))
}

/// The label-independent half of the arc features.
pub fn arc_features_unlabeled(sentence: &Sentence, head: usize, dep: usize) -> FeatureVector {
    build_arc_features(sentence, head, dep, LabelMode::Unlabeled)
}

/// The label-bearing half; merged with [`arc_features_unlabeled`] this
/// equals [`extract_arc_features`].
pub fn arc_features_labeled_only(
    sentence: &Sentence,
    head: usize,
    dep: usize,
    label: &str,
) -> FeatureVector {
    build_arc_features(sentence, head, dep, LabelMode::LabeledOnly(label))
}

/// Labeled arc scores for one sentence: arc scores already maximized
/// over labels, plus which label won each cell.
#[derive(Debug, Clone)]
pub struct LabeledScores<S> {
    matrix: ArcMatrix<S>,
    best_label: Vec<u16>,
}

impl<S: ArcScore> LabeledScores<S> {
    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn score(&self, head: usize, dep: usize) -> S {
        self.matrix.get(head, dep)
    }

    /// Ordinal of the winning label for the arc `head -> dep`.
    pub fn label_id(&self, head: usize, dep: usize) -> u16 {
        self.best_label[head * (self.n() + 1) + dep]
    }

    pub fn matrix(&self) -> &ArcMatrix<S> {
        &self.matrix
    }

    /// Decodes the best tree and attaches the winning label of each
    /// chosen arc. `labels` maps label ordinals back to strings.
    pub fn decode(&self, strict_root: bool, labels: &[String]) -> DependencyGraph {
        let heads = if strict_root {
            max_arborescence_single_root(&self.matrix)
        } else {
            max_arborescence(&self.matrix)
        };
        let n = self.n();
        let mut out_labels = vec![String::new(); n + 1];
        for d in 1..=n {
            out_labels[d] = labels[self.label_id(heads[d], d) as usize].clone();
        }
        DependencyGraph::from_parts(heads, out_labels)
    }
}

/// Arc-factored parsing model: averaged-perceptron weights over hashed
/// arc features plus the label inventory defining label ordinals.
#[derive(Debug, Clone)]
pub struct ArcFactorModel<W> {
    weights: AveragedWeights<u64, W>,
    labels: Vec<String>,
}

impl<W> ArcFactorModel<W>
where
    W: Float + FromPrimitive + std::ops::AddAssign + std::fmt::Debug,
{
    pub fn new(labels: Vec<String>) -> Self {
        assert!(!labels.is_empty(), "label inventory must be non-empty");
        ArcFactorModel {
            weights: AveragedWeights::new(),
            labels,
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &AveragedWeights<u64, W> {
        &self.weights
    }

    /// Rebuilds a model (typically from persisted averaged weights).
    pub fn from_parts(labels: Vec<String>, weights: AveragedWeights<u64, W>) -> Self {
        assert!(!labels.is_empty(), "label inventory must be non-empty");
        ArcFactorModel { weights, labels }
    }

    /// Dot product of the current scoring weights with a feature vector.
    pub fn dot(&self, features: &FeatureVector) -> W {
        let mut total = W::zero();
        for (id, count) in features.iter() {
            total += self.weights.effective(id) * W::from_u32(count).expect("count fits");
        }
        total
    }

    /// Scores every arc of `sentence` under every label and keeps the
    /// best label per arc; label ties keep the smaller ordinal. With no
    /// trained weights all scores are zero and the first label in
    /// inventory order wins everywhere.
    pub fn score_arcs(&self, sentence: &Sentence) -> LabeledScores<W> {
        let n = sentence.len();
        let mut matrix = ArcMatrix::new(n);
        let mut best_label = vec![0u16; (n + 1) * (n + 1)];
        for head in 0..=n {
            for dep in 1..=n {
                if head == dep {
                    continue;
                }
                let base = self.dot(&arc_features_unlabeled(sentence, head, dep));
                let mut best: Option<(W, u16)> = None;
                for (ordinal, label) in self.labels.iter().enumerate() {
                    let labeled = arc_features_labeled_only(sentence, head, dep, label);
                    let score = base + self.dot(&labeled);
                    if best.as_ref().is_none_or(|(b, _)| score > *b) {
                        best = Some((score, ordinal as u16));
                    }
                }
                let (score, ordinal) = best.expect("non-empty label inventory");
                matrix.set(head, dep, score);
                best_label[head * (n + 1) + dep] = ordinal;
            }
        }
        LabeledScores { matrix, best_label }
    }

    /// Decodes the best labeled tree for `sentence`.
    pub fn parse(&self, sentence: &Sentence, strict_root: bool) -> DependencyGraph {
        self.score_arcs(sentence).decode(strict_root, &self.labels)
    }

    fn update(&mut self, sentence: &Sentence, gold: &DependencyGraph, predicted: &DependencyGraph) {
        for d in 1..=sentence.len() {
            let (gh, gl) = (gold.head_of(d), gold.label_of(d));
            let (ph, pl) = (predicted.head_of(d), predicted.label_of(d));
            if gh == ph && gl == pl {
                continue;
            }
            for (id, count) in extract_arc_features(sentence, gh, d, gl).iter() {
                self.weights.add(id, W::from_u32(count).expect("count fits"));
            }
            for (id, count) in extract_arc_features(sentence, ph, d, pl).iter() {
                self.weights.add(id, -W::from_u32(count).expect("count fits"));
            }
        }
    }
}

/// Trains an arc-factored model with the averaged structured perceptron:
/// decode each sentence with current weights, and on a labeled mismatch
/// add the gold arcs' features and subtract the predicted arcs'.
/// Sentence order is reshuffled every epoch from a ChaCha8 stream seeded
/// with `options.seed`, so training is deterministic per seed.
pub fn train_graph_model<W>(
    treebank: &Treebank,
    options: &TrainOptions,
) -> Result<ArcFactorModel<W>, TrainError>
where
    W: Float + FromPrimitive + std::ops::AddAssign + std::fmt::Debug,
{
    if treebank.is_empty() {
        return Err(TrainError::EmptyTreebank);
    }
    let mut model = ArcFactorModel::new(treebank.label_inventory());
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut order: Vec<usize> = (0..treebank.len()).collect();
    for _ in 0..options.epochs {
        order.shuffle(&mut rng);
        for &si in &order {
            let sentence = &treebank.sentences[si];
            let gold = sentence.graph();
            let labels = model.labels.clone();
            let predicted = model.score_arcs(sentence).decode(options.strict_root, &labels);
            if predicted != gold {
                model.update(sentence, &gold, &predicted);
            }
            model.weights.tick();
        }
    }
    model.weights.finalize();
    Ok(model)
}
