//! Attachment scoring for predicted parses.
//!
//! Three micro-averaged percentages over counted tokens: unlabeled
//! attachment (head correct), labeled attachment (head and label both
//! correct), and label accuracy (label correct regardless of head).
//! Punctuation tokens can be excluded from counting; whether a token is
//! punctuation is decided from the GOLD annotation only, so the token
//! set being scored never depends on the system under evaluation.
//!
//! Percentages are kept unrounded internally; [`round2`] is applied at
//! presentation time only.

use std::fmt;

use thiserror::Error;

use crate::treebank::{DependencyGraph, Sentence, Treebank};

/// Rounds to two decimals, halves away from zero.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Decides which gold tokens count as punctuation. A token matches when
/// its gold dependency label equals `deprel` (ASCII case-insensitive),
/// or, if `pos_tag` is set, when its gold POS tag equals it exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PunctuationPolicy {
    pub deprel: String,
    pub pos_tag: Option<String>,
}

impl Default for PunctuationPolicy {
    fn default() -> Self {
        PunctuationPolicy {
            deprel: "PUNCT".to_string(),
            pos_tag: None,
        }
    }
}

impl PunctuationPolicy {
    /// True when the gold annotation of `sentence`'s token `d` is
    /// punctuation under this policy.
    pub fn is_punct(&self, sentence: &Sentence, d: usize) -> bool {
        let token = sentence.token(d);
        if token.deprel.eq_ignore_ascii_case(&self.deprel) {
            return true;
        }
        self.pos_tag.as_deref() == Some(token.pos.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlignError {
    #[error("gold has {gold} sentences but predictions have {pred}")]
    SentenceCount { gold: usize, pred: usize },
    #[error("sentence {index}: gold has {gold} tokens but the prediction has {pred}")]
    SentenceLength { index: usize, gold: usize, pred: usize },
    #[error("sentence {index}, token {token}: form differs between gold and prediction")]
    FormMismatch { index: usize, token: usize },
}

/// Per-sentence tallies over counted tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SentenceCounts {
    pub counted: usize,
    pub head_correct: usize,
    pub labeled_correct: usize,
    pub label_correct: usize,
}

impl SentenceCounts {
    /// Unlabeled attachment score; an empty token set scores 100.
    pub fn uas(&self) -> f64 {
        percent(self.head_correct, self.counted)
    }

    pub fn las(&self) -> f64 {
        percent(self.labeled_correct, self.counted)
    }
}

fn percent(hits: usize, total: usize) -> f64 {
    if total == 0 {
        100.0
    } else {
        100.0 * hits as f64 / total as f64
    }
}

/// Micro-averaged scores over a whole treebank, with the per-sentence
/// tallies they were pooled from.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub uas: f64,
    pub las: f64,
    pub label_accuracy: f64,
    pub token_count: usize,
    pub per_sentence: Vec<SentenceCounts>,
}

impl EvalResult {
    pub fn from_counts(per_sentence: Vec<SentenceCounts>) -> EvalResult {
        let counted: usize = per_sentence.iter().map(|c| c.counted).sum();
        let heads: usize = per_sentence.iter().map(|c| c.head_correct).sum();
        let labeled: usize = per_sentence.iter().map(|c| c.labeled_correct).sum();
        let labels: usize = per_sentence.iter().map(|c| c.label_correct).sum();
        EvalResult {
            uas: percent(heads, counted),
            las: percent(labeled, counted),
            label_accuracy: percent(labels, counted),
            token_count: counted,
            per_sentence,
        }
    }
}

impl fmt::Display for EvalResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tokens = {}", self.token_count)?;
        writeln!(f, "uas = {:.2}", round2(self.uas))?;
        writeln!(f, "las = {:.2}", round2(self.las))?;
        write!(f, "label_accuracy = {:.2}", round2(self.label_accuracy))
    }
}

fn count_sentence(
    sentence: &Sentence,
    gold: &DependencyGraph,
    pred: &DependencyGraph,
    include_punct: bool,
    policy: &PunctuationPolicy,
) -> SentenceCounts {
    let mut counts = SentenceCounts::default();
    for d in 1..=sentence.len() {
        if !include_punct && policy.is_punct(sentence, d) {
            continue;
        }
        counts.counted += 1;
        let head_ok = pred.head_of(d) == gold.head_of(d);
        let label_ok = pred.label_of(d) == gold.label_of(d);
        counts.head_correct += usize::from(head_ok);
        counts.label_correct += usize::from(label_ok);
        counts.labeled_correct += usize::from(head_ok && label_ok);
    }
    counts
}

/// Scores in-memory parses against the gold treebank.
pub fn evaluate_graphs(
    gold: &Treebank,
    parses: &[DependencyGraph],
    include_punct: bool,
    policy: &PunctuationPolicy,
) -> Result<EvalResult, AlignError> {
    if gold.len() != parses.len() {
        return Err(AlignError::SentenceCount {
            gold: gold.len(),
            pred: parses.len(),
        });
    }
    let mut per_sentence = Vec::with_capacity(gold.len());
    for (i, (sentence, pred)) in gold.sentences.iter().zip(parses).enumerate() {
        if pred.n() != sentence.len() {
            return Err(AlignError::SentenceLength {
                index: i + 1,
                gold: sentence.len(),
                pred: pred.n(),
            });
        }
        let gold_graph = sentence.graph();
        per_sentence.push(count_sentence(sentence, &gold_graph, pred, include_punct, policy));
    }
    Ok(EvalResult::from_counts(per_sentence))
}

/// Scores a predicted treebank against the gold one, first checking the
/// two line up sentence-by-sentence and form-by-form.
pub fn evaluate_with(
    gold: &Treebank,
    pred: &Treebank,
    include_punct: bool,
    policy: &PunctuationPolicy,
) -> Result<EvalResult, AlignError> {
    if gold.len() != pred.len() {
        return Err(AlignError::SentenceCount {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    let mut parses = Vec::with_capacity(pred.len());
    for (i, (g, p)) in gold.sentences.iter().zip(&pred.sentences).enumerate() {
        if g.len() != p.len() {
            return Err(AlignError::SentenceLength {
                index: i + 1,
                gold: g.len(),
                pred: p.len(),
            });
        }
        for d in 1..=g.len() {
            if g.token(d).form != p.token(d).form {
                return Err(AlignError::FormMismatch { index: i + 1, token: d });
            }
        }
        parses.push(p.graph());
    }
    evaluate_graphs(gold, &parses, include_punct, policy)
}

/// [`evaluate_with`] under the default punctuation policy.
pub fn evaluate(
    gold: &Treebank,
    pred: &Treebank,
    include_punct: bool,
) -> Result<EvalResult, AlignError> {
    evaluate_with(gold, pred, include_punct, &PunctuationPolicy::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::Token;

    fn tok(index: usize, form: &str, pos: &str, head: usize, deprel: &str) -> Token {
        Token {
            index,
            form: form.to_string(),
            lemma: "_".to_string(),
            cpos: pos.to_string(),
            pos: pos.to_string(),
            feats: "_".to_string(),
            head,
            deprel: deprel.to_string(),
        }
    }

    fn sentence_from(heads: &[usize], labels: &[&str], pos: &[&str]) -> Sentence {
        let tokens = heads
            .iter()
            .zip(labels)
            .zip(pos)
            .enumerate()
            .map(|(i, ((&h, &l), &p))| tok(i + 1, &format!("w{}", i + 1), p, h, l))
            .collect();
        Sentence::new(tokens).unwrap()
    }

    fn ten_token_pair() -> (Treebank, Treebank) {
        let pos = ["N", "V", "N", "A", "N", "R", "V", "N", "R", "CH"];
        let gold = sentence_from(
            &[2, 0, 2, 3, 4, 2, 6, 7, 2, 2],
            &["SUB", "ROOT", "DOB", "NMOD", "NMOD", "VMOD", "DOB", "NMOD", "ADV", "PUNCT"],
            &pos,
        );
        let pred = sentence_from(
            &[2, 0, 2, 3, 4, 2, 6, 2, 3, 3],
            &["SUB", "ROOT", "DOB", "NMOD", "NMOD", "VMOD", "DET", "NMOD", "ADV", "DOB"],
            &pos,
        );
        (Treebank::new(vec![gold]), Treebank::new(vec![pred]))
    }

    #[test]
    fn hand_counted_scores_match() {
        let (gold, pred) = ten_token_pair();
        let r = evaluate(&gold, &pred, true).unwrap();
        assert_eq!(r.token_count, 10);
        assert_eq!(round2(r.uas), 70.00);
        assert_eq!(round2(r.las), 60.00);
        assert_eq!(round2(r.label_accuracy), 80.00);
    }

    #[test]
    fn hand_counted_scores_match_without_punctuation() {
        let (gold, pred) = ten_token_pair();
        let r = evaluate(&gold, &pred, false).unwrap();
        assert_eq!(r.token_count, 9);
        assert_eq!(round2(r.uas), 77.78);
        assert_eq!(round2(r.las), 66.67);
        assert_eq!(round2(r.label_accuracy), 88.89);
    }

    #[test]
    fn identical_treebanks_score_one_hundred() {
        let (gold, _) = ten_token_pair();
        let r = evaluate(&gold, &gold, true).unwrap();
        assert_eq!(r.uas, 100.0);
        assert_eq!(r.las, 100.0);
        assert_eq!(r.label_accuracy, 100.0);
    }

    #[test]
    fn labeled_score_never_exceeds_unlabeled() {
        let (gold, pred) = ten_token_pair();
        for include in [true, false] {
            let r = evaluate(&gold, &pred, include).unwrap();
            assert!(r.las <= r.uas);
            assert!(r.las <= r.label_accuracy);
        }
    }

    #[test]
    fn punctuation_only_sentences_score_one_hundred_when_excluded() {
        let gold = Treebank::new(vec![sentence_from(&[0], &["PUNCT"], &["CH"])]);
        let pred = Treebank::new(vec![sentence_from(&[0], &["PUNCT"], &["CH"])]);
        let r = evaluate(&gold, &pred, false).unwrap();
        assert_eq!(r.token_count, 0);
        assert_eq!(r.uas, 100.0);
        assert_eq!(r.las, 100.0);
    }

    #[test]
    fn pos_fallback_widens_the_punctuation_set() {
        let gold = Treebank::new(vec![sentence_from(
            &[2, 0, 2],
            &["SUB", "ROOT", "X"],
            &["N", "V", "CH"],
        )]);
        let policy = PunctuationPolicy {
            deprel: "PUNCT".to_string(),
            pos_tag: Some("CH".to_string()),
        };
        let r = evaluate_with(&gold, &gold, false, &policy).unwrap();
        assert_eq!(r.token_count, 2);
        let r_default = evaluate(&gold, &gold, false).unwrap();
        assert_eq!(r_default.token_count, 3);
    }

    #[test]
    fn punctuation_label_matching_ignores_ascii_case() {
        let gold = Treebank::new(vec![sentence_from(&[0, 1], &["ROOT", "punct"], &["V", "CH"])]);
        let r = evaluate(&gold, &gold, false).unwrap();
        assert_eq!(r.token_count, 1);
    }

    #[test]
    fn misaligned_inputs_are_rejected() {
        let (gold, _) = ten_token_pair();
        let empty = Treebank::default();
        assert_eq!(
            evaluate(&gold, &empty, true).unwrap_err(),
            AlignError::SentenceCount { gold: 1, pred: 0 }
        );

        let short = Treebank::new(vec![sentence_from(&[0], &["ROOT"], &["V"])]);
        assert_eq!(
            evaluate(&gold, &short, true).unwrap_err(),
            AlignError::SentenceLength { index: 1, gold: 10, pred: 1 }
        );

        let mut renamed = gold.clone();
        renamed.sentences[0] = {
            let mut tokens: Vec<Token> = (1..=10)
                .map(|i| {
                    let t = gold.sentences[0].token(i);
                    tok(i, &t.form, &t.pos, t.head, &t.deprel)
                })
                .collect();
            tokens[4].form = "different".to_string();
            Sentence::new(tokens).unwrap()
        };
        assert_eq!(
            evaluate(&gold, &renamed, true).unwrap_err(),
            AlignError::FormMismatch { index: 1, token: 5 }
        );
    }

    #[test]
    fn display_uses_two_decimals() {
        let (gold, pred) = ten_token_pair();
        let text = evaluate(&gold, &pred, false).unwrap().to_string();
        assert!(text.contains("tokens = 9"));
        assert!(text.contains("uas = 77.78"));
        assert!(text.contains("las = 66.67"));
        assert!(text.contains("label_accuracy = 88.89"));
    }

    #[test]
    fn rounding_is_half_away_from_zero_at_two_decimals() {
        assert_eq!(round2(77.7777), 77.78);
        assert_eq!(round2(66.664), 66.66);
        assert_eq!(round2(66.665000001), 66.67);
        assert_eq!(round2(100.0), 100.0);
    }
}
