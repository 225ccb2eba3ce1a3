//! Treebank data model and CoNLL file format support.
//!
//! A sentence is a contiguous run of tokens indexed `1..=n`; the
//! artificial root occupies index 0 and is never stored as a token.
//! Files use the ten-column tab-separated CoNLL layout (index, form,
//! lemma, coarse POS, POS, feats, head, deprel, projective head,
//! projective deprel); the last two columns are ignored on input and
//! written back as `_`. Token fields are kept as raw strings, so a file
//! in canonical form round-trips byte for byte.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// One word of a sentence. `index` is 1-based; `head` is 0 for the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub index: usize,
    pub form: String,
    pub lemma: String,
    pub cpos: String,
    pub pos: String,
    pub feats: String,
    pub head: usize,
    pub deprel: String,
}

/// Single-head dependency structure for a sentence of `n` words: one
/// head and one label per dependent. Instances are not forced to be
/// trees — [`DependencyGraph::validate`] reports structural violations,
/// which keeps broken annotations representable and diagnosable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    /// `heads[d]` is the head of dependent `d` for `d` in `1..=n`; slot 0 is unused.
    heads: Vec<usize>,
    /// `labels[d]` is the arc label of dependent `d`; slot 0 is unused.
    labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    tokens: Vec<Token>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Treebank {
    pub sentences: Vec<Sentence>,
}

/// Errors from programmatic construction of sentences and graphs.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("sentence must contain at least one token")]
    Empty,
    #[error("token {found} appears where index {expected} was expected")]
    NonContiguousIndex { expected: usize, found: usize },
    #[error("token {index} has head {head} outside 0..={len}")]
    HeadOutOfRange { index: usize, head: usize, len: usize },
    #[error("token {index} names itself as head")]
    SelfHead { index: usize },
    #[error("token {index} has an empty dependency label")]
    EmptyDeprel { index: usize },
    #[error("dependent {dep} has more than one incoming arc")]
    DuplicateDependent { dep: usize },
    #[error("dependent {dep} has no incoming arc")]
    MissingDependent { dep: usize },
}

/// Errors raised while reading a CoNLL file. Every variant that points
/// at file content carries the 1-based line number.
#[derive(Debug, Error)]
pub enum ConllError {
    #[error("read failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected 10 tab-separated columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: {field} column is not a non-negative integer: {value:?}")]
    BadInteger {
        line: usize,
        field: &'static str,
        value: String,
    },
    #[error("line {line}: token index {found} out of order (expected {expected})")]
    NonContiguousIndex {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: head {head} outside 0..={len}")]
    HeadOutOfRange { line: usize, head: usize, len: usize },
    #[error("line {line}: token names itself as head")]
    SelfHead { line: usize },
    #[error("line {line}: empty dependency label")]
    EmptyDeprel { line: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SplitError {
    #[error("fold count {k} out of range: need 2 <= k <= {sentences} (sentence count)")]
    KOutOfRange { k: usize, sentences: usize },
}

impl Sentence {
    /// Builds a sentence, checking token indices are `1..=n`, heads are in
    /// range, no token is its own head, and every deprel is non-empty.
    pub fn new(tokens: Vec<Token>) -> Result<Self, BuildError> {
        if tokens.is_empty() {
            return Err(BuildError::Empty);
        }
        let len = tokens.len();
        for (i, tok) in tokens.iter().enumerate() {
            let expected = i + 1;
            if tok.index != expected {
                return Err(BuildError::NonContiguousIndex {
                    expected,
                    found: tok.index,
                });
            }
            if tok.head > len {
                return Err(BuildError::HeadOutOfRange {
                    index: tok.index,
                    head: tok.head,
                    len,
                });
            }
            if tok.head == tok.index {
                return Err(BuildError::SelfHead { index: tok.index });
            }
            if tok.deprel.is_empty() {
                return Err(BuildError::EmptyDeprel { index: tok.index });
            }
        }
        Ok(Sentence { tokens })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false // by construction a sentence has at least one token
    }

    /// Token at 1-based position `index`.
    pub fn token(&self, index: usize) -> &Token {
        &self.tokens[index - 1]
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    /// The annotated dependency structure of this sentence.
    pub fn graph(&self) -> DependencyGraph {
        let mut heads = vec![0usize; self.len() + 1];
        let mut labels = vec![String::new(); self.len() + 1];
        for tok in &self.tokens {
            heads[tok.index] = tok.head;
            labels[tok.index] = tok.deprel.clone();
        }
        DependencyGraph { heads, labels }
    }

    /// Copy of this sentence carrying the heads and labels of `parse`
    /// instead of its own annotation. Panics if lengths differ.
    pub fn with_parse(&self, parse: &DependencyGraph) -> Sentence {
        assert_eq!(self.len(), parse.n(), "parse length mismatch");
        let tokens = self
            .tokens
            .iter()
            .map(|tok| Token {
                head: parse.head_of(tok.index),
                deprel: parse.label_of(tok.index).to_string(),
                ..tok.clone()
            })
            .collect();
        Sentence { tokens }
    }
}

impl DependencyGraph {
    /// Builds a graph from per-dependent head and label vectors of length
    /// `n + 1` (slot 0 unused). Head values are not range-checked here so
    /// that invalid annotations remain representable; see [`Self::validate`].
    pub fn from_parts(heads: Vec<usize>, labels: Vec<String>) -> Self {
        assert_eq!(heads.len(), labels.len(), "heads/labels length mismatch");
        assert!(!heads.is_empty(), "need slot 0 plus at least zero words");
        DependencyGraph { heads, labels }
    }

    /// Builds a graph from an arc list, requiring exactly one arc per
    /// dependent in `1..=n`.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize, String)]) -> Result<Self, BuildError> {
        let mut heads = vec![usize::MAX; n + 1];
        let mut labels = vec![String::new(); n + 1];
        for (head, dep, label) in arcs {
            if *dep == 0 || *dep > n {
                return Err(BuildError::MissingDependent { dep: *dep });
            }
            if heads[*dep] != usize::MAX {
                return Err(BuildError::DuplicateDependent { dep: *dep });
            }
            heads[*dep] = *head;
            labels[*dep] = label.clone();
        }
        if let Some(dep) = (1..=n).find(|&d| heads[d] == usize::MAX) {
            return Err(BuildError::MissingDependent { dep });
        }
        heads[0] = 0;
        Ok(DependencyGraph { heads, labels })
    }

    /// Number of words (excluding the artificial root).
    pub fn n(&self) -> usize {
        self.heads.len() - 1
    }

    pub fn head_of(&self, dep: usize) -> usize {
        self.heads[dep]
    }

    pub fn label_of(&self, dep: usize) -> &str {
        &self.labels[dep]
    }

    /// Arcs as (head, dependent, label), in dependent order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, &str)> {
        (1..=self.n()).map(move |d| (self.heads[d], d, self.labels[d].as_str()))
    }

    /// Dependents of `head` in ascending position order.
    pub fn children(&self, head: usize) -> Vec<usize> {
        (1..=self.n()).filter(|&d| self.heads[d] == head).collect()
    }

    /// Child lists for every node `0..=n`, each in ascending order.
    pub fn child_table(&self) -> Vec<Vec<usize>> {
        let mut table = vec![Vec::new(); self.n() + 1];
        for d in 1..=self.n() {
            let h = self.heads[d];
            if h <= self.n() {
                table[h].push(d);
            }
        }
        table
    }

    /// Checks single-head structure for being a tree rooted at 0:
    /// heads in range, no self-loops, no cycles, every word connected to
    /// the root. With `strict_root` the root must have exactly one child.
    pub fn validate(&self, strict_root: bool) -> ValidationReport {
        let n = self.n();
        let mut violations = Vec::new();
        for d in 1..=n {
            let h = self.heads[d];
            if h == d {
                violations.push(Violation::SelfHead { dep: d });
            } else if h > n {
                violations.push(Violation::HeadOutOfRange { dep: d, head: h });
            }
        }

        // Walk head chains. 0 = unvisited, 1 = on current walk, 2 = reaches
        // the root, 3 = trapped (cycle member or above a broken head).
        let mut state = vec![0u8; n + 1];
        state[0] = 2;
        for start in 1..=n {
            if state[start] != 0 {
                continue;
            }
            let mut path = Vec::new();
            let mut v = start;
            let outcome = loop {
                if v > n {
                    break 3; // chain leaves the sentence through a broken head
                }
                match state[v] {
                    1 => {
                        // Found a new cycle: the part of `path` from `v` on.
                        let pos = path.iter().position(|&p| p == v).unwrap();
                        violations.push(Violation::Cycle {
                            nodes: path[pos..].to_vec(),
                        });
                        break 3;
                    }
                    2 => break 2,
                    3 => break 3,
                    _ => {
                        if self.heads[v] == v {
                            break 3; // self-headed: nothing above this node
                        }
                        state[v] = 1;
                        path.push(v);
                        v = self.heads[v];
                    }
                }
            };
            for &p in &path {
                state[p] = outcome;
            }
        }
        for (d, &s) in state.iter().enumerate().skip(1) {
            if s == 3 {
                violations.push(Violation::DisconnectedFromRoot { dep: d });
            }
        }

        if strict_root {
            let root_children: Vec<usize> = (1..=n).filter(|&d| self.heads[d] == 0).collect();
            if root_children.is_empty() {
                violations.push(Violation::NoRootChild);
            } else if root_children.len() > 1 {
                violations.push(Violation::MultipleRootChildren {
                    children: root_children,
                });
            }
        }
        violations.sort();
        ValidationReport { violations }
    }
}

/// One structural defect found by [`DependencyGraph::validate`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    SelfHead { dep: usize },
    HeadOutOfRange { dep: usize, head: usize },
    Cycle { nodes: Vec<usize> },
    DisconnectedFromRoot { dep: usize },
    NoRootChild,
    MultipleRootChildren { children: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Convenience wrapper: validate the annotation of `sentence`.
pub fn validate_graph(sentence: &Sentence, strict_root: bool) -> ValidationReport {
    sentence.graph().validate(strict_root)
}

impl Treebank {
    pub fn new(sentences: Vec<Sentence>) -> Self {
        Treebank { sentences }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// All distinct dependency labels, sorted. The sort order doubles as
    /// the label ordinal order used by the parsers' tie-breaking.
    pub fn label_inventory(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self
            .sentences
            .iter()
            .flat_map(|s| s.tokens().iter().map(|t| t.deprel.as_str()))
            .collect();
        set.into_iter().map(String::from).collect()
    }

    /// All distinct coarse POS tags, sorted.
    pub fn cpos_inventory(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self
            .sentences
            .iter()
            .flat_map(|s| s.tokens().iter().map(|t| t.cpos.as_str()))
            .collect();
        set.into_iter().map(String::from).collect()
    }

    /// All distinct fine POS tags, sorted.
    pub fn pos_inventory(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self
            .sentences
            .iter()
            .flat_map(|s| s.tokens().iter().map(|t| t.pos.as_str()))
            .collect();
        set.into_iter().map(String::from).collect()
    }

    /// Splits into `k` cross-validation folds and returns one
    /// (train, test) treebank pair per fold. Sentences are shuffled by a
    /// ChaCha8 Fisher-Yates permutation of `seed`, then dealt into
    /// contiguous chunks whose sizes differ by at most one; every
    /// sentence lands in exactly one test fold. The same seed always
    /// produces the same split.
    pub fn kfold_split(&self, k: usize, seed: u64) -> Result<Vec<(Treebank, Treebank)>, SplitError> {
        let folds = self.fold_indices(k, seed)?;
        let mut out = Vec::with_capacity(k);
        for test_ids in &folds {
            let test = Treebank::new(test_ids.iter().map(|&i| self.sentences[i].clone()).collect());
            let in_test: BTreeSet<usize> = test_ids.iter().copied().collect();
            let train = Treebank::new(
                folds
                    .iter()
                    .flatten()
                    .filter(|i| !in_test.contains(i))
                    .map(|&i| self.sentences[i].clone())
                    .collect(),
            );
            out.push((train, test));
        }
        Ok(out)
    }

    /// The sentence ordinals backing [`Self::kfold_split`], one list per fold.
    pub fn fold_indices(&self, k: usize, seed: u64) -> Result<Vec<Vec<usize>>, SplitError> {
        if k < 2 || k > self.len() {
            return Err(SplitError::KOutOfRange {
                k,
                sentences: self.len(),
            });
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
        let base = self.len() / k;
        let extra = self.len() % k;
        let mut folds = Vec::with_capacity(k);
        let mut start = 0;
        for f in 0..k {
            let size = base + usize::from(f < extra);
            folds.push(order[start..start + size].to_vec());
            start += size;
        }
        Ok(folds)
    }
}

/// Reads a treebank from ten-column CoNLL text. Blank lines separate
/// sentences; empty input yields an empty treebank. Formatting problems
/// are reported with their 1-based line number.
pub fn parse_conll<R: BufRead>(reader: R) -> Result<Treebank, ConllError> {
    struct Pending {
        token: Token,
        line: usize,
    }

    let mut sentences = Vec::new();
    let mut block: Vec<Pending> = Vec::new();

    let mut flush = |block: &mut Vec<Pending>| -> Result<(), ConllError> {
        if block.is_empty() {
            return Ok(());
        }
        let len = block.len();
        for p in block.iter() {
            if p.token.head > len {
                return Err(ConllError::HeadOutOfRange {
                    line: p.line,
                    head: p.token.head,
                    len,
                });
            }
        }
        let tokens = block.drain(..).map(|p| p.token).collect();
        let sentence = Sentence::new(tokens).expect("per-line checks imply a valid sentence");
        sentences.push(sentence);
        Ok(())
    };

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let raw = line?;
        let text = raw.strip_suffix('\r').unwrap_or(&raw);
        if text.is_empty() {
            flush(&mut block)?;
            continue;
        }
        let cols: Vec<&str> = text.split('\t').collect();
        if cols.len() != 10 {
            return Err(ConllError::ColumnCount {
                line: line_no,
                found: cols.len(),
            });
        }
        let index: usize = cols[0].parse().map_err(|_| ConllError::BadInteger {
            line: line_no,
            field: "index",
            value: cols[0].to_string(),
        })?;
        let expected = block.len() + 1;
        if index != expected {
            return Err(ConllError::NonContiguousIndex {
                line: line_no,
                expected,
                found: index,
            });
        }
        let head: usize = cols[6].parse().map_err(|_| ConllError::BadInteger {
            line: line_no,
            field: "head",
            value: cols[6].to_string(),
        })?;
        if head == index {
            return Err(ConllError::SelfHead { line: line_no });
        }
        if cols[7].is_empty() {
            return Err(ConllError::EmptyDeprel { line: line_no });
        }
        block.push(Pending {
            token: Token {
                index,
                form: cols[1].to_string(),
                lemma: cols[2].to_string(),
                cpos: cols[3].to_string(),
                pos: cols[4].to_string(),
                feats: cols[5].to_string(),
                head,
                deprel: cols[7].to_string(),
            },
            line: line_no,
        });
    }
    flush(&mut block)?;
    Ok(Treebank::new(sentences))
}

pub fn parse_conll_str(text: &str) -> Result<Treebank, ConllError> {
    parse_conll(text.as_bytes())
}

/// Serializes to canonical CoNLL text: ten tab-separated columns per
/// token, columns 9-10 written as `_`, one blank line after every
/// sentence. An empty treebank serializes to the empty string.
pub fn serialize_conll(treebank: &Treebank) -> String {
    let mut out = String::new();
    for sentence in &treebank.sentences {
        for t in sentence.tokens() {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t_\t_",
                t.index, t.form, t.lemma, t.cpos, t.pos, t.feats, t.head, t.deprel
            )
            .expect("writing to a String cannot fail");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

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

    fn sentence(spec: &[(&str, &str, usize, &str)]) -> Sentence {
        let tokens = spec
            .iter()
            .enumerate()
            .map(|(i, (form, pos, head, rel))| tok(i + 1, form, pos, *head, rel))
            .collect();
        Sentence::new(tokens).unwrap()
    }

    fn describing_sentence() -> Sentence {
        // "Hai kịch_bản mới mô_tả cuộc_sống hiện_đại ." — a quantifier and
        // an adjective under the subject noun, verb at the root.
        sentence(&[
            ("Hai", "M", 2, "DET"),
            ("kịch_bản", "N", 4, "SUB"),
            ("mới", "A", 2, "NMOD"),
            ("mô_tả", "V", 0, "ROOT"),
            ("cuộc_sống", "N", 4, "DOB"),
            ("hiện_đại", "A", 5, "NMOD"),
            (".", "CH", 4, "PUNCT"),
        ])
    }

    #[test]
    fn parses_a_seven_token_block() {
        let text = "1\tHai\t_\tM\tM\t_\t2\tDET\t_\t_\n\
                    2\tkịch_bản\t_\tN\tN\t_\t4\tSUB\t_\t_\n\
                    3\tmới\t_\tA\tA\t_\t2\tNMOD\t_\t_\n\
                    4\tmô_tả\t_\tV\tV\t_\t0\tROOT\t_\t_\n\
                    5\tcuộc_sống\t_\tN\tN\t_\t4\tDOB\t_\t_\n\
                    6\thiện_đại\t_\tA\tA\t_\t5\tNMOD\t_\t_\n\
                    7\t.\t_\tCH\tCH\t_\t4\tPUNCT\t_\t_\n\n";
        let tb = parse_conll_str(text).unwrap();
        assert_eq!(tb.len(), 1);
        assert_eq!(tb.sentences[0].len(), 7);
        assert_eq!(tb.sentences[0].token(2).form, "kịch_bản");
        assert_eq!(tb.sentences[0].token(2).head, 4);
    }

    #[test]
    fn empty_input_is_an_empty_treebank() {
        let tb = parse_conll_str("").unwrap();
        assert!(tb.is_empty());
        assert_eq!(serialize_conll(&tb), "");
    }

    #[test]
    fn head_out_of_range_is_reported_with_its_line() {
        let text = "1\ta\t_\tN\tN\t_\t3\tSUB\t_\t_\n\
                    2\tb\t_\tV\tV\t_\t0\tROOT\t_\t_\n\n";
        match parse_conll_str(text) {
            Err(ConllError::HeadOutOfRange { line, head, len }) => {
                assert_eq!((line, head, len), (1, 3, 2));
            }
            other => panic!("expected head-out-of-range, got {other:?}"),
        }
    }

    #[test]
    fn column_count_and_integer_errors_carry_line_numbers() {
        let text = "1\ta\t_\tN\tN\t_\t0\tROOT\t_\t_\n\nbad line\n";
        match parse_conll_str(text) {
            Err(ConllError::ColumnCount { line, found }) => assert_eq!((line, found), (3, 1)),
            other => panic!("unexpected: {other:?}"),
        }
        let text = "1\ta\t_\tN\tN\t_\tx\tROOT\t_\t_\n";
        match parse_conll_str(text) {
            Err(ConllError::BadInteger { line, field, .. }) => {
                assert_eq!((line, field), (1, "head"));
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn duplicate_or_gapped_indices_are_rejected() {
        let text = "1\ta\t_\tN\tN\t_\t2\tSUB\t_\t_\n\
                    1\tb\t_\tV\tV\t_\t0\tROOT\t_\t_\n";
        match parse_conll_str(text) {
            Err(ConllError::NonContiguousIndex { line, expected, found }) => {
                assert_eq!((line, expected, found), (2, 2, 1));
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn round_trip_preserves_fields() {
        let tb = Treebank::new(vec![describing_sentence()]);
        let text = serialize_conll(&tb);
        let back = parse_conll_str(&text).unwrap();
        assert_eq!(back, tb);
    }

    #[test]
    fn diacritics_survive_round_trip_byte_for_byte() {
        let text = "1\txấu_hổ\txấu_hổ\tA\tA\tsub=Tùng\t0\tROOT\t_\t_\n\n";
        let tb = parse_conll_str(text).unwrap();
        assert_eq!(serialize_conll(&tb), text);
    }

    #[test]
    fn valid_tree_has_no_violations() {
        let report = validate_graph(&describing_sentence(), true);
        assert!(report.is_valid(), "{:?}", report.violations);
    }

    #[test]
    fn mutual_heads_form_a_cycle() {
        let g = DependencyGraph::from_parts(
            vec![0, 2, 1],
            vec![String::new(), "A".into(), "B".into()],
        );
        let report = g.validate(false);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Cycle { nodes } if nodes.len() == 2)));
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::DisconnectedFromRoot { .. })));
    }

    #[test]
    fn strict_mode_rejects_extra_root_children() {
        let g = DependencyGraph::from_parts(
            vec![0, 0, 0],
            vec![String::new(), "ROOT".into(), "ROOT".into()],
        );
        assert!(g.validate(false).is_valid());
        let strict = g.validate(true);
        assert_eq!(
            strict.violations,
            vec![Violation::MultipleRootChildren { children: vec![1, 2] }]
        );
    }

    #[test]
    fn fold_split_partitions_every_sentence_once() {
        let tb = Treebank::new((0..10).map(|_| describing_sentence()).collect());
        let folds = tb.kfold_split(10, 7).unwrap();
        assert_eq!(folds.len(), 10);
        for (train, test) in &folds {
            assert_eq!(test.len(), 1);
            assert_eq!(train.len(), 9);
        }
        let indices = tb.fold_indices(10, 7).unwrap();
        let mut all: Vec<usize> = indices.into_iter().flatten().collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn fold_sizes_differ_by_at_most_one() {
        let one = sentence(&[("a", "N", 0, "ROOT")]);
        let tb = Treebank::new(vec![one; 2400]);
        let folds = tb.fold_indices(5, 1).unwrap();
        assert!(folds.iter().all(|f| f.len() == 480));
        let tb7 = Treebank::new(vec![sentence(&[("a", "N", 0, "ROOT")]); 23]);
        let folds = tb7.fold_indices(5, 1).unwrap();
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 23);
        assert!(sizes.iter().all(|&s| s == 4 || s == 5));
    }

    #[test]
    fn fold_split_is_seed_deterministic() {
        let tb = Treebank::new((0..9).map(|_| describing_sentence()).collect());
        assert_eq!(tb.fold_indices(3, 42).unwrap(), tb.fold_indices(3, 42).unwrap());
        assert_ne!(tb.fold_indices(3, 42).unwrap(), tb.fold_indices(3, 43).unwrap());
    }

    #[test]
    fn bad_fold_counts_are_errors() {
        let tb = Treebank::new(vec![describing_sentence(); 3]);
        assert!(matches!(tb.kfold_split(1, 0), Err(SplitError::KOutOfRange { .. })));
        assert!(matches!(tb.kfold_split(4, 0), Err(SplitError::KOutOfRange { .. })));
        assert!(tb.kfold_split(3, 0).is_ok());
    }
}
