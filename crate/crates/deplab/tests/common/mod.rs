//! Slow, independent reference implementations that the integration
//! tests check the library against, plus small builders for graphs,
//! sentences, and random trees. Everything here recomputes its answer
//! from first principles — by exhaustive enumeration, breadth-first
//! search, union-find, or a naive double loop — so an agreement with
//! the library is evidence, not circularity.
#![allow(dead_code)]

use std::collections::VecDeque;

use deplab::eval::PunctuationPolicy;
use deplab::treebank::{DependencyGraph, Sentence, Token, Treebank};
use rand::seq::SliceRandom;
use rand::Rng;

/// Builds a graph from per-dependent heads and labels (`heads[0]` of the
/// full row is implied).
pub fn graph(heads: &[usize], labels: &[&str]) -> DependencyGraph {
    assert_eq!(heads.len(), labels.len());
    let mut full_heads = vec![0usize];
    full_heads.extend_from_slice(heads);
    let mut full_labels = vec![String::new()];
    full_labels.extend(labels.iter().map(|l| l.to_string()));
    DependencyGraph::from_parts(full_heads, full_labels)
}

pub fn token(index: usize, form: &str, pos: &str, head: usize, deprel: &str) -> Token {
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

/// Sentence over numbered `w{i}` forms with the given POS row and parse.
pub fn sentence(pos: &[&str], heads: &[usize], labels: &[&str]) -> Sentence {
    assert!(pos.len() == heads.len() && heads.len() == labels.len());
    let tokens = (0..heads.len())
        .map(|j| token(j + 1, &format!("w{}", j + 1), pos[j], heads[j], labels[j]))
        .collect();
    Sentence::new(tokens).expect("well-formed test sentence")
}

// ---------------------------------------------------------------------
// Head rows. A "row" is a full head vector of length n + 1 whose slot 0
// is 0, matching how the library stores parses.
// ---------------------------------------------------------------------

/// True when the row is a tree rooted at 0: in-range non-self heads and
/// every node reachable from the root by child edges.
pub fn is_tree(row: &[usize]) -> bool {
    let n = row.len() - 1;
    if n == 0 {
        return false;
    }
    for (d, &h) in row.iter().enumerate().skip(1) {
        if h > n || h == d {
            return false;
        }
    }
    let mut seen = vec![false; n + 1];
    seen[0] = true;
    let mut frontier = vec![0usize];
    while let Some(h) = frontier.pop() {
        for d in 1..=n {
            if !seen[d] && row[d] == h {
                seen[d] = true;
                frontier.push(d);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

pub fn root_child_count(row: &[usize]) -> usize {
    (1..row.len()).filter(|&d| row[d] == 0).count()
}

/// Every function from dependents to candidate heads (no self loops),
/// trees or not.
pub fn all_head_rows(n: usize) -> Vec<Vec<usize>> {
    let mut rows = vec![vec![0usize; n + 1]];
    for d in 1..=n {
        let mut next = Vec::with_capacity(rows.len() * n);
        for row in &rows {
            for h in 0..=n {
                if h != d {
                    let mut r = row.clone();
                    r[d] = h;
                    next.push(r);
                }
            }
        }
        rows = next;
    }
    rows
}

/// All trees on `n` words, by filtering the exhaustive row list.
pub fn all_trees(n: usize) -> Vec<Vec<usize>> {
    all_head_rows(n).into_iter().filter(|r| is_tree(r)).collect()
}

/// Random tree: place the words in a random order, attach the first to
/// the root and each later one to a random already-placed node. Every
/// tree shape (projective or not) can come out of this.
pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let mut row = vec![0usize; n + 1];
    let mut placed = vec![0usize];
    for (i, &v) in order.iter().enumerate() {
        row[v] = if i == 0 {
            0
        } else {
            placed[rng.gen_range(0..placed.len())]
        };
        placed.push(v);
    }
    row
}

// ---------------------------------------------------------------------
// Structural reference computations.
// ---------------------------------------------------------------------

/// Depth of every node below the root, by breadth-first search over
/// child edges (the library walks head chains instead).
pub fn depths(row: &[usize]) -> Vec<usize> {
    let n = row.len() - 1;
    let mut depth = vec![usize::MAX; n + 1];
    depth[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(h) = queue.pop_front() {
        for d in 1..=n {
            if row[d] == h && depth[d] == usize::MAX {
                depth[d] = depth[h] + 1;
                queue.push_back(d);
            }
        }
    }
    depth
}

/// Proper descendants of `v`, by fixed-point expansion.
pub fn descendant_set(row: &[usize], v: usize) -> Vec<bool> {
    let n = row.len() - 1;
    let mut in_set = vec![false; n + 1];
    in_set[v] = true;
    loop {
        let mut changed = false;
        for d in 1..=n {
            if !in_set[d] && in_set[row[d]] {
                in_set[d] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    in_set[v] = false;
    in_set
}

/// Non-projectivity degree of the arc into `dep`, recomputed as the
/// number of connected components formed by the words inside the arc's
/// span that the head does not dominate (union-find over head links).
pub fn degree_oracle(row: &[usize], dep: usize) -> usize {
    let head = row[dep];
    let (lo, hi) = (head.min(dep), head.max(dep));
    let dominated = descendant_set(row, head);
    let members: Vec<usize> = (lo + 1..hi).filter(|&w| !dominated[w]).collect();
    if members.is_empty() {
        return 0;
    }
    let position = |w: usize| members.iter().position(|&m| m == w);
    let mut parent: Vec<usize> = (0..members.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (i, &w) in members.iter().enumerate() {
        if let Some(j) = position(row[w]) {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            parent[a] = b;
        }
    }
    (0..members.len())
        .filter(|&i| find(&mut parent, i) == i)
        .count()
}

/// Projectivity as the absence of crossing arcs: no two arcs have
/// strictly interleaved endpoints (the root's position-0 endpoint
/// participates like any other).
pub fn projective_oracle(row: &[usize]) -> bool {
    let n = row.len() - 1;
    let spans: Vec<(usize, usize)> = (1..=n).map(|d| (row[d].min(d), row[d].max(d))).collect();
    for (i, &(a, b)) in spans.iter().enumerate() {
        for &(c, d) in &spans[i + 1..] {
            if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------
// Naive scoring.
// ---------------------------------------------------------------------

pub struct NaiveScores {
    pub counted: usize,
    pub uas: f64,
    pub las: f64,
    pub label_accuracy: f64,
}

/// Attachment scores by a direct double loop over tokens, with its own
/// reading of the punctuation policy.
pub fn naive_eval(
    gold: &Treebank,
    preds: &[DependencyGraph],
    include_punct: bool,
    policy: &PunctuationPolicy,
) -> NaiveScores {
    assert_eq!(gold.len(), preds.len());
    let mut counted = 0usize;
    let (mut head_ok, mut both_ok, mut label_ok) = (0usize, 0usize, 0usize);
    for (sentence, pred) in gold.sentences.iter().zip(preds) {
        let gold_graph = sentence.graph();
        for d in 1..=gold_graph.n() {
            if !include_punct {
                let tok = &sentence.tokens()[d - 1];
                let is_punct = tok.deprel.eq_ignore_ascii_case(&policy.deprel)
                    || policy.pos_tag.as_deref().is_some_and(|p| p == tok.pos);
                if is_punct {
                    continue;
                }
            }
            counted += 1;
            let heads_eq = gold_graph.head_of(d) == pred.head_of(d);
            let labels_eq = gold_graph.label_of(d) == pred.label_of(d);
            if heads_eq {
                head_ok += 1;
            }
            if heads_eq && labels_eq {
                both_ok += 1;
            }
            if labels_eq {
                label_ok += 1;
            }
        }
    }
    let pct = |hits: usize| {
        if counted == 0 {
            100.0
        } else {
            100.0 * hits as f64 / counted as f64
        }
    };
    NaiveScores {
        counted,
        uas: pct(head_ok),
        las: pct(both_ok),
        label_accuracy: pct(label_ok),
    }
}

// ---------------------------------------------------------------------
// Random labeled material.
// ---------------------------------------------------------------------

pub const POS_POOL: [&str; 5] = ["N", "V", "A", "R", "CH"];
pub const LABEL_POOL: [&str; 5] = ["SUB", "DOB", "NMOD", "VMOD", "PUNCT"];

/// Random labels over a head row: the root arc is `ROOT`, everything
/// else draws from [`LABEL_POOL`].
pub fn random_labels<R: Rng>(row: &[usize], rng: &mut R) -> Vec<&'static str> {
    (1..row.len())
        .map(|d| {
            if row[d] == 0 {
                "ROOT"
            } else {
                LABEL_POOL[rng.gen_range(0..LABEL_POOL.len())]
            }
        })
        .collect()
}

/// Random gold sentence: a random tree with random POS and labels.
pub fn random_sentence<R: Rng>(n: usize, rng: &mut R, sentence_id: usize) -> Sentence {
    let row = random_tree(n, rng);
    let labels = random_labels(&row, rng);
    let tokens = (1..=n)
        .map(|d| {
            token(
                d,
                &format!("s{sentence_id}w{d}"),
                POS_POOL[rng.gen_range(0..POS_POOL.len())],
                row[d],
                labels[d - 1],
            )
        })
        .collect();
    Sentence::new(tokens).expect("random tree is a valid parse")
}

/// Random predicted parse for a sentence of `n` words: an independent
/// random tree with random labels.
pub fn random_parse<R: Rng>(n: usize, rng: &mut R) -> DependencyGraph {
    let row = random_tree(n, rng);
    let labels = random_labels(&row, rng);
    graph(&row[1..], &labels)
}
