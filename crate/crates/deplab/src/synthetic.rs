//! Deterministic synthetic treebanks for tests and smoke runs.
//!
//! Sentences come from a tiny fixed grammar over POS tags, so every
//! attachment and label is a deterministic function of the sentence's
//! POS layout: subject and object nouns hang off the verb, determiners
//! and adjectives off their nouns, and a topicalized variant fronts the
//! subject of a clause-final predicative adjective, producing one
//! crossing arc. Regular structure like this is learnable from POS
//! context alone, which is what makes the corpus useful as a training
//! smoke test; the crossing variant keeps non-projective machinery
//! exercised.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::treebank::{Sentence, Token, Treebank};

fn token(index: usize, form: String, pos: &str, head: usize, deprel: &str) -> Token {
    Token {
        index,
        form,
        lemma: "_".to_string(),
        cpos: pos.to_string(),
        pos: pos.to_string(),
        feats: "_".to_string(),
        head,
        deprel: deprel.to_string(),
    }
}

/// One sentence row before forms are attached: POS, head position, label.
type Layout = Vec<(&'static str, usize, &'static str)>;

/// Declarative clause: `[L] N [A] V [L] N [A] [R] CH`, each bracketed
/// element present at random. All arcs nest, so the tree is projective.
fn declarative(rng: &mut ChaCha8Rng) -> Layout {
    let subj_det = rng.gen_range(0..2) == 1;
    let subj_adj = rng.gen_range(0..2) == 1;
    let obj_det = rng.gen_range(0..2) == 1;
    let obj_adj = rng.gen_range(0..2) == 1;
    let adverb = rng.gen_range(0..2) == 1;

    let subj_noun = usize::from(subj_det) + 1;
    let verb = subj_noun + usize::from(subj_adj) + 1;
    let obj_noun = verb + usize::from(obj_det) + 1;

    let mut rows: Layout = Vec::new();
    if subj_det {
        rows.push(("L", subj_noun, "DET"));
    }
    rows.push(("N", verb, "SUB"));
    if subj_adj {
        rows.push(("A", subj_noun, "NMOD"));
    }
    rows.push(("V", 0, "ROOT"));
    if obj_det {
        rows.push(("L", obj_noun, "DET"));
    }
    rows.push(("N", verb, "DOB"));
    if obj_adj {
        rows.push(("A", obj_noun, "NMOD"));
    }
    if adverb {
        rows.push(("R", verb, "ADV"));
    }
    rows.push(("CH", verb, "PUNCT"));
    rows
}

/// Topicalization: `N T V [R] A` — the fronted noun is the subject of
/// the clause-final predicative adjective, so its arc crosses the root
/// arc of the matrix verb.
fn topicalized(rng: &mut ChaCha8Rng) -> Layout {
    let adverb = rng.gen_range(0..2) == 1;
    let predicate = if adverb { 5 } else { 4 };
    let mut rows: Layout = vec![("N", predicate, "SUB"), ("T", 3, "TMP"), ("V", 0, "ROOT")];
    if adverb {
        rows.push(("R", predicate, "ADV"));
    }
    rows.push(("A", 3, "VMOD"));
    rows
}

/// Deterministic synthetic treebank: `n_sentences` sentences of 4 to 9
/// words, roughly one in five non-projective, with globally unique
/// forms. The same seed always yields the same treebank.
pub fn toy_treebank(n_sentences: usize, seed: u64) -> Treebank {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sentences = (0..n_sentences)
        .map(|si| {
            let rows = if rng.gen_range(0..5) == 0 {
                topicalized(&mut rng)
            } else {
                declarative(&mut rng)
            };
            let tokens = rows
                .into_iter()
                .enumerate()
                .map(|(j, (pos, head, label))| {
                    token(j + 1, format!("s{si}w{}", j + 1), pos, head, label)
                })
                .collect();
            Sentence::new(tokens).expect("synthetic layouts are well-formed")
        })
        .collect();
    Treebank::new(sentences)
}
