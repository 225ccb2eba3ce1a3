//! Sparse feature vectors over a 64-bit hashed feature space.
//!
//! Template instantiations are rendered to strings and hashed with
//! FNV-1a (64-bit). The hash is the feature identity: collisions are
//! accepted rather than resolved, which keeps models flat arrays of
//! `(id, weight)` pairs. At 64 bits collisions are vanishingly rare for
//! realistic template counts; the test suite measures the observed rate.

use std::fmt::Write;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a hash of a template string.
pub fn fnv1a64(s: &str) -> u64 {
    let mut h = FNV_OFFSET;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Sparse feature vector: sorted `(feature id, fire count)` pairs with
/// unique ids and strictly positive counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureVector {
    items: Vec<(u64, u32)>,
}

impl FeatureVector {
    pub fn iter(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.items.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, id: u64) -> bool {
        self.items.binary_search_by_key(&id, |&(f, _)| f).is_ok()
    }

    /// Total number of template firings (counts included).
    pub fn total_count(&self) -> u64 {
        self.items.iter().map(|&(_, c)| u64::from(c)).sum()
    }

    /// Concatenation of two vectors, merging duplicate ids.
    pub fn merged(&self, other: &FeatureVector) -> FeatureVector {
        let mut ids: Vec<u64> = Vec::with_capacity(self.items.len() + other.items.len());
        for &(f, c) in self.items.iter().chain(&other.items) {
            for _ in 0..c {
                ids.push(f);
            }
        }
        Self::from_ids(ids)
    }

    fn from_ids(mut ids: Vec<u64>) -> FeatureVector {
        ids.sort_unstable();
        let mut items: Vec<(u64, u32)> = Vec::with_capacity(ids.len());
        for id in ids {
            match items.last_mut() {
                Some((last, count)) if *last == id => *count += 1,
                _ => items.push((id, 1)),
            }
        }
        FeatureVector { items }
    }
}

/// Accumulates template strings into a [`FeatureVector`]. The scratch
/// string is reused between templates to avoid per-feature allocation.
#[derive(Default)]
pub struct FeatureBuilder {
    ids: Vec<u64>,
    scratch: String,
}

impl FeatureBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Renders one template with `fill` and records its hash.
    pub fn emit(&mut self, fill: impl FnOnce(&mut String)) {
        self.scratch.clear();
        fill(&mut self.scratch);
        self.ids.push(fnv1a64(&self.scratch));
    }

    /// Renders one template and also a copy suffixed with `|L=<label>`.
    pub fn emit_with_label(&mut self, label: &str, fill: impl FnOnce(&mut String)) {
        self.scratch.clear();
        fill(&mut self.scratch);
        self.ids.push(fnv1a64(&self.scratch));
        let _ = write!(self.scratch, "|L={label}");
        self.ids.push(fnv1a64(&self.scratch));
    }

    pub fn finish(self) -> FeatureVector {
        FeatureVector::from_ids(self.ids)
    }
}

/// Distance bucket shared by the arc and configuration templates:
/// exact through 5, then `6-10`, then `>10`.
pub fn distance_bin(distance: usize) -> &'static str {
    match distance {
        0 => "0",
        1 => "1",
        2 => "2",
        3 => "3",
        4 => "4",
        5 => "5",
        6..=10 => "6-10",
        _ => ">10",
    }
}
