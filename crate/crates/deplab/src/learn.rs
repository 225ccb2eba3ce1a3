//! Averaged-perceptron weight storage shared by both parsers.
//!
//! Weights live in a sparse map from feature key to scalar. During
//! training the averaged value of every weight across all update steps
//! is tracked lazily: each key remembers the step of its last change and
//! the area under its weight curve so far, so unchanged keys cost
//! nothing per step. [`AveragedWeights::finalize`] closes the running
//! sums and switches scoring over to the averaged weights.

use std::collections::HashMap;
use std::hash::Hash;

use num_traits::{Float, FromPrimitive};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrainError {
    #[error("cannot train on an empty treebank")]
    EmptyTreebank,
    #[error("sentence {index} does not form a valid dependency tree")]
    InvalidGoldTree { index: usize },
}

/// Options shared by both parser trainers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainOptions {
    pub epochs: u32,
    pub seed: u64,
    /// Decode with the single-root constraint while training the
    /// tree-scoring parser (the stepwise parser has no use for it).
    pub strict_root: bool,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            epochs: 10,
            seed: 1,
            strict_root: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AveragedWeights<K, W> {
    raw: HashMap<K, W>,
    totals: HashMap<K, W>,
    stamp: HashMap<K, u64>,
    averaged: Option<HashMap<K, W>>,
    step: u64,
}

impl<K, W> Default for AveragedWeights<K, W> {
    fn default() -> Self {
        AveragedWeights {
            raw: HashMap::new(),
            totals: HashMap::new(),
            stamp: HashMap::new(),
            averaged: None,
            step: 0,
        }
    }
}

impl<K, W> AveragedWeights<K, W>
where
    K: Eq + Hash + Copy,
    W: Float + FromPrimitive + std::ops::AddAssign,
{
    pub fn new() -> Self {
        Self::default()
    }

    /// Weight used for scoring: averaged once finalized, raw before.
    pub fn effective(&self, key: K) -> W {
        let map = self.averaged.as_ref().unwrap_or(&self.raw);
        map.get(&key).copied().unwrap_or_else(W::zero)
    }

    pub fn raw(&self, key: K) -> W {
        self.raw.get(&key).copied().unwrap_or_else(W::zero)
    }

    pub fn is_finalized(&self) -> bool {
        self.averaged.is_some()
    }

    pub fn len(&self) -> usize {
        self.averaged.as_ref().unwrap_or(&self.raw).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Applies a perceptron update to one key.
    pub fn add(&mut self, key: K, delta: W) {
        debug_assert!(self.averaged.is_none(), "model already finalized");
        let last = self.stamp.get(&key).copied().unwrap_or(0);
        let w = self.raw.entry(key).or_insert_with(W::zero);
        let elapsed = W::from_u64(self.step - last).expect("step fits in scalar");
        *self.totals.entry(key).or_insert_with(W::zero) += elapsed * *w;
        self.stamp.insert(key, self.step);
        *w += delta;
    }

    /// Advances the averaging clock by one update opportunity.
    pub fn tick(&mut self) {
        self.step += 1;
    }

    /// Closes the averages over all `step` opportunities seen so far and
    /// switches [`Self::effective`] to the averaged weights.
    pub fn finalize(&mut self) {
        let steps = self.step.max(1);
        let denom = W::from_u64(steps).expect("step fits in scalar");
        let mut averaged = HashMap::with_capacity(self.raw.len());
        for (&key, &w) in &self.raw {
            let last = self.stamp.get(&key).copied().unwrap_or(0);
            let tail = W::from_u64(self.step - last).expect("step fits in scalar");
            let total = self.totals.get(&key).copied().unwrap_or_else(W::zero) + tail * w;
            averaged.insert(key, total / denom);
        }
        self.averaged = Some(averaged);
    }

    /// Finalized weights sorted by key, for persistence.
    pub fn averaged_entries(&self) -> Vec<(K, W)>
    where
        K: Ord,
    {
        let map = self
            .averaged
            .as_ref()
            .expect("averaged_entries requires a finalized model");
        let mut entries: Vec<(K, W)> = map.iter().map(|(&k, &w)| (k, w)).collect();
        entries.sort_by_key(|a| a.0);
        entries
    }

    /// Reconstructs a finalized store from persisted averaged weights.
    pub fn from_averaged(entries: impl IntoIterator<Item = (K, W)>) -> Self {
        let averaged: HashMap<K, W> = entries.into_iter().collect();
        AveragedWeights {
            raw: HashMap::new(),
            totals: HashMap::new(),
            stamp: HashMap::new(),
            averaged: Some(averaged),
            step: 0,
        }
    }

    /// The raw (non-averaged) weight map; exposed for equality checks in
    /// determinism tests.
    pub fn raw_map(&self) -> &HashMap<K, W> {
        &self.raw
    }

    pub fn averaged_map(&self) -> Option<&HashMap<K, W>> {
        self.averaged.as_ref()
    }
}
