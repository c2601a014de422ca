//! Skip-gram word embeddings with negative sampling, trained from scratch per
//! sub-corpus.

mod space;
mod train;
mod vocab;

use serde::{Deserialize, Serialize};

pub use space::{cosine_vectors, EmbeddingSpace};
pub use train::{train, train_documents, TrainReport};
pub use vocab::{build_vocab, FrequencyTable, Vocab};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    /// Maximum distance between a word and its context words.
    pub window: usize,
    pub dim: usize,
    /// Full passes over the corpus.
    pub epochs: usize,
    pub min_count: u64,
    /// Negative samples per positive pair.
    pub negatives: usize,
    /// Initial learning rate, decayed linearly towards zero.
    pub learning_rate: f64,
    pub seed: u64,
    /// Frequent-word downsampling threshold; 0 disables downsampling.
    pub subsample_threshold: f64,
    /// Training threads. Only a single worker is bit-reproducible.
    pub workers: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            window: 5,
            dim: 300,
            epochs: 40,
            min_count: 5,
            negatives: 5,
            learning_rate: 0.025,
            seed: 0,
            subsample_threshold: 1e-3,
            workers: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("train config: {what}")));
        if self.window < 1 {
            return bad("window must be >= 1");
        }
        if self.dim < 1 {
            return bad("dim must be >= 1");
        }
        if self.epochs < 1 {
            return bad("epochs must be >= 1");
        }
        if self.min_count < 1 {
            return bad("min_count must be >= 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if self.subsample_threshold.is_nan() || self.subsample_threshold < 0.0 {
            return bad("subsample_threshold must be >= 0");
        }
        if self.workers < 1 {
            return bad("workers must be >= 1");
        }
        Ok(())
    }
}
