//! Per-round bookkeeping for the outer loop.

use serde::{Deserialize, Serialize};

/// Everything worth keeping about one retraining round.
///
/// Serialized as one JSON object per line in run reports. Wall time is kept
/// for live progress output but deliberately left out of serialization so
/// reports from identically seeded runs are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaEpochRecord {
    pub meta_epoch: usize,
    /// Masked span of the frequency order, `[mask_start, mask_end)`;
    /// both zero on the initial round, which masks nothing.
    pub mask_start: usize,
    pub mask_end: usize,
    /// Words the mask covered, `mask_end - mask_start`.
    pub masked_words: usize,
    /// Seed the noise was drawn from; absent on the initial round.
    pub noise_seed: Option<u64>,
    /// Seed the run's model init and epoch streams derive from.
    pub model_seed: u64,
    pub inner_epochs: usize,
    pub inner_best_epoch: usize,
    pub inner_best_val_acc: f64,
    /// The accuracy the outer loop compares against its running best.
    pub val_acc: f64,
    pub test_acc: Option<f64>,
    /// Whether this round beat every earlier round and had its embeddings
    /// adopted.
    pub accepted: bool,
    pub diverged: bool,
    #[serde(skip)]
    pub wall_seconds: f64,
}

impl MetaEpochRecord {
    pub fn masked_range(&self) -> std::ops::Range<usize> {
        self.mask_start..self.mask_end
    }
}
