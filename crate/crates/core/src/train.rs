//! One training run: fresh model on carried embeddings, early stopping on
//! validation accuracy, best-state restore.
//!
//! The caller owns the embedding table across runs; this module fine-tunes
//! the copy it is handed and returns the snapshot that scored best. All
//! randomness is derived from the single `run_seed`, so a run is replayable
//! from its seed alone.

use crate::data::dataset::{fix_length, Dataset, TrainCorpus};
use crate::data::drop::word_drop;
use crate::embedding::table::EmbeddingTable;
use crate::error::{Error, Result};
use crate::nn::adam::{adam_step, AdamHyper, AdamState};
use crate::nn::backward::loss_and_grad;
use crate::nn::config::ClassifierConfig;
use crate::nn::forward::{forward, predict};
use crate::nn::params::ClassifierParams;
use crate::rng::{derive_seed, seeded_rng, Stream};
use crate::scalar::Scalar;

use rand::seq::SliceRandom;

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct TrainSettings {
    /// Hard cap on passes over the training split.
    pub max_epochs: usize,
    /// Stop once this many epochs pass without a strict accuracy gain.
    pub patience: usize,
    pub batch_size: usize,
    /// Per-token deletion probability, resampled every epoch.
    pub word_drop: f64,
    pub optimizer: AdamHyper,
}

impl Default for TrainSettings {
    fn default() -> Self {
        Self {
            max_epochs: 20,
            patience: 3,
            batch_size: 64,
            word_drop: 0.0,
            optimizer: AdamHyper::default(),
        }
    }
}

impl TrainSettings {
    pub fn validate(&self) -> Result<()> {
        if self.max_epochs == 0 || self.patience == 0 || self.batch_size == 0 {
            return Err(Error::Config(
                "epochs, patience and batch size must all be positive".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.word_drop) {
            return Err(Error::Config(format!(
                "word drop probability {} outside [0, 1]",
                self.word_drop
            )));
        }
        Ok(())
    }
}

/// The best state seen during a run. `best_epoch` 0 means the untrained
/// starting point; training never made things better.
#[derive(Debug, Clone)]
pub struct TrainOutcome<T> {
    pub params: ClassifierParams<T>,
    pub embeddings: EmbeddingTable<T>,
    pub best_val_acc: f64,
    pub best_epoch: usize,
    pub epochs_run: usize,
    /// Loss or a parameter left the reals; the run was cut short and the
    /// last good snapshot returned.
    pub diverged: bool,
}

/// Exact match ratio, counted in integers.
pub fn accuracy(predictions: &[usize], labels: &[usize]) -> Result<f64> {
    if predictions.len() != labels.len() || labels.is_empty() {
        return Err(Error::Input(format!(
            "{} predictions against {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    let hits = predictions
        .iter()
        .zip(labels)
        .filter(|(p, l)| p == l)
        .count();
    Ok(hits as f64 / labels.len() as f64)
}

/// Batched evaluation accuracy on a fixed-length dataset.
pub fn evaluate<T: Scalar>(
    params: &ClassifierParams<T>,
    emb: &EmbeddingTable<T>,
    cfg: &ClassifierConfig,
    data: &Dataset,
    batch_size: usize,
) -> Result<f64> {
    if data.seq_len != cfg.seq_len || data.num_classes != cfg.num_classes {
        return Err(Error::Config(format!(
            "dataset shaped {}x{} classes but model expects {}x{}",
            data.seq_len, data.num_classes, cfg.seq_len, cfg.num_classes
        )));
    }
    let mut predictions = Vec::with_capacity(data.labels.len());
    for chunk in data.sequences.chunks(batch_size.max(1)) {
        predictions.extend(predict(params, emb, cfg, chunk)?);
    }
    accuracy(&predictions, &data.labels)
}

/// Trains a fresh model over `embeddings`, returning the snapshot with the
/// best validation accuracy. Ties keep the earlier epoch.
pub fn train_once<T: Scalar>(
    cfg: &ClassifierConfig,
    settings: &TrainSettings,
    train: &TrainCorpus,
    val: &Dataset,
    embeddings: EmbeddingTable<T>,
    run_seed: u64,
) -> Result<TrainOutcome<T>> {
    cfg.validate()?;
    settings.validate()?;
    if train.num_classes != cfg.num_classes {
        return Err(Error::Config(format!(
            "training data has {} classes, model expects {}",
            train.num_classes, cfg.num_classes
        )));
    }
    if train.docs.is_empty() {
        return Err(Error::Input("empty training split".into()));
    }

    let mut params = ClassifierParams::init(cfg, derive_seed(run_seed, Stream::ModelInit, 0))?;
    let mut emb = embeddings;
    let mut opt = AdamState::new(cfg, emb.rows(), emb.dim(), settings.optimizer)?;

    // The untrained state is the fallback snapshot; a run that never
    // improves on it hands it straight back.
    let mut best = TrainOutcome {
        best_val_acc: evaluate(&params, &emb, cfg, val, settings.batch_size)?,
        params: params.clone(),
        embeddings: emb.clone(),
        best_epoch: 0,
        epochs_run: 0,
        diverged: false,
    };

    // Fixed sequences can be encoded once; word dropping resamples per epoch.
    let static_data = if settings.word_drop == 0.0 {
        Some(train.to_dataset(cfg.seq_len))
    } else {
        None
    };

    let mut order: Vec<usize> = (0..train.docs.len()).collect();
    'epochs: for epoch in 1..=settings.max_epochs {
        let mut dropout_rng = seeded_rng(derive_seed(run_seed, Stream::Dropout, epoch as u64));
        let mut drop_rng = seeded_rng(derive_seed(run_seed, Stream::WordDrop, epoch as u64));
        let mut shuffle_rng =
            seeded_rng(derive_seed(run_seed, Stream::EpochShuffle, epoch as u64));

        let epoch_sequences: Vec<Vec<usize>> = match &static_data {
            Some(data) => data.sequences.clone(),
            None => train
                .docs
                .iter()
                .map(|doc| {
                    word_drop(doc, settings.word_drop, &mut drop_rng)
                        .map(|kept| fix_length(&kept, cfg.seq_len))
                })
                .collect::<Result<_>>()?,
        };

        order.shuffle(&mut shuffle_rng);
        for batch_ids in order.chunks(settings.batch_size) {
            let batch: Vec<Vec<usize>> = batch_ids
                .iter()
                .map(|&i| epoch_sequences[i].clone())
                .collect();
            let labels: Vec<usize> = batch_ids.iter().map(|&i| train.labels[i]).collect();
            let tape = forward(&params, &emb, cfg, &batch, &mut dropout_rng)?;
            let (loss, grads) = loss_and_grad(&params, cfg, &tape, &labels)?;
            if !loss.is_finite() {
                best.diverged = true;
                best.epochs_run = epoch;
                break 'epochs;
            }
            match adam_step(&mut params, &mut emb, &grads, &mut opt) {
                Ok(()) => {}
                Err(Error::Diverged(_)) => {
                    best.diverged = true;
                    best.epochs_run = epoch;
                    break 'epochs;
                }
                Err(other) => return Err(other),
            }
        }

        let val_acc = evaluate(&params, &emb, cfg, val, settings.batch_size)?;
        best.epochs_run = epoch;
        if val_acc > best.best_val_acc {
            best.best_val_acc = val_acc;
            best.best_epoch = epoch;
            best.params = params.clone();
            best.embeddings = emb.clone();
        } else if epoch - best.best_epoch >= settings.patience {
            break;
        }
    }
    Ok(best)
}
