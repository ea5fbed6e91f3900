//! The outer retraining loop.
//!
//! Round 0 trains on the given embeddings as they are. Every later round
//! advances the mask window over the frequency order, perturbs a copy of the
//! carried table, and retrains a fresh model on it. A round whose accuracy
//! strictly beats the running best has its fine-tuned embeddings adopted as
//! the new carried table; any other round is discarded whole, noise
//! included, leaving the carried table bit-for-bit what the last accepted
//! round produced.

use std::collections::BTreeSet;
use std::time::Instant;

use crate::data::dataset::{Dataset, TrainCorpus};
use crate::data::vocab::Vocabulary;
use crate::embedding::noise::apply_maskers;
use crate::embedding::order::FrequencyOrder;
use crate::embedding::table::EmbeddingTable;
use crate::error::{Error, Result};
use crate::meta::config::MetaConfig;
use crate::meta::record::MetaEpochRecord;
use crate::nn::config::ClassifierConfig;
use crate::nn::params::ClassifierParams;
use crate::rng::{derive_seed, seeded_rng, Stream};
use crate::scalar::Scalar;
use crate::train::{evaluate, train_once, TrainSettings};

/// Data and model settings shared by every round.
#[derive(Debug, Clone, Copy)]
pub struct MetaInputs<'a> {
    pub cfg: &'a ClassifierConfig,
    pub settings: &'a TrainSettings,
    pub train: &'a TrainCorpus,
    /// Split the inner loop early-stops on.
    pub val: &'a Dataset,
    /// Split the outer loop compares rounds on; the inner validation split
    /// doubles as this when absent.
    pub meta_val: Option<&'a Dataset>,
    /// Reported per round when present; never steers anything.
    pub test: Option<&'a Dataset>,
    pub vocab: &'a Vocabulary,
}

/// One round's training context, handed to an [`InnerTrainer`].
pub struct InnerContext<'a, T> {
    pub meta_epoch: usize,
    /// Seed all the round's randomness derives from.
    pub run_seed: u64,
    pub inputs: &'a MetaInputs<'a>,
    /// Perturbed copy of the carried table; the trainer owns and returns it
    /// fine-tuned.
    pub embeddings: EmbeddingTable<T>,
}

/// What one round of training produced.
#[derive(Debug, Clone)]
pub struct InnerOutcome<T> {
    pub params: ClassifierParams<T>,
    pub embeddings: EmbeddingTable<T>,
    pub inner_best_val_acc: f64,
    pub inner_best_epoch: usize,
    pub epochs_run: usize,
    /// The accuracy the outer loop judges this round by.
    pub meta_val_acc: f64,
    pub test_acc: Option<f64>,
    pub diverged: bool,
}

/// One inner training run. The separate trait exists so loop semantics can
/// be pinned down with scripted outcomes in tests and exercised with the
/// real trainer in production, through the same code path.
pub trait InnerTrainer<T: Scalar> {
    fn run(&mut self, ctx: InnerContext<'_, T>) -> Result<InnerOutcome<T>>;
}

/// The production trainer: early-stopped gradient training.
pub struct RealTrainer;

impl<T: Scalar> InnerTrainer<T> for RealTrainer {
    fn run(&mut self, ctx: InnerContext<'_, T>) -> Result<InnerOutcome<T>> {
        let inputs = ctx.inputs;
        let out = train_once(
            inputs.cfg,
            inputs.settings,
            inputs.train,
            inputs.val,
            ctx.embeddings,
            ctx.run_seed,
        )?;
        // the restored best snapshot was already scored on the inner split,
        // so a separate pass is only needed for a distinct outer split
        let meta_val_acc = match inputs.meta_val {
            Some(split) => evaluate(
                &out.params,
                &out.embeddings,
                inputs.cfg,
                split,
                inputs.settings.batch_size,
            )?,
            None => out.best_val_acc,
        };
        let test_acc = inputs
            .test
            .map(|split| {
                evaluate(
                    &out.params,
                    &out.embeddings,
                    inputs.cfg,
                    split,
                    inputs.settings.batch_size,
                )
            })
            .transpose()?;
        Ok(InnerOutcome {
            params: out.params,
            embeddings: out.embeddings,
            inner_best_val_acc: out.best_val_acc,
            inner_best_epoch: out.best_epoch,
            epochs_run: out.epochs_run,
            meta_val_acc,
            test_acc,
            diverged: out.diverged,
        })
    }
}

/// The full history and the winning state of a meta-training run.
#[derive(Debug, Clone)]
pub struct MetaOutcome<T> {
    pub best_params: ClassifierParams<T>,
    pub best_embeddings: EmbeddingTable<T>,
    pub best_val_acc: f64,
    pub best_meta_epoch: usize,
    /// The last accepted fine-tuned table (same as `best_embeddings`).
    pub carried: EmbeddingTable<T>,
    pub records: Vec<MetaEpochRecord>,
}

/// Meta-train with the production trainer.
pub fn run_meta_training<T: Scalar>(
    inputs: &MetaInputs<'_>,
    meta: &MetaConfig,
    initial: EmbeddingTable<T>,
) -> Result<MetaOutcome<T>> {
    run_meta_training_with(&mut RealTrainer, inputs, meta, initial)
}

/// Meta-train with any [`InnerTrainer`].
pub fn run_meta_training_with<T: Scalar, Tr: InnerTrainer<T>>(
    trainer: &mut Tr,
    inputs: &MetaInputs<'_>,
    meta: &MetaConfig,
    initial: EmbeddingTable<T>,
) -> Result<MetaOutcome<T>> {
    meta.validate()?;
    inputs.cfg.validate()?;
    inputs.settings.validate()?;
    if initial.rows() != inputs.vocab.len() {
        return Err(Error::Config(format!(
            "embedding table has {} rows for a vocabulary of {}",
            initial.rows(),
            inputs.vocab.len()
        )));
    }

    let order = FrequencyOrder::new(inputs.vocab);
    let mut masker = crate::meta::masker::MaskerState::new(order.len(), meta.step_size)?;
    let mut carried = initial;
    let mut records: Vec<MetaEpochRecord> = Vec::new();
    let mut best: Option<(ClassifierParams<T>, EmbeddingTable<T>, f64, usize)> = None;
    let mut max_acc = f64::NEG_INFINITY;

    loop {
        let k = records.len();
        if k >= meta.max_meta_epochs || (k > 0 && masker.done()) {
            break;
        }
        let improved_last = records.last().is_none_or(|r| r.accepted);
        let (table, mask, noise_seed) = if k == 0 {
            (carried.clone(), 0..0, None)
        } else {
            let mask = masker.advance(meta.policy, improved_last)?;
            let ids: BTreeSet<usize> = order.window(mask.start, mask.end).iter().copied().collect();
            let seed = derive_seed(meta.master_seed, Stream::MaskNoise, k as u64);
            let noised = apply_maskers(
                &carried,
                &ids,
                meta.noise_range,
                meta.noise_kind,
                &mut seeded_rng(seed),
            )?;
            (noised, mask, Some(seed))
        };

        let run_seed = derive_seed(meta.master_seed, Stream::ModelInit, k as u64);
        let started = Instant::now();
        let out = trainer.run(InnerContext {
            meta_epoch: k,
            run_seed,
            inputs,
            embeddings: table,
        })?;

        let accepted = out.meta_val_acc > max_acc;
        records.push(MetaEpochRecord {
            meta_epoch: k,
            mask_start: mask.start,
            mask_end: mask.end,
            masked_words: mask.len(),
            noise_seed,
            model_seed: run_seed,
            inner_epochs: out.epochs_run,
            inner_best_epoch: out.inner_best_epoch,
            inner_best_val_acc: out.inner_best_val_acc,
            val_acc: out.meta_val_acc,
            test_acc: out.test_acc,
            accepted,
            diverged: out.diverged,
            wall_seconds: started.elapsed().as_secs_f64(),
        });
        if accepted {
            max_acc = out.meta_val_acc;
            carried = out.embeddings.clone();
            best = Some((out.params, out.embeddings, out.meta_val_acc, k));
        }
    }

    let (best_params, best_embeddings, best_val_acc, best_meta_epoch) = best.ok_or_else(|| {
        Error::Contract("no round ran, yet the cap and the sweep both allowed one".into())
    })?;
    Ok(MetaOutcome {
        best_params,
        best_embeddings,
        best_val_acc,
        best_meta_epoch,
        carried,
        records,
    })
}
