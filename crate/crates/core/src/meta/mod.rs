//! The meta-training loop: repeated inner training runs over a shared
//! embedding table, with a frequency-ordered noise mask that sweeps the
//! vocabulary and an accept-or-rollback rule keyed to validation accuracy.

pub mod checkpoint;
pub mod config;
pub mod masker;
pub mod record;
pub mod runner;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, LoadedCheckpoint, Manifest};
pub use config::{MetaConfig, Policy};
pub use masker::MaskerState;
pub use record::MetaEpochRecord;
pub use runner::{
    run_meta_training, run_meta_training_with, InnerContext, InnerOutcome, InnerTrainer,
    MetaInputs, MetaOutcome, RealTrainer,
};
