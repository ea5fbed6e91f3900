//! Meta-training for text classifiers.
//!
//! The crate trains a small convolutional text classifier repeatedly,
//! carrying the fine-tuned word embeddings from one run into the next and
//! perturbing a frequency-ordered window of them with random noise before
//! each retrain. Improved runs are adopted; failed runs roll the embeddings
//! back and widen the noise window. The best run by validation accuracy is
//! kept as the checkpoint.

pub mod analysis;
pub mod data;
pub mod embedding;
pub mod error;
pub mod meta;
pub mod nn;
pub mod rng;
pub mod scalar;
pub mod train;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Scalar used by the shipped command-line tools and file formats.
pub type DefaultScalar = f32;

/// Embedding table at the default precision.
pub type Table = embedding::table::EmbeddingTable<DefaultScalar>;
/// Classifier parameters at the default precision.
pub type Params = nn::params::ClassifierParams<DefaultScalar>;
