//! Embedding storage, file formats, frequency ordering, noise maskers.

pub mod noise;
pub mod order;
pub mod table;

pub use noise::{apply_maskers, NoiseKind};
pub use order::FrequencyOrder;
pub use table::{load_pretrained, EmbeddingTable, PretrainedLoad};
