//! Text ingestion: tokenization, vocabulary, encoding, splits, corpora.

pub mod corpus;
pub mod dataset;
pub mod drop;
pub mod synthetic;
pub mod tokenize;
pub mod vocab;

pub use corpus::{load_corpus, save_corpus};
pub use dataset::{encode_tokens, fix_length, split_train_val, Dataset, TrainCorpus};
pub use drop::word_drop;
pub use synthetic::{generate_synthetic, SyntheticSpec};
pub use tokenize::tokenize;
pub use vocab::{Vocabulary, FIRST_WORD_ID, OOV_ID, OOV_TOKEN, PAD_ID, PAD_TOKEN};
