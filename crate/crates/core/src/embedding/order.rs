//! Corpus-frequency ordering of the vocabulary.

use crate::data::vocab::{Vocabulary, FIRST_WORD_ID};

/// Non-special token ids, least frequent first, ties broken by ascending id.
/// This is the order in which the noise schedule consumes the vocabulary;
/// position 0 is the rarest word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyOrder {
    ids: Vec<usize>,
}

impl FrequencyOrder {
    pub fn new(vocab: &Vocabulary) -> Self {
        let mut ids: Vec<usize> = (FIRST_WORD_ID..vocab.len()).collect();
        ids.sort_unstable_by_key(|&id| (vocab.frequency_of(id), id));
        FrequencyOrder { ids }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    /// Ids at positions `[start, end)` of the ordering.
    pub fn window(&self, start: usize, end: usize) -> &[usize] {
        &self.ids[start..end]
    }
}
