//! Encoded datasets and the train/validation split.

use rand::seq::SliceRandom;

use crate::data::vocab::{Vocabulary, PAD_ID};
use crate::error::{Error, Result};
use crate::rng::seeded_rng;

/// Splits examples into (train, val) after a seeded shuffle. The validation
/// size is `fraction * n` rounded to nearest; both halves must end up
/// non-empty or the split is rejected.
pub fn split_train_val<T>(examples: Vec<T>, fraction: f64, seed: u64) -> Result<(Vec<T>, Vec<T>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Config(format!(
            "validation fraction must be in (0, 1), got {fraction}"
        )));
    }
    let n = examples.len();
    let val_n = (fraction * n as f64).round() as usize;
    if val_n == 0 || val_n >= n {
        return Err(Error::Input(format!(
            "split of {n} examples at fraction {fraction} leaves an empty half \
             ({val_n} validation)"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seeded_rng(seed));
    let pick: Vec<bool> = {
        let mut pick = vec![false; n];
        for &i in &order[..val_n] {
            pick[i] = true;
        }
        pick
    };
    let mut train = Vec::with_capacity(n - val_n);
    let mut val = Vec::with_capacity(val_n);
    for (i, ex) in examples.into_iter().enumerate() {
        if pick[i] {
            val.push(ex);
        } else {
            train.push(ex);
        }
    }
    Ok((train, val))
}

/// Encodes tokens to ids, unknown words to the OOV id. No padding.
pub fn encode_tokens(tokens: &[String], vocab: &Vocabulary) -> Vec<usize> {
    tokens.iter().map(|t| vocab.encode_token(t)).collect()
}

/// Truncates to `seq_len` and right-pads with the padding id.
pub fn fix_length(ids: &[usize], seq_len: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(seq_len);
    out.extend(ids.iter().copied().take(seq_len));
    out.resize(seq_len, PAD_ID);
    out
}

/// Fixed-length encoded examples ready for the classifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub sequences: Vec<Vec<usize>>,
    pub labels: Vec<usize>,
    pub num_classes: usize,
    pub seq_len: usize,
}

impl Dataset {
    pub fn from_encoded(
        sequences: Vec<Vec<usize>>,
        labels: Vec<usize>,
        num_classes: usize,
        seq_len: usize,
    ) -> Result<Self> {
        if sequences.len() != labels.len() {
            return Err(Error::Input(format!(
                "{} sequences but {} labels",
                sequences.len(),
                labels.len()
            )));
        }
        if num_classes < 2 {
            return Err(Error::Config(format!("need at least 2 classes, got {num_classes}")));
        }
        if let Some(seq) = sequences.iter().find(|s| s.len() != seq_len) {
            return Err(Error::Input(format!(
                "sequence of length {} in a dataset of fixed length {seq_len}",
                seq.len()
            )));
        }
        if let Some(&label) = labels.iter().find(|&&l| l >= num_classes) {
            return Err(Error::Input(format!(
                "label {label} out of range for {num_classes} classes"
            )));
        }
        Ok(Dataset {
            sequences,
            labels,
            num_classes,
            seq_len,
        })
    }

    pub fn encode(
        docs: &[Vec<String>],
        labels: Vec<usize>,
        vocab: &Vocabulary,
        seq_len: usize,
        num_classes: usize,
    ) -> Result<Self> {
        let sequences = docs
            .iter()
            .map(|doc| fix_length(&encode_tokens(doc, vocab), seq_len))
            .collect();
        Dataset::from_encoded(sequences, labels, num_classes, seq_len)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Training documents kept at full length so per-epoch word dropping happens
/// before truncation, the same way the raw text would be dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainCorpus {
    pub docs: Vec<Vec<usize>>,
    pub labels: Vec<usize>,
    pub num_classes: usize,
}

impl TrainCorpus {
    pub fn encode(
        docs: &[Vec<String>],
        labels: Vec<usize>,
        vocab: &Vocabulary,
        num_classes: usize,
    ) -> Result<Self> {
        if docs.len() != labels.len() {
            return Err(Error::Input(format!(
                "{} documents but {} labels",
                docs.len(),
                labels.len()
            )));
        }
        if let Some(&label) = labels.iter().find(|&&l| l >= num_classes) {
            return Err(Error::Input(format!(
                "label {label} out of range for {num_classes} classes"
            )));
        }
        Ok(TrainCorpus {
            docs: docs.iter().map(|d| encode_tokens(d, vocab)).collect(),
            labels,
            num_classes,
        })
    }

    /// Fixed-length view with no word dropping.
    pub fn to_dataset(&self, seq_len: usize) -> Dataset {
        Dataset {
            sequences: self.docs.iter().map(|d| fix_length(d, seq_len)).collect(),
            labels: self.labels.clone(),
            num_classes: self.num_classes,
            seq_len,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}
