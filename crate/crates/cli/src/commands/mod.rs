pub mod analyze;
pub mod sweep;
pub mod synth;
pub mod train;

use grover_core::data::corpus::load_corpus;
use grover_core::data::dataset::{split_train_val, Dataset, TrainCorpus};
use grover_core::data::synthetic::generate_synthetic;
use grover_core::data::tokenize::tokenize;
use grover_core::data::vocab::Vocabulary;
use grover_core::error::{Error, Result};
use grover_core::rng::{derive_seed, Stream};

use crate::config::{DataSource, RunConfig};

/// Corpus loaded, split, and encoded for one run configuration.
pub struct Prepared {
    pub vocab: Vocabulary,
    pub train: TrainCorpus,
    pub val: Dataset,
    pub test: Option<Dataset>,
    pub num_classes: usize,
}

/// Loads or generates the corpus, carves off the validation split with a
/// seed derived from the master, and encodes everything against a
/// vocabulary built from the training split alone.
pub fn prepare_data(run: &RunConfig) -> Result<Prepared> {
    let (train_raw, test_raw) = match &run.data {
        DataSource::Csv { train, test } => {
            let tr = load_corpus(train)?;
            let te = test.as_ref().map(|p| load_corpus(p)).transpose()?;
            (tr, te)
        }
        DataSource::Synthetic(spec) => {
            let (tr, te) = generate_synthetic(spec)?;
            (tr, Some(te))
        }
    };
    if train_raw.is_empty() {
        return Err(Error::Input("training corpus is empty".into()));
    }
    let max_label = train_raw
        .iter()
        .chain(test_raw.iter().flatten())
        .map(|(label, _)| *label)
        .max()
        .unwrap_or(0);
    let num_classes = max_label + 1;
    if num_classes < 2 {
        return Err(Error::Input(
            "corpus labels cover a single class; nothing to classify".into(),
        ));
    }

    let split_seed = derive_seed(run.seed, Stream::Split, 0);
    let (train_split, val_split) = split_train_val(train_raw, run.val_fraction, split_seed)?;

    let train_docs: Vec<Vec<String>> = train_split.iter().map(|(_, t)| tokenize(t)).collect();
    let train_labels: Vec<usize> = train_split.iter().map(|(l, _)| *l).collect();
    let vocab = Vocabulary::build(&train_docs)?;
    let train = TrainCorpus::encode(&train_docs, train_labels, &vocab, num_classes)?;

    let seq_len = run.classifier.seq_len;
    let encode_eval = |rows: &[(usize, String)]| -> Result<Dataset> {
        let docs: Vec<Vec<String>> = rows.iter().map(|(_, t)| tokenize(t)).collect();
        let labels: Vec<usize> = rows.iter().map(|(l, _)| *l).collect();
        Dataset::encode(&docs, labels, &vocab, seq_len, num_classes)
    };
    let val = encode_eval(&val_split)?;
    let test = test_raw.as_deref().map(encode_eval).transpose()?;

    Ok(Prepared {
        vocab,
        train,
        val,
        test,
        num_classes,
    })
}

fn fmt_opt4(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.4}"),
        None => "-".into(),
    }
}
