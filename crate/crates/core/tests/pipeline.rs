//! End-to-end pipeline over the public API: synthetic corpus in, meta-trained
//! checkpoint out, reload verified against the recorded accuracy.

use grover_core::data::dataset::{split_train_val, Dataset, TrainCorpus};
use grover_core::data::synthetic::{generate_synthetic, SyntheticSpec};
use grover_core::data::tokenize::tokenize;
use grover_core::data::vocab::Vocabulary;
use grover_core::embedding::table::EmbeddingTable;
use grover_core::meta::{
    load_checkpoint, run_meta_training, save_checkpoint, Checkpoint, MetaConfig, MetaInputs,
};
use grover_core::nn::{ClassifierConfig, ModelKind};
use grover_core::train::{evaluate, TrainSettings};

struct Fixture {
    cfg: ClassifierConfig,
    settings: TrainSettings,
    vocab: Vocabulary,
    train: TrainCorpus,
    val: Dataset,
    test: Dataset,
}

fn prepare() -> Fixture {
    let spec = SyntheticSpec {
        classes: 2,
        vocab_size: 60,
        docs_per_class: 40,
        test_docs_per_class: 10,
        signal: 0.5,
        keywords_per_class: 4,
        doc_len: (8, 16),
        seed: 42,
        ..SyntheticSpec::default()
    };
    let (train_raw, test_raw) = generate_synthetic(&spec).unwrap();
    let (train_raw, val_raw) = split_train_val(train_raw, 0.25, 7).unwrap();

    let cfg = ClassifierConfig {
        model: ModelKind::TextCnn,
        embedding_dim: 8,
        seq_len: 16,
        kernel_sizes: vec![2, 3],
        conv1_channels: 4,
        conv2_channels: 3,
        num_classes: 2,
        dropout_p: 0.0,
    };
    let settings = TrainSettings {
        max_epochs: 4,
        patience: 2,
        batch_size: 16,
        ..TrainSettings::default()
    };

    let encode_docs = |raw: &[(usize, String)]| -> (Vec<Vec<String>>, Vec<usize>) {
        let docs = raw.iter().map(|(_, t)| tokenize(t)).collect();
        let labels = raw.iter().map(|(l, _)| *l).collect();
        (docs, labels)
    };
    let (train_docs, train_labels) = encode_docs(&train_raw);
    let (val_docs, val_labels) = encode_docs(&val_raw);
    let (test_docs, test_labels) = encode_docs(&test_raw);

    // frequencies come from the training split alone
    let vocab = Vocabulary::build(&train_docs).unwrap();
    let train = TrainCorpus::encode(&train_docs, train_labels, &vocab, 2).unwrap();
    let val = Dataset::encode(&val_docs, val_labels, &vocab, cfg.seq_len, 2).unwrap();
    let test = Dataset::encode(&test_docs, test_labels, &vocab, cfg.seq_len, 2).unwrap();
    Fixture {
        cfg,
        settings,
        vocab,
        train,
        val,
        test,
    }
}

#[test]
fn meta_trained_checkpoint_reloads_and_reproduces_its_accuracy() {
    let fx = prepare();
    let inputs = MetaInputs {
        cfg: &fx.cfg,
        settings: &fx.settings,
        train: &fx.train,
        val: &fx.val,
        meta_val: None,
        test: Some(&fx.test),
        vocab: &fx.vocab,
    };
    let meta = MetaConfig {
        step_size: 0.5,
        noise_range: 1.0,
        max_meta_epochs: 3,
        master_seed: 11,
        ..MetaConfig::default()
    };
    let initial = EmbeddingTable::<f32>::init_random(&fx.vocab, fx.cfg.embedding_dim, 11).unwrap();
    let out = run_meta_training::<f32>(&inputs, &meta, initial).unwrap();

    let winner = &out.records[out.best_meta_epoch];
    assert!(winner.accepted);
    assert_eq!(winner.val_acc, out.best_val_acc);

    let dir = tempfile::tempdir().unwrap();
    save_checkpoint(
        dir.path(),
        &Checkpoint {
            classifier: &fx.cfg,
            settings: &fx.settings,
            meta: &meta,
            record: winner,
            params: &out.best_params,
            embeddings: &out.best_embeddings,
            vocab: &fx.vocab,
        },
    )
    .unwrap();

    let loaded = load_checkpoint::<f32>(dir.path()).unwrap();
    assert_eq!(loaded.manifest.record.meta_epoch, out.best_meta_epoch);

    // rebuilding the splits from the loaded vocabulary and rescoring the
    // loaded model must land on the recorded accuracies exactly
    let val_acc = evaluate(
        &loaded.params,
        &loaded.embeddings,
        &loaded.manifest.classifier,
        &fx.val,
        loaded.manifest.settings.batch_size,
    )
    .unwrap();
    assert_eq!(val_acc, loaded.manifest.record.val_acc);

    let test_acc = evaluate(
        &loaded.params,
        &loaded.embeddings,
        &loaded.manifest.classifier,
        &fx.test,
        loaded.manifest.settings.batch_size,
    )
    .unwrap();
    assert_eq!(Some(test_acc), loaded.manifest.record.test_acc);
}

#[test]
fn identical_seeds_give_identical_meta_runs() {
    let fx = prepare();
    let inputs = MetaInputs {
        cfg: &fx.cfg,
        settings: &fx.settings,
        train: &fx.train,
        val: &fx.val,
        meta_val: None,
        test: None,
        vocab: &fx.vocab,
    };
    let meta = MetaConfig {
        step_size: 0.5,
        max_meta_epochs: 3,
        master_seed: 5,
        ..MetaConfig::default()
    };
    let run = || {
        let initial =
            EmbeddingTable::<f32>::init_random(&fx.vocab, fx.cfg.embedding_dim, 5).unwrap();
        run_meta_training::<f32>(&inputs, &meta, initial).unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a.records.len(), b.records.len());
    for (ra, rb) in a.records.iter().zip(&b.records) {
        assert_eq!(serde_json::to_string(ra).unwrap(), serde_json::to_string(rb).unwrap());
    }
    assert!(a
        .best_embeddings
        .values()
        .iter()
        .zip(b.best_embeddings.values())
        .all(|(x, y)| x.to_bits() == y.to_bits()));
    assert!(a
        .best_params
        .to_flat()
        .iter()
        .zip(b.best_params.to_flat())
        .all(|(x, y)| x.to_bits() == y.to_bits()));
}
