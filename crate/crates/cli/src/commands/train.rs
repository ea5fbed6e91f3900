use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use grover_core::analysis::emit_curves;
use grover_core::embedding::table::{load_pretrained, EmbeddingTable};
use grover_core::error::{Error, Result};
use grover_core::meta::{run_meta_training, save_checkpoint, Checkpoint, MetaInputs};
use grover_core::meta::MetaEpochRecord;
use grover_core::rng::{derive_seed, Stream};
use grover_core::Table;

use crate::args::TrainArgs;
use crate::config::{echo_toml, EmbeddingSource, RunConfig};

use super::{prepare_data, Prepared};

/// Where one training run left its outputs, plus the console summary row.
pub struct TrainArtifacts {
    pub out_dir: PathBuf,
    pub records_path: PathBuf,
    pub curves_path: PathBuf,
    pub checkpoint_dir: PathBuf,
    /// First-round accuracy, as a fraction.
    pub baseline: f64,
    /// Winning-round accuracy, as a fraction.
    pub grover: f64,
}

pub fn cmd_train(args: &TrainArgs) -> Result<()> {
    let run = args.common.resolve()?;
    run_train(&run).map(|_| ())
}

/// The whole training pipeline behind `grover train`: prepare data, build
/// the initial table, meta-train, and write every artifact into `run.out`.
pub fn run_train(run: &RunConfig) -> Result<TrainArtifacts> {
    let prepared = prepare_data(run)?;
    let mut cfg = run.classifier.clone();
    cfg.num_classes = prepared.num_classes;
    cfg.validate()?;

    let emb_seed = derive_seed(run.seed, Stream::EmbeddingInit, 0);
    let initial: Table = match &run.embeddings {
        EmbeddingSource::Random => {
            EmbeddingTable::init_random(&prepared.vocab, cfg.embedding_dim, emb_seed)?
        }
        EmbeddingSource::Pretrained(path) => {
            let loaded = load_pretrained(path, &prepared.vocab, cfg.embedding_dim, emb_seed)?;
            println!(
                "embeddings file={} found={} missing={}",
                path.display(),
                loaded.found,
                loaded.missing
            );
            loaded.table
        }
    };

    fs::create_dir_all(&run.out).map_err(|e| Error::io(&run.out, e))?;
    let result = write_run(run, &cfg, &prepared, initial);
    if result.is_err() {
        eprintln!(
            "warning: {} may hold partial outputs from the failed run",
            run.out.display()
        );
    }
    result
}

fn write_run(
    run: &RunConfig,
    cfg: &grover_core::nn::ClassifierConfig,
    prepared: &Prepared,
    initial: Table,
) -> Result<TrainArtifacts> {
    let out = &run.out;
    write_text(&out.join("config.toml"), &echo_toml(run)?)?;
    initial.save(&out.join("initial_embeddings.vec"))?;

    let inputs = MetaInputs {
        cfg,
        settings: &run.settings,
        train: &prepared.train,
        val: &prepared.val,
        meta_val: None,
        test: prepared.test.as_ref(),
        vocab: &prepared.vocab,
    };
    let outcome = run_meta_training(&inputs, &run.meta, initial)?;

    for record in &outcome.records {
        println!("{}", meta_line(record));
    }

    let records_path = out.join("records.jsonl");
    let mut lines = String::new();
    for record in &outcome.records {
        lines.push_str(&serde_json::to_string(record).map_err(|e| {
            Error::Contract(format!("round record does not serialize: {e}"))
        })?);
        lines.push('\n');
    }
    write_text(&records_path, &lines)?;

    let curves_path = out.join("curves.csv");
    emit_curves(&outcome.records, &curves_path)?;

    let checkpoint_dir = out.join("checkpoint");
    let winner = &outcome.records[outcome.best_meta_epoch];
    save_checkpoint(
        &checkpoint_dir,
        &Checkpoint {
            classifier: cfg,
            settings: &run.settings,
            meta: &run.meta,
            record: winner,
            params: &outcome.best_params,
            embeddings: &outcome.best_embeddings,
            vocab: &prepared.vocab,
        },
    )?;

    let score = |r: &MetaEpochRecord| r.test_acc.unwrap_or(r.val_acc);
    let baseline = score(&outcome.records[0]);
    let grover = score(winner);
    println!(
        "baseline {:.2} grover {:.2} delta {:+.2}",
        100.0 * baseline,
        100.0 * grover,
        100.0 * (grover - baseline)
    );

    Ok(TrainArtifacts {
        out_dir: out.clone(),
        records_path,
        curves_path,
        checkpoint_dir,
        baseline,
        grover,
    })
}

fn meta_line(r: &MetaEpochRecord) -> String {
    format!(
        "meta={} mask={}..{} masked={} inner_epochs={} best_epoch={} val_acc={:.4} test_acc={} accepted={} diverged={}",
        r.meta_epoch,
        r.mask_start,
        r.mask_end,
        r.masked_words,
        r.inner_epochs,
        r.inner_best_epoch,
        r.val_acc,
        super::fmt_opt4(r.test_acc),
        r.accepted,
        r.diverged
    )
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}
