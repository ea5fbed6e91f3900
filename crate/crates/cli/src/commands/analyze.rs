use std::path::PathBuf;

use grover_core::analysis::{embedding_drift, nearest_neighbors, neighbor_overlap};
use grover_core::data::vocab::Vocabulary;
use grover_core::embedding::table::EmbeddingTable;
use grover_core::error::{Error, Result};
use grover_core::meta::load_checkpoint;
use grover_core::{DefaultScalar, Table};

use crate::args::AnalyzeArgs;

use super::fmt_opt4;

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<()> {
    let loaded = load_checkpoint::<DefaultScalar>(&args.checkpoint)?;
    let vocab = &loaded.vocab;
    if args.k == 0 || args.k >= vocab.len() {
        return Err(Error::Input(format!(
            "k must be between 1 and {} for this vocabulary, got {}",
            vocab.len() - 1,
            args.k
        )));
    }
    let record = &loaded.manifest.record;
    println!(
        "checkpoint dir={} round={} val_acc={:.4} test_acc={}",
        args.checkpoint.display(),
        record.meta_epoch,
        record.val_acc,
        fmt_opt4(record.test_acc)
    );

    // cues that survive the per-cue checks, kept for the churn report
    let mut usable: Vec<&str> = Vec::new();
    for cue in &args.cues {
        match vocab.id_of(cue) {
            None => {
                eprintln!("warning: cue {cue:?} is not in the vocabulary, skipping");
                continue;
            }
            Some(id) if Vocabulary::is_special(id) => {
                eprintln!("warning: cue {cue:?} is a reserved token, skipping");
                continue;
            }
            Some(_) => {}
        }
        match nearest_neighbors(&loaded.embeddings, vocab, cue, args.k) {
            Ok(report) => {
                println!("{}", report.to_text());
                usable.push(cue);
            }
            Err(Error::UndefinedSimilarity(msg)) => {
                eprintln!("warning: {msg}, skipping");
            }
            Err(e) => return Err(e),
        }
    }

    let Some(initial_path) = initial_table_path(args) else {
        return Ok(());
    };
    let initial: Table = EmbeddingTable::load(&initial_path)?;
    let drift = embedding_drift(&initial, &loaded.embeddings, None)?;
    println!(
        "drift against {} words={} mean_euclidean={:.4} median_euclidean={:.4} mean_cosine={} median_cosine={}",
        initial_path.display(),
        drift.per_word.len(),
        drift.mean_euclidean,
        drift.median_euclidean,
        fmt_opt4(drift.mean_cosine),
        fmt_opt4(drift.median_cosine)
    );
    for cue in usable {
        match neighbor_overlap(&initial, &loaded.embeddings, vocab, cue, args.k) {
            Ok(overlap) => println!("churn cue={cue} overlap={overlap:.2}"),
            Err(Error::UndefinedSimilarity(msg)) => {
                eprintln!("warning: {msg}, skipping the churn row for {cue:?}");
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

/// Explicit --initial wins; otherwise look for the table the training run
/// wrote next to its checkpoint directory.
fn initial_table_path(args: &AnalyzeArgs) -> Option<PathBuf> {
    if args.initial.is_some() {
        return args.initial.clone();
    }
    let sibling = args.checkpoint.parent()?.join("initial_embeddings.vec");
    sibling.exists().then_some(sibling)
}
