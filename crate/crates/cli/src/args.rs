//! Command-line surface. Long flag names match the config-file keys with
//! dashes in place of underscores; any flag given on the command line
//! overrides the same key in the config file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use grover_core::data::synthetic::SyntheticSpec;
use grover_core::error::Result;

use crate::config::{resolve, FlatConfig, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "grover",
    about = "Meta-training for text classifiers: repeated retraining over a carried embedding table with frequency-ordered noise masking",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Meta-train a classifier and write a checkpoint, run report, and curves
    Train(TrainArgs),
    /// Re-run meta-training across a grid of one hyperparameter
    Sweep(SweepArgs),
    /// Inspect a checkpoint: nearest neighbors and drift against the initial table
    Analyze(AnalyzeArgs),
    /// Generate a synthetic labeled corpus as train/test CSV files
    Synth(SynthArgs),
}

/// Config plumbing shared by `train` and `sweep`.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Flat TOML config file; flags override its keys
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Labeled corpus CSV (label,text per row, no header)
    #[arg(long, value_name = "FILE", conflicts_with = "synthetic")]
    pub data: Option<PathBuf>,
    /// Generate a synthetic corpus instead of reading one
    #[arg(long)]
    pub synthetic: bool,
    /// Held-out test corpus CSV, reported but never steering
    #[arg(long, value_name = "FILE")]
    pub test: Option<PathBuf>,

    /// Embedding source: "random" or a word-vector file path
    #[arg(long, value_name = "PATH|random")]
    pub embeddings: Option<String>,

    /// Classifier architecture: textcnn or bow_linear
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub embedding_dim: Option<usize>,
    #[arg(long)]
    pub seq_len: Option<usize>,
    /// Comma-separated convolution widths, e.g. 2,3,4,5
    #[arg(long, value_delimiter = ',')]
    pub kernel_sizes: Option<Vec<usize>>,
    #[arg(long)]
    pub conv1_channels: Option<usize>,
    #[arg(long)]
    pub conv2_channels: Option<usize>,
    /// Dropout probability on the feature vector
    #[arg(long)]
    pub dropout: Option<f64>,

    /// Inner-loop epoch cap
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Epochs without improvement before the inner loop stops
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Per-token deletion probability during training
    #[arg(long)]
    pub word_drop: Option<f64>,
    /// Optimizer learning rate
    #[arg(long)]
    pub lr: Option<f64>,

    /// Fraction of the vocabulary masked per meta-epoch, in (0, 1]
    #[arg(long)]
    pub step_size: Option<f64>,
    /// Magnitude of the additive embedding noise
    #[arg(long)]
    pub noise_range: Option<f64>,
    /// Noise distribution: uniform or gaussian
    #[arg(long)]
    pub noise_kind: Option<String>,
    /// Window widening policy: gradual, none, reversed, or both
    #[arg(long)]
    pub policy: Option<String>,
    /// Safety cap on meta-epochs
    #[arg(long)]
    pub max_meta_epochs: Option<usize>,

    /// Master seed; every random stream derives from it
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fraction of the training corpus held out for validation
    #[arg(long)]
    pub val_fraction: Option<f64>,
    /// Output directory for all run artifacts
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps; 1 runs serially
    #[arg(long)]
    pub jobs: Option<usize>,

    /// Synthetic corpus: number of classes
    #[arg(long)]
    pub classes: Option<usize>,
    /// Synthetic corpus: content-token inventory size
    #[arg(long)]
    pub vocab_size: Option<usize>,
    #[arg(long)]
    pub docs_per_class: Option<usize>,
    #[arg(long)]
    pub test_docs_per_class: Option<usize>,
    /// Synthetic corpus: per-position class-keyword probability
    #[arg(long)]
    pub signal: Option<f64>,
    #[arg(long)]
    pub keywords_per_class: Option<usize>,
    #[arg(long)]
    pub doc_len_min: Option<usize>,
    #[arg(long)]
    pub doc_len_max: Option<usize>,
    #[arg(long)]
    pub zipf_exponent: Option<f64>,
    /// Seed for the synthetic corpus, independent of --seed
    #[arg(long)]
    pub synth_seed: Option<u64>,
}

impl CommonArgs {
    fn to_flat(&self) -> FlatConfig {
        FlatConfig {
            data: self.data.clone(),
            test: self.test.clone(),
            synthetic: self.synthetic.then_some(true),
            classes: self.classes,
            vocab_size: self.vocab_size,
            docs_per_class: self.docs_per_class,
            test_docs_per_class: self.test_docs_per_class,
            signal: self.signal,
            keywords_per_class: self.keywords_per_class,
            doc_len_min: self.doc_len_min,
            doc_len_max: self.doc_len_max,
            zipf_exponent: self.zipf_exponent,
            synth_seed: self.synth_seed,
            embeddings: self.embeddings.clone(),
            model: self.model.clone(),
            embedding_dim: self.embedding_dim,
            seq_len: self.seq_len,
            kernel_sizes: self.kernel_sizes.clone(),
            conv1_channels: self.conv1_channels,
            conv2_channels: self.conv2_channels,
            dropout: self.dropout,
            epochs: self.epochs,
            patience: self.patience,
            batch_size: self.batch_size,
            word_drop: self.word_drop,
            lr: self.lr,
            step_size: self.step_size,
            noise_range: self.noise_range,
            noise_kind: self.noise_kind.clone(),
            policy: self.policy.clone(),
            max_meta_epochs: self.max_meta_epochs,
            seed: self.seed,
            val_fraction: self.val_fraction,
            out: self.out.clone(),
            jobs: self.jobs,
        }
    }

    /// Merge defaults < config file < flags and validate.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut file = match &self.config {
            Some(path) => FlatConfig::load(path)?,
            None => FlatConfig::default(),
        };
        let flags = self.to_flat();
        // the two data-source spellings are one setting: a source given on
        // the command line replaces the file's source outright
        if flags.data.is_some() || flags.synthetic.is_some() {
            file.data = None;
            file.synthetic = None;
        }
        resolve(&flags.overlaid_on(file))
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Grid spec `name=v1,v2,...`, e.g. step_size=0.05,0.1,0.2,0.5,1.0
    #[arg(long, value_name = "NAME=V1,V2,...")]
    pub sweep: String,
    /// Seeded runs per grid value
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Checkpoint directory written by `grover train`
    pub checkpoint: PathBuf,
    /// Cue word to report neighbors for; repeatable
    #[arg(long = "cue", value_name = "TOKEN")]
    pub cues: Vec<String>,
    /// Neighbors per cue
    #[arg(short, long, default_value_t = 20)]
    pub k: usize,
    /// Word-vector file to measure drift against; defaults to the
    /// initial_embeddings.vec next to the checkpoint when present
    #[arg(long, value_name = "FILE")]
    pub initial: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Directory for train.csv and test.csv
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[arg(long)]
    pub classes: Option<usize>,
    #[arg(long)]
    pub vocab_size: Option<usize>,
    #[arg(long)]
    pub docs_per_class: Option<usize>,
    #[arg(long)]
    pub test_docs_per_class: Option<usize>,
    #[arg(long)]
    pub signal: Option<f64>,
    #[arg(long)]
    pub keywords_per_class: Option<usize>,
    #[arg(long)]
    pub doc_len_min: Option<usize>,
    #[arg(long)]
    pub doc_len_max: Option<usize>,
    #[arg(long)]
    pub zipf_exponent: Option<f64>,
    /// Corpus seed; the same seed writes identical files
    #[arg(long)]
    pub seed: Option<u64>,
}

impl SynthArgs {
    pub fn spec(&self) -> SyntheticSpec {
        let d = SyntheticSpec::default();
        SyntheticSpec {
            classes: self.classes.unwrap_or(d.classes),
            vocab_size: self.vocab_size.unwrap_or(d.vocab_size),
            docs_per_class: self.docs_per_class.unwrap_or(d.docs_per_class),
            test_docs_per_class: self.test_docs_per_class.unwrap_or(d.test_docs_per_class),
            signal: self.signal.unwrap_or(d.signal),
            keywords_per_class: self.keywords_per_class.unwrap_or(d.keywords_per_class),
            doc_len: (
                self.doc_len_min.unwrap_or(d.doc_len.0),
                self.doc_len_max.unwrap_or(d.doc_len.1),
            ),
            zipf_exponent: self.zipf_exponent.unwrap_or(d.zipf_exponent),
            seed: self.seed.unwrap_or(d.seed),
        }
    }
}
