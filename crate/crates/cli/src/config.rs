//! Run configuration: defaults, overlaid by a flat config file, overlaid by
//! command-line flags. The fully resolved settings are echoed into the
//! output directory so every run can be rerun from its own artifacts.

use std::path::{Path, PathBuf};

use grover_core::data::synthetic::SyntheticSpec;
use grover_core::embedding::noise::NoiseKind;
use grover_core::error::{Error, Result};
use grover_core::meta::{MetaConfig, Policy};
use grover_core::nn::{ClassifierConfig, ModelKind};
use grover_core::train::TrainSettings;

pub const DEFAULT_VAL_FRACTION: f64 = 0.15;

/// Every settable key, all optional. Field names double as the config-file
/// keys and match the long flag names with dashes swapped for underscores.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlatConfig {
    // data source (exactly one of data / synthetic)
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<bool>,
    // synthetic corpus shape
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vocab_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub docs_per_class: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_docs_per_class: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub keywords_per_class: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub doc_len_min: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub doc_len_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zipf_exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synth_seed: Option<u64>,
    // embedding source: "random" or a word-vector file path
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embeddings: Option<String>,
    // classifier
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embedding_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seq_len: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_sizes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conv1_channels: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conv2_channels: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dropout: Option<f64>,
    // inner training
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub patience: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word_drop: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lr: Option<f64>,
    // meta loop
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_size: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_range: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_meta_epochs: Option<usize>,
    // run plumbing
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub val_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

impl FlatConfig {
    pub fn load(path: &Path) -> Result<FlatConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| {
            let line = e.span().map_or(0, |s| text[..s.start].lines().count());
            Error::parse(path, line, e.message().to_string())
        })
    }

    /// Returns `self` with every unset field taken from `base`.
    pub fn overlaid_on(self, base: FlatConfig) -> FlatConfig {
        FlatConfig {
            data: self.data.or(base.data),
            test: self.test.or(base.test),
            synthetic: self.synthetic.or(base.synthetic),
            classes: self.classes.or(base.classes),
            vocab_size: self.vocab_size.or(base.vocab_size),
            docs_per_class: self.docs_per_class.or(base.docs_per_class),
            test_docs_per_class: self.test_docs_per_class.or(base.test_docs_per_class),
            signal: self.signal.or(base.signal),
            keywords_per_class: self.keywords_per_class.or(base.keywords_per_class),
            doc_len_min: self.doc_len_min.or(base.doc_len_min),
            doc_len_max: self.doc_len_max.or(base.doc_len_max),
            zipf_exponent: self.zipf_exponent.or(base.zipf_exponent),
            synth_seed: self.synth_seed.or(base.synth_seed),
            embeddings: self.embeddings.or(base.embeddings),
            model: self.model.or(base.model),
            embedding_dim: self.embedding_dim.or(base.embedding_dim),
            seq_len: self.seq_len.or(base.seq_len),
            kernel_sizes: self.kernel_sizes.or(base.kernel_sizes),
            conv1_channels: self.conv1_channels.or(base.conv1_channels),
            conv2_channels: self.conv2_channels.or(base.conv2_channels),
            dropout: self.dropout.or(base.dropout),
            epochs: self.epochs.or(base.epochs),
            patience: self.patience.or(base.patience),
            batch_size: self.batch_size.or(base.batch_size),
            word_drop: self.word_drop.or(base.word_drop),
            lr: self.lr.or(base.lr),
            step_size: self.step_size.or(base.step_size),
            noise_range: self.noise_range.or(base.noise_range),
            noise_kind: self.noise_kind.or(base.noise_kind),
            policy: self.policy.or(base.policy),
            max_meta_epochs: self.max_meta_epochs.or(base.max_meta_epochs),
            seed: self.seed.or(base.seed),
            val_fraction: self.val_fraction.or(base.val_fraction),
            out: self.out.or(base.out),
            jobs: self.jobs.or(base.jobs),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Csv {
        train: PathBuf,
        test: Option<PathBuf>,
    },
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub enum EmbeddingSource {
    Random,
    Pretrained(PathBuf),
}

/// Fully resolved settings for one command. `classifier.num_classes` is a
/// placeholder until the data is loaded; everything else is final.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub data: DataSource,
    pub embeddings: EmbeddingSource,
    pub classifier: ClassifierConfig,
    pub settings: TrainSettings,
    pub meta: MetaConfig,
    pub seed: u64,
    pub val_fraction: f64,
    pub out: PathBuf,
    pub jobs: usize,
}

/// Applies defaults to a merged flat document and validates the result.
pub fn resolve(flat: &FlatConfig) -> Result<RunConfig> {
    let data = match (&flat.data, flat.synthetic.unwrap_or(false)) {
        (Some(_), true) => {
            return Err(Error::Config(
                "data and synthetic are exclusive; pick one source".into(),
            ))
        }
        (None, false) => {
            return Err(Error::Config(
                "no data source: set data = \"corpus.csv\" or synthetic = true".into(),
            ))
        }
        (Some(path), false) => DataSource::Csv {
            train: path.clone(),
            test: flat.test.clone(),
        },
        (None, true) => {
            if flat.test.is_some() {
                return Err(Error::Config(
                    "synthetic corpora generate their own test split; drop the test path".into(),
                ));
            }
            let d = SyntheticSpec::default();
            DataSource::Synthetic(SyntheticSpec {
                classes: flat.classes.unwrap_or(d.classes),
                vocab_size: flat.vocab_size.unwrap_or(d.vocab_size),
                docs_per_class: flat.docs_per_class.unwrap_or(d.docs_per_class),
                test_docs_per_class: flat.test_docs_per_class.unwrap_or(d.test_docs_per_class),
                signal: flat.signal.unwrap_or(d.signal),
                keywords_per_class: flat.keywords_per_class.unwrap_or(d.keywords_per_class),
                doc_len: (
                    flat.doc_len_min.unwrap_or(d.doc_len.0),
                    flat.doc_len_max.unwrap_or(d.doc_len.1),
                ),
                zipf_exponent: flat.zipf_exponent.unwrap_or(d.zipf_exponent),
                seed: flat.synth_seed.unwrap_or(d.seed),
            })
        }
    };

    let embeddings = match flat.embeddings.as_deref() {
        None | Some("random") => EmbeddingSource::Random,
        Some(path) => EmbeddingSource::Pretrained(PathBuf::from(path)),
    };

    let base_cfg = ClassifierConfig::default();
    let model = match &flat.model {
        Some(name) => name.parse::<ModelKind>()?,
        None => base_cfg.model,
    };
    let classifier = ClassifierConfig {
        model,
        embedding_dim: flat.embedding_dim.unwrap_or(base_cfg.embedding_dim),
        seq_len: flat.seq_len.unwrap_or(base_cfg.seq_len),
        kernel_sizes: flat.kernel_sizes.clone().unwrap_or(base_cfg.kernel_sizes),
        conv1_channels: flat.conv1_channels.unwrap_or(base_cfg.conv1_channels),
        conv2_channels: flat.conv2_channels.unwrap_or(base_cfg.conv2_channels),
        num_classes: 2,
        dropout_p: flat.dropout.unwrap_or(base_cfg.dropout_p),
    };

    let base_settings = TrainSettings::default();
    let mut settings = TrainSettings {
        max_epochs: flat.epochs.unwrap_or(base_settings.max_epochs),
        patience: flat.patience.unwrap_or(base_settings.patience),
        batch_size: flat.batch_size.unwrap_or(base_settings.batch_size),
        word_drop: flat.word_drop.unwrap_or(base_settings.word_drop),
        optimizer: base_settings.optimizer,
    };
    if let Some(lr) = flat.lr {
        settings.optimizer.lr = lr;
    }
    settings.validate()?;

    let base_meta = MetaConfig::default();
    let seed = flat.seed.unwrap_or(0);
    let meta = MetaConfig {
        step_size: flat.step_size.unwrap_or(base_meta.step_size),
        noise_range: flat.noise_range.unwrap_or(base_meta.noise_range),
        noise_kind: match &flat.noise_kind {
            Some(name) => name.parse::<NoiseKind>()?,
            None => base_meta.noise_kind,
        },
        policy: match &flat.policy {
            Some(name) => name.parse::<Policy>()?,
            None => base_meta.policy,
        },
        max_meta_epochs: flat.max_meta_epochs.unwrap_or(base_meta.max_meta_epochs),
        master_seed: seed,
    };
    meta.validate()?;

    let val_fraction = flat.val_fraction.unwrap_or(DEFAULT_VAL_FRACTION);
    if !(val_fraction > 0.0 && val_fraction < 1.0) {
        return Err(Error::Config(format!(
            "val_fraction must be in (0, 1), got {val_fraction}"
        )));
    }
    let out = flat
        .out
        .clone()
        .ok_or_else(|| Error::Config("no output directory: set out = \"runs/...\"".into()))?;

    Ok(RunConfig {
        data,
        embeddings,
        classifier,
        settings,
        meta,
        seed,
        val_fraction,
        out,
        jobs: flat.jobs.unwrap_or(1),
    })
}

/// The run's settings as a complete flat document, loadable as a config
/// file. The classifier's class count is derived from the data, so it is
/// not part of the document.
pub fn echo(run: &RunConfig) -> FlatConfig {
    let mut flat = FlatConfig {
        embeddings: Some(match &run.embeddings {
            EmbeddingSource::Random => "random".to_owned(),
            EmbeddingSource::Pretrained(p) => p.display().to_string(),
        }),
        model: Some(run.classifier.model.name().to_owned()),
        embedding_dim: Some(run.classifier.embedding_dim),
        seq_len: Some(run.classifier.seq_len),
        kernel_sizes: Some(run.classifier.kernel_sizes.clone()),
        conv1_channels: Some(run.classifier.conv1_channels),
        conv2_channels: Some(run.classifier.conv2_channels),
        dropout: Some(run.classifier.dropout_p),
        epochs: Some(run.settings.max_epochs),
        patience: Some(run.settings.patience),
        batch_size: Some(run.settings.batch_size),
        word_drop: Some(run.settings.word_drop),
        lr: Some(run.settings.optimizer.lr),
        step_size: Some(run.meta.step_size),
        noise_range: Some(run.meta.noise_range),
        noise_kind: Some(run.meta.noise_kind.name().to_owned()),
        policy: Some(run.meta.policy.name().to_owned()),
        max_meta_epochs: Some(run.meta.max_meta_epochs),
        seed: Some(run.seed),
        val_fraction: Some(run.val_fraction),
        out: Some(run.out.clone()),
        jobs: Some(run.jobs),
        ..FlatConfig::default()
    };
    match &run.data {
        DataSource::Csv { train, test } => {
            flat.data = Some(train.clone());
            flat.test = test.clone();
        }
        DataSource::Synthetic(spec) => {
            flat.synthetic = Some(true);
            flat.classes = Some(spec.classes);
            flat.vocab_size = Some(spec.vocab_size);
            flat.docs_per_class = Some(spec.docs_per_class);
            flat.test_docs_per_class = Some(spec.test_docs_per_class);
            flat.signal = Some(spec.signal);
            flat.keywords_per_class = Some(spec.keywords_per_class);
            flat.doc_len_min = Some(spec.doc_len.0);
            flat.doc_len_max = Some(spec.doc_len.1);
            flat.zipf_exponent = Some(spec.zipf_exponent);
            flat.synth_seed = Some(spec.seed);
        }
    }
    flat
}

pub fn echo_toml(run: &RunConfig) -> Result<String> {
    toml::to_string_pretty(&echo(run))
        .map_err(|e| Error::Contract(format!("effective config failed to serialize: {e}")))
}
