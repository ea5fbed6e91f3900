//! Checkpoint directories.
//!
//! A checkpoint is a directory of four plain-text files:
//!
//! - `manifest.json`: configs, the winning round's record, tensor layout,
//!   and integrity hashes
//! - `vocab.txt`: one `token<TAB>frequency` line per id
//! - `embeddings.vec`: the fine-tuned table in word-vector text format
//! - `model.params`: flat parameter values, one per line
//!
//! Values are written in shortest round-trip decimal, so a load restores
//! them bit for bit at the same precision. Loading re-hashes the configs
//! and the vocabulary and refuses anything that was edited after saving.

use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::data::vocab::Vocabulary;
use crate::embedding::table::EmbeddingTable;
use crate::error::{Error, Result};
use crate::meta::config::MetaConfig;
use crate::meta::record::MetaEpochRecord;
use crate::nn::config::ClassifierConfig;
use crate::nn::params::{tensor_specs, ClassifierParams, TensorSpec};
use crate::scalar::Scalar;
use crate::train::TrainSettings;

pub const FORMAT_VERSION: u32 = 1;

const MANIFEST_FILE: &str = "manifest.json";
const VOCAB_FILE: &str = "vocab.txt";
const EMBEDDINGS_FILE: &str = "embeddings.vec";
const PARAMS_FILE: &str = "model.params";

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    /// Numeric type the values were written at; loads must match it.
    pub scalar: String,
    pub classifier: ClassifierConfig,
    pub settings: TrainSettings,
    pub meta: MetaConfig,
    /// The winning round.
    pub record: MetaEpochRecord,
    pub tensors: Vec<TensorSpec>,
    pub config_sha256: String,
    pub vocab_sha256: String,
}

/// Borrowed view of everything a checkpoint persists.
pub struct Checkpoint<'a, T> {
    pub classifier: &'a ClassifierConfig,
    pub settings: &'a TrainSettings,
    pub meta: &'a MetaConfig,
    pub record: &'a MetaEpochRecord,
    pub params: &'a ClassifierParams<T>,
    pub embeddings: &'a EmbeddingTable<T>,
    pub vocab: &'a Vocabulary,
}

#[derive(Debug)]
pub struct LoadedCheckpoint<T> {
    pub manifest: Manifest,
    pub params: ClassifierParams<T>,
    pub embeddings: EmbeddingTable<T>,
    pub vocab: Vocabulary,
}

fn hex_sha256(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn config_hash(
    classifier: &ClassifierConfig,
    settings: &TrainSettings,
    meta: &MetaConfig,
) -> Result<String> {
    let blob = serde_json::to_string(&(classifier, settings, meta))
        .map_err(|e| Error::Contract(format!("configs failed to serialize: {e}")))?;
    Ok(hex_sha256(blob.as_bytes()))
}

fn vocab_lines(vocab: &Vocabulary) -> String {
    let mut out = String::new();
    for (token, freq) in vocab.tokens().iter().zip(vocab.frequencies()) {
        out.push_str(token);
        out.push('\t');
        out.push_str(&freq.to_string());
        out.push('\n');
    }
    out
}

pub fn save_checkpoint<T: Scalar>(dir: &Path, cp: &Checkpoint<'_, T>) -> Result<()> {
    cp.params.audit(cp.classifier)?;
    if cp.embeddings.rows() != cp.vocab.len() {
        return Err(Error::Contract(format!(
            "embedding table of {} rows against a vocabulary of {}",
            cp.embeddings.rows(),
            cp.vocab.len()
        )));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let vocab_text = vocab_lines(cp.vocab);
    let vocab_path = dir.join(VOCAB_FILE);
    fs::write(&vocab_path, &vocab_text).map_err(|e| Error::io(&vocab_path, e))?;

    cp.embeddings.save(&dir.join(EMBEDDINGS_FILE))?;

    let params_path = dir.join(PARAMS_FILE);
    let mut buf = String::new();
    let flat = cp.params.to_flat();
    buf.push_str(&flat.len().to_string());
    buf.push('\n');
    for v in &flat {
        buf.push_str(&format!("{v}\n"));
    }
    fs::write(&params_path, buf).map_err(|e| Error::io(&params_path, e))?;

    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        scalar: std::any::type_name::<T>().to_string(),
        classifier: cp.classifier.clone(),
        settings: cp.settings.clone(),
        meta: cp.meta.clone(),
        record: cp.record.clone(),
        tensors: tensor_specs(cp.classifier),
        config_sha256: config_hash(cp.classifier, cp.settings, cp.meta)?,
        vocab_sha256: hex_sha256(vocab_text.as_bytes()),
    };
    let manifest_path = dir.join(MANIFEST_FILE);
    let mut file = fs::File::create(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Contract(format!("manifest failed to serialize: {e}")))?;
    file.write_all(json.as_bytes())
        .map_err(|e| Error::io(&manifest_path, e))?;
    file.write_all(b"\n").map_err(|e| Error::io(&manifest_path, e))?;
    Ok(())
}

pub fn load_checkpoint<T: Scalar>(dir: &Path) -> Result<LoadedCheckpoint<T>> {
    let manifest_path = dir.join(MANIFEST_FILE);
    let manifest_text =
        fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: Manifest = serde_json::from_str(&manifest_text).map_err(|e| {
        Error::parse(&manifest_path, 0, format!("manifest does not parse: {e}"))
    })?;

    if manifest.format_version != FORMAT_VERSION {
        return Err(Error::CheckpointMismatch(format!(
            "format version {} but this build reads {FORMAT_VERSION}",
            manifest.format_version
        )));
    }
    let want_scalar = std::any::type_name::<T>();
    if manifest.scalar != want_scalar {
        return Err(Error::CheckpointMismatch(format!(
            "values were saved as {} but the load asks for {want_scalar}",
            manifest.scalar
        )));
    }
    let rehashed = config_hash(&manifest.classifier, &manifest.settings, &manifest.meta)?;
    if rehashed != manifest.config_sha256 {
        return Err(Error::CheckpointMismatch(
            "configuration does not match its recorded hash; the manifest was edited".into(),
        ));
    }

    let vocab_path = dir.join(VOCAB_FILE);
    let vocab_text = fs::read_to_string(&vocab_path).map_err(|e| Error::io(&vocab_path, e))?;
    if hex_sha256(vocab_text.as_bytes()) != manifest.vocab_sha256 {
        return Err(Error::CheckpointMismatch(
            "vocabulary does not match its recorded hash".into(),
        ));
    }
    let mut rows = Vec::new();
    for (i, line) in vocab_text.lines().enumerate() {
        let (token, freq) = line.split_once('\t').ok_or_else(|| {
            Error::parse(&vocab_path, i + 1, "expected token<TAB>frequency")
        })?;
        let freq: u64 = freq
            .parse()
            .map_err(|_| Error::parse(&vocab_path, i + 1, format!("bad frequency {freq:?}")))?;
        rows.push((token.to_string(), freq));
    }
    let vocab = Vocabulary::from_rows(rows)?;

    let embeddings = EmbeddingTable::<T>::load(&dir.join(EMBEDDINGS_FILE))?;
    if embeddings.rows() != vocab.len() || embeddings.dim() != manifest.classifier.embedding_dim {
        return Err(Error::CheckpointMismatch(format!(
            "embedding table is {}x{}, manifest says {}x{}",
            embeddings.rows(),
            embeddings.dim(),
            vocab.len(),
            manifest.classifier.embedding_dim
        )));
    }

    let params_path = dir.join(PARAMS_FILE);
    let params_text = fs::read_to_string(&params_path).map_err(|e| Error::io(&params_path, e))?;
    let mut lines = params_text.lines().enumerate();
    let (_, count_line) = lines
        .next()
        .ok_or_else(|| Error::parse(&params_path, 1, "empty parameter file"))?;
    let count: usize = count_line
        .trim()
        .parse()
        .map_err(|_| Error::parse(&params_path, 1, format!("bad value count {count_line:?}")))?;
    let mut flat = Vec::with_capacity(count);
    for (i, line) in lines {
        let v: T = line.trim().parse().map_err(|_| {
            Error::parse(&params_path, i + 1, format!("bad parameter value {line:?}"))
        })?;
        flat.push(v);
    }
    if flat.len() != count {
        return Err(Error::parse(
            &params_path,
            1,
            format!("header promises {count} values, file holds {}", flat.len()),
        ));
    }
    let params = ClassifierParams::from_flat(&manifest.classifier, &flat)?;

    Ok(LoadedCheckpoint {
        manifest,
        params,
        embeddings,
        vocab,
    })
}
