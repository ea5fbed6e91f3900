//! How far word vectors moved between two tables.

use std::collections::BTreeSet;

use crate::analysis::similarity::{cosine_similarity, nearest_neighbors};
use crate::data::vocab::Vocabulary;
use crate::embedding::table::EmbeddingTable;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WordDrift {
    pub id: usize,
    pub euclidean: f64,
    /// Cosine between the word's old and new vector; absent when either is
    /// a zero vector.
    pub cosine_to_former: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DriftReport {
    pub per_word: Vec<WordDrift>,
    pub mean_euclidean: f64,
    pub median_euclidean: f64,
    /// Aggregates over the words whose cosine is defined.
    pub mean_cosine: Option<f64>,
    pub median_cosine: Option<f64>,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Per-word and aggregate movement from `a` to `b`. When `ids` is absent
/// every non-special row is measured; the always-zero padding row and the
/// catch-all row would only dilute the aggregates.
pub fn embedding_drift<T: Scalar>(
    a: &EmbeddingTable<T>,
    b: &EmbeddingTable<T>,
    ids: Option<&BTreeSet<usize>>,
) -> Result<DriftReport> {
    if a.rows() != b.rows() || a.dim() != b.dim() {
        return Err(Error::Input(format!(
            "drift between a {}x{} table and a {}x{} table",
            a.rows(),
            a.dim(),
            b.rows(),
            b.dim()
        )));
    }
    let all: BTreeSet<usize>;
    let ids = match ids {
        Some(set) => {
            if let Some(&bad) = set.iter().find(|&&id| id >= a.rows()) {
                return Err(Error::Input(format!(
                    "drift id {bad} outside the {}-row table",
                    a.rows()
                )));
            }
            set
        }
        None => {
            all = (0..a.rows()).filter(|&id| !Vocabulary::is_special(id)).collect();
            &all
        }
    };
    if ids.is_empty() {
        return Err(Error::Input("drift over an empty id set".into()));
    }

    let mut per_word = Vec::with_capacity(ids.len());
    for &id in ids {
        let (u, v) = (a.row(id), b.row(id));
        let euclidean = u
            .iter()
            .zip(v)
            .map(|(x, y)| {
                let d = x.to_f64_lossy() - y.to_f64_lossy();
                d * d
            })
            .sum::<f64>()
            .sqrt();
        let cosine_to_former = match cosine_similarity(u, v) {
            Ok(sim) => Some(sim),
            Err(Error::UndefinedSimilarity(_)) => None,
            Err(e) => return Err(e),
        };
        per_word.push(WordDrift {
            id,
            euclidean,
            cosine_to_former,
        });
    }

    let mut eu: Vec<f64> = per_word.iter().map(|w| w.euclidean).collect();
    eu.sort_by(|x, y| x.partial_cmp(y).expect("distances are finite"));
    let mean_euclidean = eu.iter().sum::<f64>() / eu.len() as f64;
    let median_euclidean = median(&eu);

    let mut cos: Vec<f64> = per_word.iter().filter_map(|w| w.cosine_to_former).collect();
    cos.sort_by(|x, y| x.partial_cmp(y).expect("similarities are finite"));
    let (mean_cosine, median_cosine) = if cos.is_empty() {
        (None, None)
    } else {
        (Some(cos.iter().sum::<f64>() / cos.len() as f64), Some(median(&cos)))
    };

    Ok(DriftReport {
        per_word,
        mean_euclidean,
        median_euclidean,
        mean_cosine,
        median_cosine,
    })
}

/// Jaccard overlap of the two tables' top-`k` neighbor sets for `cue`:
/// 1 means the neighborhood survived intact, 0 means it fully churned.
pub fn neighbor_overlap<T: Scalar>(
    a: &EmbeddingTable<T>,
    b: &EmbeddingTable<T>,
    vocab: &Vocabulary,
    cue: &str,
    k: usize,
) -> Result<f64> {
    let set = |table: &EmbeddingTable<T>| -> Result<BTreeSet<String>> {
        Ok(nearest_neighbors(table, vocab, cue, k)?
            .neighbors
            .into_iter()
            .map(|(tok, _)| tok)
            .collect())
    };
    let sa = set(a)?;
    let sb = set(b)?;
    let union = sa.union(&sb).count();
    if union == 0 {
        // no comparable neighbors in either table, nothing churned
        return Ok(1.0);
    }
    Ok(sa.intersection(&sb).count() as f64 / union as f64)
}
