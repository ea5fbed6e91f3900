//! Cosine similarity and nearest-neighbor reports over an embedding table.

use crate::data::vocab::Vocabulary;
use crate::embedding::table::EmbeddingTable;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Cosine of the angle between two vectors, in [-1, 1]. Accumulates in f64
/// whatever the table precision, and clamps against rounding overshoot.
pub fn cosine_similarity<T: Scalar>(u: &[T], v: &[T]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Input(format!(
            "cosine of a {}-dim vector against a {}-dim vector",
            u.len(),
            v.len()
        )));
    }
    let mut dot = 0.0f64;
    let mut nu = 0.0f64;
    let mut nv = 0.0f64;
    for (a, b) in u.iter().zip(v) {
        let (a, b) = (a.to_f64_lossy(), b.to_f64_lossy());
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::UndefinedSimilarity(
            "cosine against a zero vector".into(),
        ));
    }
    // sqrt(nu * nv) rather than sqrt(nu) * sqrt(nv): for identical vectors
    // the denominator then equals the dot product bit for bit, making
    // self-similarity exactly 1
    Ok((dot / (nu * nv).sqrt()).clamp(-1.0, 1.0))
}

/// Top neighbors of one cue word, similarities non-increasing.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NeighborReport {
    pub cue: String,
    /// `(token, cosine similarity)`, at most the requested k entries; fewer
    /// when the vocabulary runs out of comparable words.
    pub neighbors: Vec<(String, f64)>,
}

impl NeighborReport {
    /// One line of `token(similarity)` entries after the cue.
    pub fn to_text(&self) -> String {
        let entries: Vec<String> = self
            .neighbors
            .iter()
            .map(|(tok, sim)| format!("{tok}({sim:.4})"))
            .collect();
        format!("{}: {}", self.cue, entries.join(" "))
    }
}

/// Exact top-`k` words by cosine against `cue`, special tokens and the cue
/// itself excluded, ties broken by ascending id. Zero-norm rows cannot be
/// compared and are skipped; a zero-norm cue is an error.
pub fn nearest_neighbors<T: Scalar>(
    table: &EmbeddingTable<T>,
    vocab: &Vocabulary,
    cue: &str,
    k: usize,
) -> Result<NeighborReport> {
    if table.rows() != vocab.len() {
        return Err(Error::Input(format!(
            "table of {} rows against a vocabulary of {}",
            table.rows(),
            vocab.len()
        )));
    }
    if k >= vocab.len() {
        return Err(Error::Input(format!(
            "asked for {k} neighbors from a vocabulary of {}",
            vocab.len()
        )));
    }
    let cue_id = vocab
        .id_of(cue)
        .ok_or_else(|| Error::Input(format!("cue token {cue:?} is not in the vocabulary")))?;

    let cue_row = table.row(cue_id);
    let mut scored: Vec<(usize, f64)> = Vec::new();
    for id in 0..vocab.len() {
        if id == cue_id || Vocabulary::is_special(id) {
            continue;
        }
        match cosine_similarity(cue_row, table.row(id)) {
            Ok(sim) => scored.push((id, sim)),
            Err(Error::UndefinedSimilarity(_)) => {
                // a zero cue row poisons every comparison; a zero candidate
                // row only removes itself
                if cue_row.iter().all(|x| *x == T::zero()) {
                    return Err(Error::UndefinedSimilarity(format!(
                        "cue token {cue:?} has a zero vector"
                    )));
                }
            }
            Err(e) => return Err(e),
        }
    }
    scored.sort_by(|(ida, sa), (idb, sb)| {
        sb.partial_cmp(sa)
            .expect("clamped similarities are ordered")
            .then(ida.cmp(idb))
    });
    scored.truncate(k);
    Ok(NeighborReport {
        cue: cue.to_owned(),
        neighbors: scored
            .into_iter()
            .map(|(id, sim)| {
                let token = vocab.token_of(id).expect("id came from the vocabulary");
                (token.to_owned(), sim)
            })
            .collect(),
    })
}
