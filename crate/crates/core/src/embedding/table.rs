//! The word-embedding matrix and its text file format.
//!
//! One row per token, row id = token id. The text format is one token plus
//! its values per line, space separated, with an optional `rows dim` header.
//! Values are written with the shortest decimal that parses back to the
//! identical bits, so save/load is value-exact.

use std::io::{BufRead, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use rand::distributions::{Distribution, Uniform};

use crate::data::vocab::{Vocabulary, FIRST_WORD_ID, PAD_ID};
use crate::error::{Error, Result};
use crate::rng::seeded_rng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable<T> {
    tokens: Arc<Vec<String>>,
    dim: usize,
    data: Vec<T>,
}

/// Half-width of the random init range.
const INIT_HALF_RANGE: f64 = 0.5;

impl<T: Scalar> EmbeddingTable<T> {
    /// Fresh table with every entry drawn uniformly from
    /// `[-0.5, 0.5)`, except the padding row, which stays all zero.
    pub fn init_random(vocab: &Vocabulary, dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("embedding dim must be positive".into()));
        }
        let rows = vocab.len();
        let dist = Uniform::new(T::lit(-INIT_HALF_RANGE), T::lit(INIT_HALF_RANGE));
        let mut rng = seeded_rng(seed);
        let mut data = vec![T::zero(); rows * dim];
        for id in 0..rows {
            if id == PAD_ID {
                continue;
            }
            for e in 0..dim {
                data[id * dim + e] = dist.sample(&mut rng);
            }
        }
        Ok(EmbeddingTable {
            tokens: Arc::new(vocab.tokens().to_vec()),
            dim,
            data,
        })
    }

    pub fn from_parts(tokens: Arc<Vec<String>>, dim: usize, data: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("embedding dim must be positive".into()));
        }
        if data.len() != tokens.len() * dim {
            return Err(Error::Contract(format!(
                "{} values cannot fill {} rows of dim {dim}",
                data.len(),
                tokens.len()
            )));
        }
        Ok(EmbeddingTable { tokens, dim, data })
    }

    pub fn rows(&self) -> usize {
        self.tokens.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn shared_tokens(&self) -> Arc<Vec<String>> {
        Arc::clone(&self.tokens)
    }

    pub fn row(&self, id: usize) -> &[T] {
        &self.data[id * self.dim..(id + 1) * self.dim]
    }

    pub fn row_mut(&mut self, id: usize) -> &mut [T] {
        &mut self.data[id * self.dim..(id + 1) * self.dim]
    }

    pub fn values(&self) -> &[T] {
        &self.data
    }

    /// Id of `token` by linear scan; analysis code builds its own map when
    /// it needs many lookups.
    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.tokens.iter().position(|t| t == token)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Writes `rows dim` then one `token v1 .. vd` line per row.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io_err = |e| Error::io(path, e);
        writeln!(w, "{} {}", self.rows(), self.dim).map_err(io_err)?;
        for id in 0..self.rows() {
            write!(w, "{}", self.tokens[id]).map_err(io_err)?;
            for v in self.row(id) {
                write!(w, " {v}").map_err(io_err)?;
            }
            writeln!(w).map_err(io_err)?;
        }
        w.flush().map_err(io_err)
    }

    /// Reads the text format back. The `rows dim` header is optional; a
    /// first line of exactly two integer fields is taken as one.
    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let reader = std::io::BufReader::new(file);
        let mut lines = reader.lines().enumerate();

        let mut tokens = Vec::new();
        let mut data = Vec::new();
        let mut dim: Option<usize> = None;
        let mut declared: Option<(usize, usize)> = None;

        let mut first = true;
        while let Some((idx, line)) = lines.next() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if first {
                first = false;
                if fields.len() == 2 {
                    if let (Ok(r), Ok(d)) = (fields[0].parse::<usize>(), fields[1].parse::<usize>())
                    {
                        declared = Some((r, d));
                        continue;
                    }
                }
            }
            if fields.len() < 2 {
                return Err(Error::parse(path, lineno, "expected a token and at least one value"));
            }
            let row_dim = fields.len() - 1;
            match dim {
                None => {
                    if let Some((_, d)) = declared {
                        if d != row_dim {
                            return Err(Error::parse(
                                path,
                                lineno,
                                format!("header declares dim {d} but row has {row_dim} values"),
                            ));
                        }
                    }
                    dim = Some(row_dim);
                }
                Some(d) if d != row_dim => {
                    return Err(Error::parse(
                        path,
                        lineno,
                        format!("row has {row_dim} values, earlier rows had {d}"),
                    ));
                }
                _ => {}
            }
            tokens.push(fields[0].to_owned());
            for field in &fields[1..] {
                let v: T = field.parse().map_err(|_| {
                    Error::parse(path, lineno, format!("{field:?} is not a number"))
                })?;
                if !v.is_finite() {
                    return Err(Error::parse(path, lineno, format!("non-finite value {field:?}")));
                }
                data.push(v);
            }
        }

        let dim = dim.ok_or_else(|| Error::parse(path, 0, "file holds no embedding rows"))?;
        if let Some((r, _)) = declared {
            if r != tokens.len() {
                return Err(Error::parse(
                    path,
                    0,
                    format!("header declares {r} rows but file holds {}", tokens.len()),
                ));
            }
        }
        EmbeddingTable::from_parts(Arc::new(tokens), dim, data)
    }
}

/// Result of merging a pretrained vector file into a vocabulary.
#[derive(Debug)]
pub struct PretrainedLoad<T> {
    pub table: EmbeddingTable<T>,
    /// Vocabulary words found in the file.
    pub found: usize,
    /// Vocabulary words that kept their random init.
    pub missing: usize,
}

/// Builds a table for `vocab` from a pretrained vector file. Words present
/// in the file take the file's vector; absent words keep the seeded random
/// init. File tokens outside the vocabulary are skipped, as are the special
/// rows, so the padding row stays zero.
pub fn load_pretrained<T: Scalar>(
    path: &Path,
    vocab: &Vocabulary,
    dim: usize,
    seed: u64,
) -> Result<PretrainedLoad<T>> {
    let mut table = EmbeddingTable::<T>::init_random(vocab, dim, seed)?;
    let loaded = EmbeddingTable::<T>::load(path)?;
    if loaded.dim() != dim {
        return Err(Error::Config(format!(
            "pretrained file {} has dim {}, expected {dim}",
            path.display(),
            loaded.dim()
        )));
    }
    let mut seen = vec![false; vocab.len()];
    for (row, token) in loaded.tokens().iter().enumerate() {
        if let Some(id) = vocab.id_of(token) {
            if Vocabulary::is_special(id) || seen[id] {
                continue;
            }
            seen[id] = true;
            table.row_mut(id).copy_from_slice(loaded.row(row));
        }
    }
    let found = seen.iter().filter(|&&s| s).count();
    let missing = vocab.len() - FIRST_WORD_ID - found;
    Ok(PretrainedLoad {
        table,
        found,
        missing,
    })
}
