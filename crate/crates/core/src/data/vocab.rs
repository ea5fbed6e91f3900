//! Vocabulary over a training split.
//!
//! Ids 0 and 1 are reserved for the padding and unknown-word tokens; real
//! words start at [`FIRST_WORD_ID`] in first-occurrence order. Frequencies
//! are raw counts over the training texts only, so the downstream noise
//! schedule never peeks at validation or test data.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub const PAD_ID: usize = 0;
pub const OOV_ID: usize = 1;
pub const PAD_TOKEN: &str = "<pad>";
pub const OOV_TOKEN: &str = "<oov>";
/// First id that maps to a corpus word rather than a special token.
pub const FIRST_WORD_ID: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    token_to_id: HashMap<String, usize>,
    id_to_token: Vec<String>,
    /// Raw training-split counts; zero for the two specials.
    frequency: Vec<u64>,
}

impl Vocabulary {
    /// Builds from tokenized training documents. Ids follow first occurrence.
    pub fn build(docs: &[Vec<String>]) -> Result<Self> {
        if docs.is_empty() {
            return Err(Error::Input("cannot build a vocabulary from zero documents".into()));
        }
        let mut vocab = Vocabulary {
            token_to_id: HashMap::from([
                (PAD_TOKEN.to_owned(), PAD_ID),
                (OOV_TOKEN.to_owned(), OOV_ID),
            ]),
            id_to_token: vec![PAD_TOKEN.to_owned(), OOV_TOKEN.to_owned()],
            frequency: vec![0, 0],
        };
        for doc in docs {
            for token in doc {
                match vocab.token_to_id.get(token) {
                    Some(&id) => vocab.frequency[id] += 1,
                    None => {
                        let id = vocab.id_to_token.len();
                        vocab.token_to_id.insert(token.clone(), id);
                        vocab.id_to_token.push(token.clone());
                        vocab.frequency.push(1);
                    }
                }
            }
        }
        Ok(vocab)
    }

    /// Reassembles a vocabulary saved as (token, frequency) rows in id order.
    /// Rows 0 and 1 must be the special tokens.
    pub fn from_rows(rows: Vec<(String, u64)>) -> Result<Self> {
        if rows.len() < FIRST_WORD_ID
            || rows[PAD_ID].0 != PAD_TOKEN
            || rows[OOV_ID].0 != OOV_TOKEN
        {
            return Err(Error::Input(
                "vocabulary rows must start with the padding and unknown-word tokens".into(),
            ));
        }
        let mut token_to_id = HashMap::with_capacity(rows.len());
        for (id, (token, _)) in rows.iter().enumerate() {
            if token_to_id.insert(token.clone(), id).is_some() {
                return Err(Error::Input(format!("duplicate vocabulary token {token:?}")));
            }
        }
        let (id_to_token, frequency): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        Ok(Vocabulary {
            token_to_id,
            id_to_token,
            frequency,
        })
    }

    pub fn len(&self) -> usize {
        self.id_to_token.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the two specials are always present
    }

    pub fn id_of(&self, token: &str) -> Option<usize> {
        self.token_to_id.get(token).copied()
    }

    /// Id used when encoding `token`; unknown words map to the OOV id.
    pub fn encode_token(&self, token: &str) -> usize {
        self.id_of(token).unwrap_or(OOV_ID)
    }

    pub fn token_of(&self, id: usize) -> Option<&str> {
        self.id_to_token.get(id).map(String::as_str)
    }

    pub fn frequency_of(&self, id: usize) -> u64 {
        self.frequency[id]
    }

    pub fn tokens(&self) -> &[String] {
        &self.id_to_token
    }

    pub fn frequencies(&self) -> &[u64] {
        &self.frequency
    }

    pub fn is_special(id: usize) -> bool {
        id < FIRST_WORD_ID
    }
}
