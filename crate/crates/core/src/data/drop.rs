//! Word dropping: the data-level regularizer.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Removes each item independently with probability `p`. Relative order is
/// kept. The caller re-samples every epoch by passing a fresh stream; the
/// result may be empty.
pub fn word_drop<T: Clone>(items: &[T], p: f64, rng: &mut ChaCha8Rng) -> Result<Vec<T>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Config(format!(
            "word-drop probability must be in [0, 1], got {p}"
        )));
    }
    if p == 0.0 {
        return Ok(items.to_vec());
    }
    Ok(items
        .iter()
        .filter(|_| rng.gen::<f64>() >= p)
        .cloned()
        .collect())
}
