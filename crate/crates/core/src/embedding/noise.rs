//! The maskers: additive random noise on selected embedding rows.

use std::collections::BTreeSet;

use rand::distributions::{Distribution, Uniform};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::data::vocab::Vocabulary;
use crate::embedding::table::EmbeddingTable;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    /// Additive noise drawn per element from `[-range, range)`. The default.
    Uniform,
    /// Additive zero-mean Gaussian with standard deviation `range`.
    Gaussian,
}

impl NoiseKind {
    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::Uniform => "uniform",
            NoiseKind::Gaussian => "gaussian",
        }
    }
}

impl std::fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(NoiseKind::Uniform),
            "gaussian" => Ok(NoiseKind::Gaussian),
            other => Err(Error::Config(format!(
                "unknown noise kind {other:?} (expected uniform or gaussian)"
            ))),
        }
    }
}

/// Returns a copy of `table` with noise added to every element of every
/// masked row. Rows outside `mask` are bit-identical to the input. Masked
/// rows are perturbed in ascending id order so the result is a pure
/// function of (table, mask, range, kind, rng seed).
pub fn apply_maskers<T: Scalar>(
    table: &EmbeddingTable<T>,
    mask: &BTreeSet<usize>,
    range: f64,
    kind: NoiseKind,
    rng: &mut ChaCha8Rng,
) -> Result<EmbeddingTable<T>> {
    if range < 0.0 {
        return Err(Error::Config(format!("noise range must be >= 0, got {range}")));
    }
    if let Some(&id) = mask.iter().find(|&&id| Vocabulary::is_special(id)) {
        return Err(Error::Contract(format!(
            "special row {id} must never be masked"
        )));
    }
    if let Some(&id) = mask.iter().find(|&&id| id >= table.rows()) {
        return Err(Error::Contract(format!(
            "masked id {id} outside table of {} rows",
            table.rows()
        )));
    }
    let mut out = table.clone();
    if range == 0.0 {
        return Ok(out);
    }
    match kind {
        NoiseKind::Uniform => {
            let dist = Uniform::new(T::lit(-range), T::lit(range));
            for &id in mask {
                for v in out.row_mut(id) {
                    *v += dist.sample(rng);
                }
            }
        }
        NoiseKind::Gaussian => {
            for &id in mask {
                for v in out.row_mut(id) {
                    *v += T::lit(gaussian(rng) * range);
                }
            }
        }
    }
    Ok(out)
}

/// Standard normal draw via Box-Muller; avoids ln(0) by flipping the
/// uniform draw away from zero.
fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
