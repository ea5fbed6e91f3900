//! Settings for the outer retraining loop.

use std::fmt;
use std::str::FromStr;

use crate::embedding::noise::NoiseKind;
use crate::error::{Error, Result};

/// How the noise window grows when a retrain fails to improve.
///
/// Each policy decides what gets masked next from two ingredients: the fresh
/// window the frontier just advanced over, and the previously masked region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Fresh window after an improvement; widen over the previous region
    /// after a failure. The default.
    Gradual,
    /// Always the fresh window alone.
    None,
    /// Mirror image of `Gradual`: widen after improvements, reset after
    /// failures.
    Reversed,
    /// Always widen.
    Both,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::Gradual => "gradual",
            Policy::None => "none",
            Policy::Reversed => "reversed",
            Policy::Both => "both",
        }
    }

    pub const ALL: [Policy; 4] = [Policy::Gradual, Policy::None, Policy::Reversed, Policy::Both];
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gradual" => Ok(Policy::Gradual),
            "none" => Ok(Policy::None),
            "reversed" => Ok(Policy::Reversed),
            "both" => Ok(Policy::Both),
            other => Err(Error::Config(format!(
                "unknown widening policy {other:?}; expected gradual, none, reversed or both"
            ))),
        }
    }
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct MetaConfig {
    /// Window size as a fraction of the orderable vocabulary, `(0, 1]`.
    pub step_size: f64,
    /// Noise half-range (uniform) or scale (gaussian) added to masked rows.
    pub noise_range: f64,
    pub noise_kind: NoiseKind,
    pub policy: Policy,
    /// Hard cap on retraining rounds, counting the initial one.
    pub max_meta_epochs: usize,
    pub master_seed: u64,
}

impl Default for MetaConfig {
    fn default() -> Self {
        Self {
            step_size: 0.1,
            noise_range: 1.0,
            noise_kind: NoiseKind::Uniform,
            policy: Policy::Gradual,
            max_meta_epochs: 64,
            master_seed: 0,
        }
    }
}

impl MetaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size <= 1.0) {
            return Err(Error::Config(format!(
                "step size {} outside (0, 1]",
                self.step_size
            )));
        }
        if !(self.noise_range >= 0.0 && self.noise_range.is_finite()) {
            return Err(Error::Config(format!(
                "noise range {} must be finite and non-negative",
                self.noise_range
            )));
        }
        if self.max_meta_epochs == 0 {
            return Err(Error::Config("need at least one meta epoch".into()));
        }
        Ok(())
    }
}
