//! Classifier architecture description.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Parallel conv branches over the embedded sequence, one per kernel
    /// size: conv (c1 channels) -> relu -> width-2 max pool -> conv
    /// (c2 channels) -> relu -> global max. Branch outputs concatenate into
    /// the feature vector for a single fully connected layer.
    TextCnn,
    /// Mean of the non-padding embeddings straight into the fully connected
    /// layer. A fast diagnostic model, not the reference architecture.
    BowLinear,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::TextCnn => "textcnn",
            ModelKind::BowLinear => "bow_linear",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "textcnn" => Ok(ModelKind::TextCnn),
            "bow_linear" => Ok(ModelKind::BowLinear),
            other => Err(Error::Config(format!(
                "unknown model {other:?} (expected textcnn or bow_linear)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub model: ModelKind,
    pub embedding_dim: usize,
    /// Inputs are truncated or padded to exactly this many tokens.
    pub seq_len: usize,
    pub kernel_sizes: Vec<usize>,
    pub conv1_channels: usize,
    pub conv2_channels: usize,
    pub num_classes: usize,
    /// Dropout on the feature vector before the fully connected layer,
    /// training mode only.
    pub dropout_p: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            model: ModelKind::TextCnn,
            embedding_dim: 300,
            seq_len: 100,
            kernel_sizes: vec![2, 3, 4, 5],
            conv1_channels: 32,
            conv2_channels: 16,
            num_classes: 2,
            dropout_p: 0.0,
        }
    }
}

/// Per-branch sequence lengths after each stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchShape {
    pub kernel: usize,
    /// After the first convolution: seq_len - kernel + 1.
    pub l1: usize,
    /// After width-2 stride-2 max pooling; a trailing odd element is dropped.
    pub l2: usize,
    /// After the second convolution: l2 - kernel + 1.
    pub l3: usize,
}

impl ClassifierConfig {
    pub fn branch_shape(&self, kernel: usize) -> Result<BranchShape> {
        if kernel == 0 {
            return Err(Error::Config("kernel size 0".into()));
        }
        if self.seq_len < kernel {
            return Err(Error::Config(format!(
                "kernel {kernel} wider than sequence length {}",
                self.seq_len
            )));
        }
        let l1 = self.seq_len - kernel + 1;
        let l2 = l1 / 2;
        if l2 == 0 {
            return Err(Error::Config(format!(
                "kernel {kernel} leaves nothing to pool at sequence length {}",
                self.seq_len
            )));
        }
        if l2 < kernel {
            return Err(Error::Config(format!(
                "kernel {kernel} wider than pooled length {l2} at sequence length {}",
                self.seq_len
            )));
        }
        Ok(BranchShape {
            kernel,
            l1,
            l2,
            l3: l2 - kernel + 1,
        })
    }

    /// Length of the feature vector entering the fully connected layer.
    pub fn feature_len(&self) -> usize {
        match self.model {
            ModelKind::TextCnn => self.kernel_sizes.len() * self.conv2_channels,
            ModelKind::BowLinear => self.embedding_dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.embedding_dim == 0 {
            return Err(Error::Config("embedding dim must be positive".into()));
        }
        if self.seq_len == 0 {
            return Err(Error::Config("sequence length must be positive".into()));
        }
        if self.num_classes < 2 {
            return Err(Error::Config(format!(
                "need at least 2 classes, got {}",
                self.num_classes
            )));
        }
        if !(0.0..1.0).contains(&self.dropout_p) {
            return Err(Error::Config(format!(
                "dropout must be in [0, 1), got {}",
                self.dropout_p
            )));
        }
        if self.model == ModelKind::TextCnn {
            if self.kernel_sizes.is_empty() {
                return Err(Error::Config("textcnn needs at least one kernel size".into()));
            }
            if self.conv1_channels == 0 || self.conv2_channels == 0 {
                return Err(Error::Config("conv channel counts must be positive".into()));
            }
            for &k in &self.kernel_sizes {
                self.branch_shape(k)?;
            }
        }
        Ok(())
    }
}
