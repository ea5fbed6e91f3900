//! Trainable weights of the classifier.
//!
//! Tensors are flat row-major vectors. The same struct doubles as the
//! gradient and optimizer-moment container, so every consumer walks values
//! in one fixed order via [`ClassifierParams::values`].

use rand::distributions::{Distribution, Uniform};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nn::config::{ClassifierConfig, ModelKind};
use crate::rng::seeded_rng;
use crate::scalar::Scalar;

/// One conv branch: `w1[c1][k][d]`, `b1[c1]`, `w2[c2][c1][k]`, `b2[c2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvBranch<T> {
    pub kernel: usize,
    pub w1: Vec<T>,
    pub b1: Vec<T>,
    pub w2: Vec<T>,
    pub b2: Vec<T>,
}

/// All weights. `fc_w` is `[num_classes][feature_len]`, `fc_b` is
/// `[num_classes]`. For the bag-of-words model `branches` is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierParams<T> {
    pub branches: Vec<ConvBranch<T>>,
    pub fc_w: Vec<T>,
    pub fc_b: Vec<T>,
}

/// Name and shape of one tensor, in serialization order.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TensorSpec {
    pub name: String,
    pub shape: Vec<usize>,
}

impl TensorSpec {
    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }
}

/// Tensor layout for `cfg`, in the order [`ClassifierParams::values`] walks.
pub fn tensor_specs(cfg: &ClassifierConfig) -> Vec<TensorSpec> {
    let mut specs = Vec::new();
    if cfg.model == ModelKind::TextCnn {
        for (i, &k) in cfg.kernel_sizes.iter().enumerate() {
            let spec = |name: String, shape: Vec<usize>| TensorSpec { name, shape };
            specs.push(spec(format!("branch{i}.w1"), vec![cfg.conv1_channels, k, cfg.embedding_dim]));
            specs.push(spec(format!("branch{i}.b1"), vec![cfg.conv1_channels]));
            specs.push(spec(format!("branch{i}.w2"), vec![cfg.conv2_channels, cfg.conv1_channels, k]));
            specs.push(spec(format!("branch{i}.b2"), vec![cfg.conv2_channels]));
        }
    }
    specs.push(TensorSpec {
        name: "fc.w".into(),
        shape: vec![cfg.num_classes, cfg.feature_len()],
    });
    specs.push(TensorSpec {
        name: "fc.b".into(),
        shape: vec![cfg.num_classes],
    });
    specs
}

fn xavier_fill<T: Scalar>(dst: &mut [T], fan_in: usize, fan_out: usize, rng: &mut ChaCha8Rng) {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let dist = Uniform::new(T::lit(-limit), T::lit(limit));
    for v in dst {
        *v = dist.sample(rng);
    }
}

impl<T: Scalar> ClassifierParams<T> {
    /// Seeded uniform Xavier init, `limit = sqrt(6 / (fan_in + fan_out))`
    /// with conv fans counted over kernel x channels. Biases start at zero.
    pub fn init(cfg: &ClassifierConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let mut rng = seeded_rng(seed);
        let mut params = Self::zeros(cfg)?;
        for branch in &mut params.branches {
            let k = branch.kernel;
            xavier_fill(&mut branch.w1, k * cfg.embedding_dim, k * cfg.conv1_channels, &mut rng);
            xavier_fill(&mut branch.w2, k * cfg.conv1_channels, k * cfg.conv2_channels, &mut rng);
        }
        xavier_fill(&mut params.fc_w, cfg.feature_len(), cfg.num_classes, &mut rng);
        Ok(params)
    }

    /// All-zero tensors of the right shapes; gradient and moment container.
    pub fn zeros(cfg: &ClassifierConfig) -> Result<Self> {
        cfg.validate()?;
        let branches = match cfg.model {
            ModelKind::BowLinear => Vec::new(),
            ModelKind::TextCnn => cfg
                .kernel_sizes
                .iter()
                .map(|&k| ConvBranch {
                    kernel: k,
                    w1: vec![T::zero(); cfg.conv1_channels * k * cfg.embedding_dim],
                    b1: vec![T::zero(); cfg.conv1_channels],
                    w2: vec![T::zero(); cfg.conv2_channels * cfg.conv1_channels * k],
                    b2: vec![T::zero(); cfg.conv2_channels],
                })
                .collect(),
        };
        Ok(ClassifierParams {
            branches,
            fc_w: vec![T::zero(); cfg.num_classes * cfg.feature_len()],
            fc_b: vec![T::zero(); cfg.num_classes],
        })
    }

    /// Checks every tensor against the shape `cfg` demands.
    pub fn audit(&self, cfg: &ClassifierConfig) -> Result<()> {
        cfg.validate()?;
        let expect_branches = match cfg.model {
            ModelKind::TextCnn => cfg.kernel_sizes.len(),
            ModelKind::BowLinear => 0,
        };
        if self.branches.len() != expect_branches {
            return Err(Error::Contract(format!(
                "{} conv branches, config demands {expect_branches}",
                self.branches.len()
            )));
        }
        for (i, branch) in self.branches.iter().enumerate() {
            let k = cfg.kernel_sizes[i];
            let checks = [
                ("kernel", branch.kernel, k),
                ("w1", branch.w1.len(), cfg.conv1_channels * k * cfg.embedding_dim),
                ("b1", branch.b1.len(), cfg.conv1_channels),
                ("w2", branch.w2.len(), cfg.conv2_channels * cfg.conv1_channels * k),
                ("b2", branch.b2.len(), cfg.conv2_channels),
            ];
            for (name, got, want) in checks {
                if got != want {
                    return Err(Error::Contract(format!(
                        "branch {i} {name}: {got}, config demands {want}"
                    )));
                }
            }
        }
        if self.fc_w.len() != cfg.num_classes * cfg.feature_len() {
            return Err(Error::Contract(format!(
                "fc weights {} long, config demands {}",
                self.fc_w.len(),
                cfg.num_classes * cfg.feature_len()
            )));
        }
        if self.fc_b.len() != cfg.num_classes {
            return Err(Error::Contract(format!(
                "fc bias {} long, config demands {}",
                self.fc_b.len(),
                cfg.num_classes
            )));
        }
        Ok(())
    }

    /// Values in fixed serialization order (branches, then fc).
    pub fn values(&self) -> impl Iterator<Item = &T> {
        self.branches
            .iter()
            .flat_map(|b| {
                b.w1.iter()
                    .chain(b.b1.iter())
                    .chain(b.w2.iter())
                    .chain(b.b2.iter())
            })
            .chain(self.fc_w.iter())
            .chain(self.fc_b.iter())
    }

    pub fn values_mut(&mut self) -> impl Iterator<Item = &mut T> {
        self.branches
            .iter_mut()
            .flat_map(|b| {
                b.w1.iter_mut()
                    .chain(b.b1.iter_mut())
                    .chain(b.w2.iter_mut())
                    .chain(b.b2.iter_mut())
            })
            .chain(self.fc_w.iter_mut())
            .chain(self.fc_b.iter_mut())
    }

    pub fn flat_len(&self) -> usize {
        self.values().count()
    }

    pub fn to_flat(&self) -> Vec<T> {
        self.values().copied().collect()
    }

    /// Rebuilds from a flat value vector laid out like [`Self::values`].
    pub fn from_flat(cfg: &ClassifierConfig, flat: &[T]) -> Result<Self> {
        let mut params = Self::zeros(cfg)?;
        let expected = params.flat_len();
        if flat.len() != expected {
            return Err(Error::Contract(format!(
                "{} values cannot fill parameters of size {expected}",
                flat.len()
            )));
        }
        for (dst, src) in params.values_mut().zip(flat) {
            *dst = *src;
        }
        Ok(params)
    }

    pub fn all_finite(&self) -> bool {
        self.values().all(|v| v.is_finite())
    }
}
