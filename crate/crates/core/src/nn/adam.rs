//! Adam with bias correction and sparse embedding updates.
//!
//! Embedding rows absent from a step's gradient keep their values AND their
//! moment estimates untouched, so a word that sat out a batch is bit-for-bit
//! unchanged afterwards. The padding row is rejected outright.

use crate::data::vocab::PAD_ID;
use crate::embedding::table::EmbeddingTable;
use crate::error::{Error, Result};
use crate::nn::backward::Gradients;
use crate::nn::config::ClassifierConfig;
use crate::nn::params::ClassifierParams;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct AdamHyper {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamHyper {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl AdamHyper {
    pub fn with_lr(lr: f64) -> Self {
        Self {
            lr,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.lr > 0.0
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.eps > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("unusable optimizer settings {self:?}")))
        }
    }
}

/// First/second moment estimates for every trainable tensor.
#[derive(Debug, Clone)]
pub struct AdamState<T> {
    pub hyper: AdamHyper,
    /// Completed steps; bias correction uses the post-increment count.
    pub t: u64,
    m: ClassifierParams<T>,
    v: ClassifierParams<T>,
    emb_m: Vec<T>,
    emb_v: Vec<T>,
    emb_dim: usize,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(
        cfg: &ClassifierConfig,
        emb_rows: usize,
        emb_dim: usize,
        hyper: AdamHyper,
    ) -> Result<Self> {
        hyper.validate()?;
        Ok(Self {
            hyper,
            t: 0,
            m: ClassifierParams::zeros(cfg)?,
            v: ClassifierParams::zeros(cfg)?,
            emb_m: vec![T::zero(); emb_rows * emb_dim],
            emb_v: vec![T::zero(); emb_rows * emb_dim],
            emb_dim,
        })
    }
}

/// One optimizer step. Gradients must be finite; parameters must stay finite.
pub fn adam_step<T: Scalar>(
    params: &mut ClassifierParams<T>,
    emb: &mut EmbeddingTable<T>,
    grads: &Gradients<T>,
    state: &mut AdamState<T>,
) -> Result<()> {
    if emb.rows() * emb.dim() != state.emb_m.len() || emb.dim() != state.emb_dim {
        return Err(Error::Contract(
            "optimizer state sized for a different embedding table".into(),
        ));
    }
    state.t += 1;
    let h = state.hyper;
    let (b1, b2) = (T::lit(h.beta1), T::lit(h.beta2));
    let (lr, eps) = (T::lit(h.lr), T::lit(h.eps));
    let bc1 = T::lit(1.0 - h.beta1.powi(state.t as i32));
    let bc2 = T::lit(1.0 - h.beta2.powi(state.t as i32));
    let one = T::one();

    let update = |p: &mut T, g: T, m: &mut T, v: &mut T| -> Result<()> {
        if !g.is_finite() {
            return Err(Error::Diverged(format!(
                "non-finite gradient at step {}",
                state.t
            )));
        }
        *m = b1 * *m + (one - b1) * g;
        *v = b2 * *v + (one - b2) * g * g;
        *p -= lr * (*m / bc1) / ((*v / bc2).sqrt() + eps);
        if !p.is_finite() {
            return Err(Error::Diverged(format!(
                "parameter left the reals at step {}",
                state.t
            )));
        }
        Ok(())
    };

    {
        let mut g_it = grads.params.values();
        let mut m_it = state.m.values_mut();
        let mut v_it = state.v.values_mut();
        for p in params.values_mut() {
            let (g, m, v) = (
                *g_it.next().ok_or_else(shape_drift)?,
                m_it.next().ok_or_else(shape_drift)?,
                v_it.next().ok_or_else(shape_drift)?,
            );
            update(p, g, m, v)?;
        }
        if g_it.next().is_some() || m_it.next().is_some() || v_it.next().is_some() {
            return Err(shape_drift());
        }
    }

    let dim = state.emb_dim;
    for (&id, grow) in &grads.embedding_rows {
        if id == PAD_ID {
            return Err(Error::Contract("gradient aimed at the padding row".into()));
        }
        if id >= emb.rows() || grow.len() != dim {
            return Err(Error::Contract(format!(
                "embedding gradient for row {id} does not fit the table"
            )));
        }
        let row = emb.row_mut(id);
        let ms = &mut state.emb_m[id * dim..(id + 1) * dim];
        let vs = &mut state.emb_v[id * dim..(id + 1) * dim];
        for e in 0..dim {
            update(&mut row[e], grow[e], &mut ms[e], &mut vs[e])?;
        }
    }
    Ok(())
}

fn shape_drift() -> Error {
    Error::Contract("gradient and optimizer state disagree on parameter count".into())
}
