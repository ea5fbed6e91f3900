//! Loss and gradients.
//!
//! Mean softmax cross-entropy over the batch, backpropagated through the
//! recorded tape. Embedding gradients come back sparse: only rows of tokens
//! present in the batch appear, and the padding row is withheld so it stays
//! exactly zero for the life of a run.

use std::collections::BTreeMap;

use crate::data::vocab::PAD_ID;
use crate::error::{Error, Result};
use crate::nn::config::{ClassifierConfig, ModelKind};
use crate::nn::forward::Tape;
use crate::nn::params::{ClassifierParams, ConvBranch};
use crate::scalar::Scalar;

/// Gradients shaped exactly like the parameters, plus sparse embedding rows.
#[derive(Debug, Clone)]
pub struct Gradients<T> {
    pub params: ClassifierParams<T>,
    /// Row id -> d(loss)/d(row). Ids absent from the batch are absent here.
    pub embedding_rows: BTreeMap<usize, Vec<T>>,
}

/// Mean softmax cross-entropy of row-major `[B][num_classes]` logits.
/// Stable log-sum-exp; uniform logits give exactly `ln(num_classes)`.
pub fn mean_cross_entropy<T: Scalar>(
    logits: &[T],
    num_classes: usize,
    labels: &[usize],
) -> Result<T> {
    if num_classes == 0 || logits.len() != labels.len() * num_classes {
        return Err(Error::Contract(format!(
            "{} logits cannot cover {} labels of {num_classes} classes",
            logits.len(),
            labels.len()
        )));
    }
    if labels.is_empty() {
        return Err(Error::Input("empty batch".into()));
    }
    let mut total = T::zero();
    for (b, &label) in labels.iter().enumerate() {
        if label >= num_classes {
            return Err(Error::Input(format!(
                "label {label} out of range for {num_classes} classes"
            )));
        }
        let row = &logits[b * num_classes..(b + 1) * num_classes];
        let max = row.iter().fold(T::neg_infinity(), |a, &v| a.max(v));
        let sum: T = row.iter().map(|&v| (v - max).exp()).sum();
        total += max + sum.ln() - row[label];
    }
    Ok(total / T::lit(labels.len() as f64))
}

/// Loss plus gradients for one recorded forward pass.
pub fn loss_and_grad<T: Scalar>(
    params: &ClassifierParams<T>,
    cfg: &ClassifierConfig,
    tape: &Tape<T>,
    labels: &[usize],
) -> Result<(T, Gradients<T>)> {
    params.audit(cfg)?;
    let bsz = tape.batch_size();
    if labels.len() != bsz {
        return Err(Error::Input(format!(
            "{} labels for a batch of {bsz}",
            labels.len()
        )));
    }
    let classes = cfg.num_classes;
    let feat_len = cfg.feature_len();
    let loss = mean_cross_entropy(tape.logits(), classes, labels)?;

    // d loss / d logits = (softmax - onehot) / B
    let inv_b = T::one() / T::lit(bsz as f64);
    let mut dlogits = vec![T::zero(); bsz * classes];
    for b in 0..bsz {
        let row = &tape.logits[b * classes..(b + 1) * classes];
        let max = row.iter().fold(T::neg_infinity(), |a, &v| a.max(v));
        let exps: Vec<T> = row.iter().map(|&v| (v - max).exp()).collect();
        let sum: T = exps.iter().copied().sum();
        for c in 0..classes {
            let p = exps[c] / sum;
            let onehot = if c == labels[b] { T::one() } else { T::zero() };
            dlogits[b * classes + c] = (p - onehot) * inv_b;
        }
    }

    let mut grads = Gradients {
        params: ClassifierParams::zeros(cfg)?,
        embedding_rows: BTreeMap::new(),
    };

    // Fully connected layer; forward used the post-dropout features.
    let dropped_feature = |b: usize, f: usize| -> T {
        let v = tape.features[b * feat_len + f];
        if tape.drop_scale.is_empty() {
            v
        } else {
            v * tape.drop_scale[b * feat_len + f]
        }
    };
    let mut dfeat = vec![T::zero(); bsz * feat_len];
    for b in 0..bsz {
        for c in 0..classes {
            let g = dlogits[b * classes + c];
            grads.params.fc_b[c] += g;
            let wrow = &params.fc_w[c * feat_len..(c + 1) * feat_len];
            let grow = &mut grads.params.fc_w[c * feat_len..(c + 1) * feat_len];
            for f in 0..feat_len {
                grow[f] += g * dropped_feature(b, f);
                dfeat[b * feat_len + f] += g * wrow[f];
            }
        }
    }
    // Back through dropout: the same multiplier the forward applied.
    if !tape.drop_scale.is_empty() {
        for (df, &s) in dfeat.iter_mut().zip(&tape.drop_scale) {
            *df *= s;
        }
    }

    // d loss / d x, accumulated by the model-specific section below.
    let (seq, d) = (cfg.seq_len, cfg.embedding_dim);
    let mut dx = vec![T::zero(); bsz * seq * d];

    match cfg.model {
        ModelKind::TextCnn => {
            for (i, branch) in params.branches.iter().enumerate() {
                backprop_branch(
                    branch,
                    cfg,
                    tape,
                    i,
                    &dfeat,
                    &mut grads.params.branches[i],
                    &mut dx,
                )?;
            }
        }
        ModelKind::BowLinear => {
            for (b, ids) in tape.batch.iter().enumerate() {
                let count = tape.nonpad[b];
                if count == 0 {
                    continue;
                }
                let inv = T::one() / T::lit(count as f64);
                for (t, &id) in ids.iter().enumerate() {
                    if id == PAD_ID {
                        continue;
                    }
                    for e in 0..d {
                        dx[(b * seq + t) * d + e] += dfeat[b * feat_len + e] * inv;
                    }
                }
            }
        }
    }

    // Scatter dx into sparse per-row embedding gradients. The padding row
    // is withheld by design.
    for (b, ids) in tape.batch.iter().enumerate() {
        for (t, &id) in ids.iter().enumerate() {
            if id == PAD_ID {
                continue;
            }
            let row = grads
                .embedding_rows
                .entry(id)
                .or_insert_with(|| vec![T::zero(); d]);
            let src = &dx[(b * seq + t) * d..(b * seq + t + 1) * d];
            for (dst, v) in row.iter_mut().zip(src) {
                *dst += *v;
            }
        }
    }

    Ok((loss, grads))
}

fn backprop_branch<T: Scalar>(
    branch: &ConvBranch<T>,
    cfg: &ClassifierConfig,
    tape: &Tape<T>,
    branch_idx: usize,
    dfeat: &[T],
    grad: &mut ConvBranch<T>,
    dx: &mut [T],
) -> Result<()> {
    let bt = &tape.branch_tapes[branch_idx];
    let (l1, l2, l3) = (bt.shape.l1, bt.shape.l2, bt.shape.l3);
    let (c1, c2, k) = (cfg.conv1_channels, cfg.conv2_channels, branch.kernel);
    let (seq, d) = (cfg.seq_len, cfg.embedding_dim);
    let feat_len = cfg.feature_len();
    let bsz = tape.batch_size();

    // Global max + relu: route each feature gradient to its winning
    // position, gated by relu'(z2).
    let mut dz2 = vec![T::zero(); bsz * c2 * l3];
    for b in 0..bsz {
        for o in 0..c2 {
            let g = dfeat[b * feat_len + branch_idx * c2 + o];
            let idx = bt.gmax_idx[b * c2 + o];
            if bt.z2[(b * c2 + o) * l3 + idx] > T::zero() {
                dz2[(b * c2 + o) * l3 + idx] += g;
            }
        }
    }

    // conv2 backward: weight/bias gradients and gradient into the pooled map
    let mut dpooled = vec![T::zero(); bsz * c1 * l2];
    for b in 0..bsz {
        for o2 in 0..c2 {
            for p in 0..l3 {
                let g = dz2[(b * c2 + o2) * l3 + p];
                if g == T::zero() {
                    continue;
                }
                grad.b2[o2] += g;
                for o1 in 0..c1 {
                    let pooled_base = (b * c1 + o1) * l2 + p;
                    let w_base = (o2 * c1 + o1) * k;
                    for j in 0..k {
                        grad.w2[w_base + j] += g * bt.pooled[pooled_base + j];
                        dpooled[pooled_base + j] += g * branch.w2[w_base + j];
                    }
                }
            }
        }
    }

    // Unpool + relu: each pooled value came from one z1 position.
    let mut dz1 = vec![T::zero(); bsz * c1 * l1];
    for bo in 0..bsz * c1 {
        for q in 0..l2 {
            let g = dpooled[bo * l2 + q];
            if g == T::zero() {
                continue;
            }
            let idx = bt.pool_idx[bo * l2 + q];
            if bt.z1[bo * l1 + idx] > T::zero() {
                dz1[bo * l1 + idx] += g;
            }
        }
    }

    // conv1 backward: weight/bias gradients and gradient into the embedding
    for b in 0..bsz {
        for o in 0..c1 {
            for p in 0..l1 {
                let g = dz1[(b * c1 + o) * l1 + p];
                if g == T::zero() {
                    continue;
                }
                grad.b1[o] += g;
                for j in 0..k {
                    let x_base = (b * seq + p + j) * d;
                    let w_base = (o * k + j) * d;
                    for e in 0..d {
                        grad.w1[w_base + e] += g * tape.x[x_base + e];
                        dx[x_base + e] += g * branch.w1[w_base + e];
                    }
                }
            }
        }
    }
    Ok(())
}
