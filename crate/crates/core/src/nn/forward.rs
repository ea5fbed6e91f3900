//! Forward pass. Records everything the backward pass reuses.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::data::vocab::PAD_ID;
use crate::embedding::table::EmbeddingTable;
use crate::error::{Error, Result};
use crate::nn::config::{BranchShape, ClassifierConfig, ModelKind};
use crate::nn::params::{ClassifierParams, ConvBranch};
use crate::scalar::Scalar;

/// Intermediate activations of one conv branch.
#[derive(Debug, Clone)]
pub(crate) struct BranchTape<T> {
    pub(crate) shape: BranchShape,
    /// Pre-relu conv1 output, `[B][c1][l1]`.
    pub(crate) z1: Vec<T>,
    /// Relu + width-2 max pool of `z1`, `[B][c1][l2]`; conv2's input.
    pub(crate) pooled: Vec<T>,
    /// For each pooled value, the `l1` position it came from.
    pub(crate) pool_idx: Vec<usize>,
    /// Pre-relu conv2 output, `[B][c2][l3]`.
    pub(crate) z2: Vec<T>,
    /// Position of the global max of `relu(z2)` per `[B][c2]`.
    pub(crate) gmax_idx: Vec<usize>,
}

/// Activation record of one forward call.
#[derive(Debug, Clone)]
pub struct Tape<T> {
    pub(crate) batch: Vec<Vec<usize>>,
    /// Embedded input, `[B][seq_len][dim]`.
    pub(crate) x: Vec<T>,
    pub(crate) branch_tapes: Vec<BranchTape<T>>,
    /// Non-padding token count per example; bag-of-words model only.
    pub(crate) nonpad: Vec<usize>,
    /// Feature vector before dropout, `[B][F]`.
    pub(crate) features: Vec<T>,
    /// Per-feature dropout multiplier (`0` or `1/(1-p)`); empty when
    /// dropout was inactive.
    pub(crate) drop_scale: Vec<T>,
    pub(crate) logits: Vec<T>,
}

impl<T: Scalar> Tape<T> {
    pub fn batch_size(&self) -> usize {
        self.batch.len()
    }

    /// Row-major `[B][num_classes]`.
    pub fn logits(&self) -> &[T] {
        &self.logits
    }
}

fn validate_batch<T: Scalar>(
    params: &ClassifierParams<T>,
    emb: &EmbeddingTable<T>,
    cfg: &ClassifierConfig,
    batch: &[Vec<usize>],
) -> Result<()> {
    params.audit(cfg)?;
    if emb.dim() != cfg.embedding_dim {
        return Err(Error::Config(format!(
            "embedding table dim {} but config demands {}",
            emb.dim(),
            cfg.embedding_dim
        )));
    }
    if batch.is_empty() {
        return Err(Error::Input("empty batch".into()));
    }
    for seq in batch {
        if seq.len() != cfg.seq_len {
            return Err(Error::Input(format!(
                "sequence of length {} in a batch of fixed length {}",
                seq.len(),
                cfg.seq_len
            )));
        }
        if let Some(&id) = seq.iter().find(|&&id| id >= emb.rows()) {
            return Err(Error::Input(format!(
                "token id {id} outside embedding table of {} rows",
                emb.rows()
            )));
        }
    }
    Ok(())
}

/// Training-mode forward; dropout (when configured) draws from `rng`.
pub fn forward<T: Scalar>(
    params: &ClassifierParams<T>,
    emb: &EmbeddingTable<T>,
    cfg: &ClassifierConfig,
    batch: &[Vec<usize>],
    rng: &mut ChaCha8Rng,
) -> Result<Tape<T>> {
    forward_impl(params, emb, cfg, batch, Some(rng))
}

/// Evaluation-mode forward; dropout is inactive and nothing is random.
pub fn forward_eval<T: Scalar>(
    params: &ClassifierParams<T>,
    emb: &EmbeddingTable<T>,
    cfg: &ClassifierConfig,
    batch: &[Vec<usize>],
) -> Result<Tape<T>> {
    forward_impl(params, emb, cfg, batch, None)
}

fn forward_impl<T: Scalar>(
    params: &ClassifierParams<T>,
    emb: &EmbeddingTable<T>,
    cfg: &ClassifierConfig,
    batch: &[Vec<usize>],
    dropout_rng: Option<&mut ChaCha8Rng>,
) -> Result<Tape<T>> {
    validate_batch(params, emb, cfg, batch)?;
    let bsz = batch.len();
    let (seq, d) = (cfg.seq_len, cfg.embedding_dim);

    // Embed: x[b][t][e]
    let mut x = vec![T::zero(); bsz * seq * d];
    for (b, ids) in batch.iter().enumerate() {
        for (t, &id) in ids.iter().enumerate() {
            x[(b * seq + t) * d..(b * seq + t + 1) * d].copy_from_slice(emb.row(id));
        }
    }

    let feat_len = cfg.feature_len();
    let mut features = vec![T::zero(); bsz * feat_len];
    let mut branch_tapes = Vec::new();
    let mut nonpad = Vec::new();

    match cfg.model {
        ModelKind::TextCnn => {
            for (i, branch) in params.branches.iter().enumerate() {
                let tape = run_branch(branch, cfg, &x, bsz)?;
                let c2 = cfg.conv2_channels;
                for b in 0..bsz {
                    for o in 0..c2 {
                        let l3 = tape.shape.l3;
                        let z = tape.z2[(b * c2 + o) * l3 + tape.gmax_idx[b * c2 + o]];
                        features[b * feat_len + i * c2 + o] = z.max(T::zero());
                    }
                }
                branch_tapes.push(tape);
            }
        }
        ModelKind::BowLinear => {
            for (b, ids) in batch.iter().enumerate() {
                let count = ids.iter().filter(|&&id| id != PAD_ID).count();
                nonpad.push(count);
                if count == 0 {
                    continue;
                }
                let inv = T::one() / T::lit(count as f64);
                for (t, &id) in ids.iter().enumerate() {
                    if id == PAD_ID {
                        continue;
                    }
                    for e in 0..d {
                        features[b * feat_len + e] += x[(b * seq + t) * d + e] * inv;
                    }
                }
            }
        }
    }

    // Inverted dropout: kept features scale by 1/(1-p) so evaluation needs
    // no rescaling.
    let mut drop_scale = Vec::new();
    let dropped: Vec<T> = match dropout_rng {
        Some(rng) if cfg.dropout_p > 0.0 => {
            let keep_scale = T::one() / T::lit(1.0 - cfg.dropout_p);
            drop_scale = (0..bsz * feat_len)
                .map(|_| {
                    if rng.gen::<f64>() < cfg.dropout_p {
                        T::zero()
                    } else {
                        keep_scale
                    }
                })
                .collect();
            features
                .iter()
                .zip(&drop_scale)
                .map(|(&f, &s)| f * s)
                .collect()
        }
        _ => features.clone(),
    };

    // Fully connected: logits[b][c]
    let classes = cfg.num_classes;
    let mut logits = vec![T::zero(); bsz * classes];
    for b in 0..bsz {
        for c in 0..classes {
            let mut acc = params.fc_b[c];
            let w = &params.fc_w[c * feat_len..(c + 1) * feat_len];
            let f = &dropped[b * feat_len..(b + 1) * feat_len];
            for (wv, fv) in w.iter().zip(f) {
                acc += *wv * *fv;
            }
            logits[b * classes + c] = acc;
        }
    }

    Ok(Tape {
        batch: batch.to_vec(),
        x,
        branch_tapes,
        nonpad,
        features,
        drop_scale,
        logits,
    })
}

fn run_branch<T: Scalar>(
    branch: &ConvBranch<T>,
    cfg: &ClassifierConfig,
    x: &[T],
    bsz: usize,
) -> Result<BranchTape<T>> {
    let shape = cfg.branch_shape(branch.kernel)?;
    let (seq, d) = (cfg.seq_len, cfg.embedding_dim);
    let (c1, c2, k) = (cfg.conv1_channels, cfg.conv2_channels, branch.kernel);
    let BranchShape { l1, l2, l3, .. } = shape;

    // conv1: z1[b][o][p] = b1[o] + sum_{j,e} x[b][p+j][e] * w1[o][j][e]
    let mut z1 = vec![T::zero(); bsz * c1 * l1];
    for b in 0..bsz {
        for o in 0..c1 {
            let w = &branch.w1[o * k * d..(o + 1) * k * d];
            for p in 0..l1 {
                let mut acc = branch.b1[o];
                for j in 0..k {
                    let xr = &x[(b * seq + p + j) * d..(b * seq + p + j + 1) * d];
                    let wr = &w[j * d..(j + 1) * d];
                    for (xv, wv) in xr.iter().zip(wr) {
                        acc += *xv * *wv;
                    }
                }
                z1[(b * c1 + o) * l1 + p] = acc;
            }
        }
    }

    // relu + width-2 stride-2 max pool, remembering the winning position
    let mut pooled = vec![T::zero(); bsz * c1 * l2];
    let mut pool_idx = vec![0usize; bsz * c1 * l2];
    for bo in 0..bsz * c1 {
        for q in 0..l2 {
            let left = z1[bo * l1 + 2 * q].max(T::zero());
            let right = z1[bo * l1 + 2 * q + 1].max(T::zero());
            // ties keep the left element
            let (v, idx) = if right > left {
                (right, 2 * q + 1)
            } else {
                (left, 2 * q)
            };
            pooled[bo * l2 + q] = v;
            pool_idx[bo * l2 + q] = idx;
        }
    }

    // conv2: z2[b][o2][p] = b2[o2] + sum_{o1,j} pooled[b][o1][p+j] * w2[o2][o1][j]
    let mut z2 = vec![T::zero(); bsz * c2 * l3];
    for b in 0..bsz {
        for o2 in 0..c2 {
            for p in 0..l3 {
                let mut acc = branch.b2[o2];
                for o1 in 0..c1 {
                    let base = (b * c1 + o1) * l2 + p;
                    let wr = &branch.w2[(o2 * c1 + o1) * k..(o2 * c1 + o1 + 1) * k];
                    for j in 0..k {
                        acc += pooled[base + j] * wr[j];
                    }
                }
                z2[(b * c2 + o2) * l3 + p] = acc;
            }
        }
    }

    // global max over relu(z2); on an all-zero plateau the first position
    // wins and (correctly) routes no gradient
    let mut gmax_idx = vec![0usize; bsz * c2];
    for bo in 0..bsz * c2 {
        let row = &z2[bo * l3..(bo + 1) * l3];
        let mut best = 0usize;
        for (p, v) in row.iter().enumerate() {
            if v.max(T::zero()) > row[best].max(T::zero()) {
                best = p;
            }
        }
        gmax_idx[bo] = best;
    }

    Ok(BranchTape {
        shape,
        z1,
        pooled,
        pool_idx,
        z2,
        gmax_idx,
    })
}

/// Class predictions in evaluation mode; argmax ties go to the lowest id.
pub fn predict<T: Scalar>(
    params: &ClassifierParams<T>,
    emb: &EmbeddingTable<T>,
    cfg: &ClassifierConfig,
    batch: &[Vec<usize>],
) -> Result<Vec<usize>> {
    let tape = forward_eval(params, emb, cfg, batch)?;
    let classes = cfg.num_classes;
    Ok((0..batch.len())
        .map(|b| {
            let row = &tape.logits[b * classes..(b + 1) * classes];
            let mut best = 0usize;
            for (c, v) in row.iter().enumerate() {
                if *v > row[best] {
                    best = c;
                }
            }
            best
        })
        .collect())
}
