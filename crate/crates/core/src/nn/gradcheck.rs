//! Finite-difference verification of the analytic gradients.
//!
//! Central differences around the eval-mode loss, compared entry by entry
//! against the backward pass with a floored relative error. Lives in the
//! library (not just the tests) so any caller can re-verify a configuration.

use crate::data::vocab::PAD_ID;
use crate::embedding::table::EmbeddingTable;
use crate::error::Result;
use crate::nn::backward::{loss_and_grad, mean_cross_entropy};
use crate::nn::config::ClassifierConfig;
use crate::nn::forward::forward_eval;
use crate::nn::params::{tensor_specs, ClassifierParams};
use crate::scalar::Scalar;

/// Central-difference step.
pub const DEFAULT_STEP: f64 = 1e-3;
/// Denominator floor; keeps near-zero pairs from exploding the ratio.
pub const REL_ERR_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    /// Entries compared: every parameter plus every touched embedding cell.
    pub checked: usize,
    pub max_rel_err: f64,
    /// Which entry produced `max_rel_err`.
    pub worst: String,
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / (a.abs().max(b.abs()).max(REL_ERR_FLOOR))
}

/// Move every bias to a fixed nonzero value well clear of `DEFAULT_STEP`.
///
/// Freshly initialized biases are zero, and a conv window that covers only
/// padding (whose embedding row is also zero) then lands its pre-activation
/// exactly on the relu boundary. Central differences straddle that kink and
/// disagree with the (valid) subgradient, so checks probe a nudged point.
pub fn nudge_biases<T: Scalar>(params: &mut ClassifierParams<T>, base: f64) {
    let mut i = 0usize;
    let mut fill = |bias: &mut [T]| {
        for v in bias {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            *v = T::lit(sign * base * (1.0 + (i % 5) as f64 * 0.3));
            i += 1;
        }
    };
    for branch in &mut params.branches {
        fill(&mut branch.b1);
        fill(&mut branch.b2);
    }
    fill(&mut params.fc_b);
}

fn loss_of<T: Scalar>(
    params: &ClassifierParams<T>,
    emb: &EmbeddingTable<T>,
    cfg: &ClassifierConfig,
    batch: &[Vec<usize>],
    labels: &[usize],
) -> Result<T> {
    let tape = forward_eval(params, emb, cfg, batch)?;
    mean_cross_entropy(tape.logits(), cfg.num_classes, labels)
}

/// Compare analytic gradients with central differences of step `h`.
///
/// Checks every parameter and every embedding cell of every distinct
/// non-padding token in the batch. The padding row is skipped because it is
/// frozen by construction and receives no gradient.
pub fn check_gradients<T: Scalar>(
    params: &ClassifierParams<T>,
    emb: &EmbeddingTable<T>,
    cfg: &ClassifierConfig,
    batch: &[Vec<usize>],
    labels: &[usize],
    h: f64,
) -> Result<GradCheckReport> {
    let tape = forward_eval(params, emb, cfg, batch)?;
    let (_, grads) = loss_and_grad(params, cfg, &tape, labels)?;
    let analytic = grads.params.to_flat();
    let hh = T::lit(h);
    let two_h = T::lit(2.0 * h);

    let mut report = GradCheckReport {
        checked: 0,
        max_rel_err: 0.0,
        worst: String::from("nothing checked"),
    };
    let record = |err: f64, name: String, report: &mut GradCheckReport| {
        report.checked += 1;
        if err > report.max_rel_err {
            report.max_rel_err = err;
            report.worst = name;
        }
    };

    let specs = tensor_specs(cfg);
    let name_of = |flat_idx: usize| -> String {
        let mut base = 0usize;
        for spec in &specs {
            let numel: usize = spec.shape.iter().product();
            if flat_idx < base + numel {
                return format!("{}[{}]", spec.name, flat_idx - base);
            }
            base += numel;
        }
        format!("param[{flat_idx}]")
    };

    let mut flat = params.to_flat();
    for i in 0..flat.len() {
        let orig = flat[i];
        flat[i] = orig + hh;
        let lp = loss_of(&ClassifierParams::from_flat(cfg, &flat)?, emb, cfg, batch, labels)?;
        flat[i] = orig - hh;
        let lm = loss_of(&ClassifierParams::from_flat(cfg, &flat)?, emb, cfg, batch, labels)?;
        flat[i] = orig;
        let fd = ((lp - lm) / two_h).to_f64_lossy();
        record(
            rel_err(fd, analytic[i].to_f64_lossy()),
            name_of(i),
            &mut report,
        );
    }

    let mut ids: Vec<usize> = batch.iter().flatten().copied().collect();
    ids.sort_unstable();
    ids.dedup();
    let mut table = emb.clone();
    for id in ids.into_iter().filter(|&id| id != PAD_ID) {
        for e in 0..table.dim() {
            let orig = table.row(id)[e];
            table.row_mut(id)[e] = orig + hh;
            let lp = loss_of(params, &table, cfg, batch, labels)?;
            table.row_mut(id)[e] = orig - hh;
            let lm = loss_of(params, &table, cfg, batch, labels)?;
            table.row_mut(id)[e] = orig;
            let fd = ((lp - lm) / two_h).to_f64_lossy();
            let a = grads
                .embedding_rows
                .get(&id)
                .map_or(0.0, |row| row[e].to_f64_lossy());
            record(rel_err(fd, a), format!("embedding[row={id}][{e}]"), &mut report);
        }
    }
    Ok(report)
}
