//! Hyperparameter sweeps: one axis, several values, several seeds each.

use std::fmt;
use std::str::FromStr;

use crate::data::dataset::{Dataset, TrainCorpus};
use crate::data::vocab::Vocabulary;
use crate::embedding::table::EmbeddingTable;
use crate::error::{Error, Result};
use crate::meta::record::MetaEpochRecord;
use crate::meta::runner::{run_meta_training, MetaInputs};
use crate::meta::MetaConfig;
use crate::nn::ClassifierConfig;
use crate::rng::{derive_seed, Stream};
use crate::scalar::Scalar;
use crate::train::TrainSettings;

/// The hyperparameters a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    StepSize,
    NoiseRange,
    Policy,
    Dropout,
    WordDrop,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 5] = [
        SweepAxis::StepSize,
        SweepAxis::NoiseRange,
        SweepAxis::Policy,
        SweepAxis::Dropout,
        SweepAxis::WordDrop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::StepSize => "step_size",
            SweepAxis::NoiseRange => "noise_range",
            SweepAxis::Policy => "policy",
            SweepAxis::Dropout => "dropout",
            SweepAxis::WordDrop => "word_drop",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepAxis::ALL
            .into_iter()
            .find(|axis| axis.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = SweepAxis::ALL.iter().map(|a| a.name()).collect();
                Error::Input(format!(
                    "{s:?} is not sweepable; choose one of {}",
                    names.join(", ")
                ))
            })
    }
}

fn apply_axis(
    axis: SweepAxis,
    raw: &str,
    cfg: &mut ClassifierConfig,
    settings: &mut TrainSettings,
    meta: &mut MetaConfig,
) -> Result<()> {
    let number = || -> Result<f64> {
        raw.parse()
            .map_err(|_| Error::Input(format!("{raw:?} is not a number for axis {axis}")))
    };
    match axis {
        SweepAxis::StepSize => meta.step_size = number()?,
        SweepAxis::NoiseRange => meta.noise_range = number()?,
        SweepAxis::Policy => meta.policy = raw.parse()?,
        SweepAxis::Dropout => cfg.dropout_p = number()?,
        SweepAxis::WordDrop => settings.word_drop = number()?,
    }
    Ok(())
}

/// Everything a sweep holds fixed.
#[derive(Clone, Copy)]
pub struct SweepBase<'a> {
    pub cfg: &'a ClassifierConfig,
    pub settings: &'a TrainSettings,
    /// Template for every run; its master seed is overridden per run.
    pub meta: &'a MetaConfig,
    pub train: &'a TrainCorpus,
    pub val: &'a Dataset,
    pub meta_val: Option<&'a Dataset>,
    pub test: Option<&'a Dataset>,
    pub vocab: &'a Vocabulary,
}

/// One finished run inside a sweep.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RunStat {
    pub repeat: usize,
    pub master_seed: u64,
    /// Accuracy of the round-zero model, trained without any masking.
    pub baseline_acc: f64,
    /// Accuracy of the winning round.
    pub final_acc: f64,
    pub rounds: usize,
    pub accepted_rounds: usize,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SweepFailure {
    pub repeat: usize,
    pub message: String,
}

/// Aggregate over the seeds of one grid value.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub value: String,
    pub runs: Vec<RunStat>,
    pub failures: Vec<SweepFailure>,
    /// Mean/population-stddev of `final_acc`; absent when every run failed.
    pub mean_final_acc: Option<f64>,
    pub stddev_final_acc: Option<f64>,
    pub mean_baseline_acc: Option<f64>,
}

fn mean_stddev(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn one_run<T: Scalar>(
    base: &SweepBase<'_>,
    axis: SweepAxis,
    raw: &str,
    run_master: u64,
    repeat: usize,
) -> Result<RunStat> {
    let mut cfg = base.cfg.clone();
    let mut settings = base.settings.clone();
    let mut meta = base.meta.clone();
    apply_axis(axis, raw, &mut cfg, &mut settings, &mut meta)?;
    meta.master_seed = run_master;

    let emb_seed = derive_seed(run_master, Stream::EmbeddingInit, 0);
    let initial = EmbeddingTable::<T>::init_random(base.vocab, cfg.embedding_dim, emb_seed)?;
    let inputs = MetaInputs {
        cfg: &cfg,
        settings: &settings,
        train: base.train,
        val: base.val,
        meta_val: base.meta_val,
        test: base.test,
        vocab: base.vocab,
    };
    let out = run_meta_training::<T>(&inputs, &meta, initial)?;
    let score = |r: &MetaEpochRecord| r.test_acc.unwrap_or(r.val_acc);
    Ok(RunStat {
        repeat,
        master_seed: run_master,
        baseline_acc: score(&out.records[0]),
        final_acc: score(&out.records[out.best_meta_epoch]),
        rounds: out.records.len(),
        accepted_rounds: out.records.iter().filter(|r| r.accepted).count(),
    })
}

/// Run `repeats` seeded meta-trainings per value of `axis` and aggregate.
/// Run seeds derive from `master_seed` and the (value, repeat) position, so
/// the whole sweep is a pure function of its arguments; `jobs > 1` fans the
/// runs out over that many threads without changing any result. Failures
/// are recorded in place of their run and the sweep continues.
pub fn run_sweep<T: Scalar>(
    base: &SweepBase<'_>,
    axis: SweepAxis,
    values: &[String],
    repeats: usize,
    master_seed: u64,
    jobs: usize,
) -> Result<Vec<SweepResult>> {
    if values.is_empty() {
        return Err(Error::Input("sweep over an empty value grid".into()));
    }
    if repeats == 0 {
        return Err(Error::Input("sweep needs at least one seed per value".into()));
    }

    let tasks: Vec<(usize, usize)> = (0..values.len())
        .flat_map(|g| (0..repeats).map(move |r| (g, r)))
        .collect();
    let run_task = |&(g, r): &(usize, usize)| -> (usize, usize, Result<RunStat>) {
        let run_master = derive_seed(master_seed, Stream::SweepRun, (g * repeats + r) as u64);
        (g, r, one_run::<T>(base, axis, &values[g], run_master, r))
    };

    let finished: Vec<(usize, usize, Result<RunStat>)> = if jobs > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Config(format!("thread pool of {jobs} jobs: {e}")))?;
        pool.install(|| tasks.par_iter().map(run_task).collect())
    } else {
        tasks.iter().map(run_task).collect()
    };

    let mut results: Vec<SweepResult> = values
        .iter()
        .map(|v| SweepResult {
            axis,
            value: v.clone(),
            runs: Vec::new(),
            failures: Vec::new(),
            mean_final_acc: None,
            stddev_final_acc: None,
            mean_baseline_acc: None,
        })
        .collect();
    for (g, r, outcome) in finished {
        match outcome {
            Ok(stat) => results[g].runs.push(stat),
            Err(e) => results[g].failures.push(SweepFailure {
                repeat: r,
                message: e.to_string(),
            }),
        }
    }
    for res in &mut results {
        if !res.runs.is_empty() {
            let finals: Vec<f64> = res.runs.iter().map(|s| s.final_acc).collect();
            let (mean, stddev) = mean_stddev(&finals);
            res.mean_final_acc = Some(mean);
            res.stddev_final_acc = Some(stddev);
            let bases: Vec<f64> = res.runs.iter().map(|s| s.baseline_acc).collect();
            res.mean_baseline_acc = Some(mean_stddev(&bases).0);
        }
    }
    Ok(results)
}
