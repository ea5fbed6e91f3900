//! Acceptance gates. Each test pins one numbered criterion of the build
//! contract at its stated tolerance and prints a single PASS/FAIL line
//! (visible with --nocapture, or in the failure output).
//!
//! 1. finite-difference gradient audit, 64-bit, rel err < 1e-4, under 1 min
//! 2. meta-loop trace conformance under scripted outcomes, zero tolerance
//! 3. rollback and noise bit-exactness under forced failures, under 10 s
//! 4. synthetic-corpus direction: meta-training beats its own first round
//!    on average over 5 seeds, under 10 min
//! 5. excessive noise (range 10) does no better than range 1
//! 6. checkpoint/ledger consistency, zero tolerance
//! 7. same seed, same bytes: run reports and curve files
//! 8. analysis oracles: neighbor scan, frequency order, file round-trip

use std::fs;
use std::path::PathBuf;
use std::process::Command;
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use rand::Rng;

use grover_core::analysis::{nearest_neighbors, run_sweep, RunStat, SweepAxis, SweepBase};
use grover_core::data::synthetic::SyntheticSpec;
use grover_core::data::vocab::{Vocabulary, FIRST_WORD_ID, OOV_TOKEN, PAD_TOKEN};
use grover_core::data::{Dataset, TrainCorpus};
use grover_core::embedding::noise::{apply_maskers, NoiseKind};
use grover_core::embedding::order::FrequencyOrder;
use grover_core::embedding::table::EmbeddingTable;
use grover_core::error::Result;
use grover_core::meta::{
    load_checkpoint, run_meta_training, run_meta_training_with, save_checkpoint, Checkpoint,
    InnerContext, InnerOutcome, InnerTrainer, MetaConfig, Policy,
};
use grover_core::meta::{MetaInputs, MetaOutcome};
use grover_core::nn::{
    check_gradients, nudge_biases, ClassifierConfig, ClassifierParams, ModelKind,
};
use grover_core::rng::{stream_rng, Stream};
use grover_core::train::TrainSettings;

use grover_cli::commands::prepare_data;
use grover_cli::config::{DataSource, EmbeddingSource, RunConfig};

fn verdict(criterion: usize, ok: bool, detail: &str) {
    println!("criterion {criterion} {}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {criterion} FAIL: {detail}");
}

// ---------------------------------------------------------------- 1

#[test]
fn criterion_1_gradient_suite() {
    const TOL: f64 = 1e-4;
    const H: f64 = 1e-3;
    let start = Instant::now();
    let mut rng = stream_rng(42, Stream::Synthetic, 1);

    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    let mut entries = 0usize;
    let mut configs = 0usize;
    for case in 0..6 {
        let model = if case < 4 { ModelKind::TextCnn } else { ModelKind::BowLinear };
        let dim = rng.gen_range(3..=6);
        let cfg = ClassifierConfig {
            model,
            embedding_dim: dim,
            seq_len: rng.gen_range(10..=12),
            kernel_sizes: if case % 2 == 0 { vec![2, 3] } else { vec![2] },
            conv1_channels: rng.gen_range(2..=4),
            conv2_channels: rng.gen_range(2..=3),
            num_classes: rng.gen_range(2..=4),
            dropout_p: 0.0,
        };
        cfg.validate().unwrap();

        let n_words = rng.gen_range(10..=16);
        let text: Vec<String> = (0..n_words).map(|i| format!("v{i}")).collect();
        let vocab = Vocabulary::build(&[text]).unwrap();
        let emb = EmbeddingTable::<f64>::init_random(&vocab, dim, 100 + case as u64).unwrap();
        let mut params = ClassifierParams::<f64>::init(&cfg, 200 + case as u64).unwrap();
        nudge_biases(&mut params, 0.05);

        let batch: Vec<Vec<usize>> = (0..3)
            .map(|_| (0..cfg.seq_len).map(|_| rng.gen_range(0..vocab.len())).collect())
            .collect();
        let labels: Vec<usize> =
            (0..batch.len()).map(|_| rng.gen_range(0..cfg.num_classes)).collect();

        let report = check_gradients(&params, &emb, &cfg, &batch, &labels, H).unwrap();
        entries += report.checked;
        configs += 1;
        if report.max_rel_err > worst {
            worst = report.max_rel_err;
            worst_at = format!("{} ({:?})", report.worst, model);
        }
    }
    let elapsed = start.elapsed();

    let ok = worst < TOL && elapsed < Duration::from_secs(60);
    verdict(
        1,
        ok,
        &format!(
            "gradient audit over {configs} randomized configs, {entries} entries, 64-bit \
             central differences h={H:.0e}: max rel err {worst:.3e} at {worst_at} \
             (tolerance {TOL:.0e}), {:.2}s (budget 60s)",
            elapsed.as_secs_f64()
        ),
    );
}

// ---------------------------------------------------------------- 2 & 3

/// Returns a scripted accuracy per round, ignoring the data entirely.
struct Scripted {
    accs: Vec<f64>,
}

impl InnerTrainer<f32> for Scripted {
    fn run(&mut self, ctx: InnerContext<'_, f32>) -> Result<InnerOutcome<f32>> {
        let acc = self.accs[ctx.meta_epoch];
        Ok(InnerOutcome {
            params: ClassifierParams::zeros(ctx.inputs.cfg)?,
            embeddings: ctx.embeddings,
            inner_best_val_acc: acc,
            inner_best_epoch: 0,
            epochs_run: 1,
            meta_val_acc: acc,
            test_acc: None,
            diverged: false,
        })
    }
}

/// Minimal real inputs for scripted runs over `n` orderable words.
struct StubWorld {
    cfg: ClassifierConfig,
    settings: TrainSettings,
    train: TrainCorpus,
    val: Dataset,
    vocab: Vocabulary,
}

impl StubWorld {
    fn new(n: usize) -> Self {
        let tokens: Vec<String> = (0..n).map(|i| format!("w{i:03}")).collect();
        let vocab = Vocabulary::build(&[tokens.clone()]).unwrap();
        let cfg = ClassifierConfig {
            model: ModelKind::BowLinear,
            embedding_dim: 2,
            seq_len: 4,
            kernel_sizes: vec![],
            conv1_channels: 0,
            conv2_channels: 0,
            num_classes: 2,
            dropout_p: 0.0,
        };
        cfg.validate().unwrap();
        let train = TrainCorpus::encode(&[tokens.clone()], vec![0], &vocab, 2).unwrap();
        let val = Dataset::encode(&[tokens], vec![0], &vocab, 4, 2).unwrap();
        StubWorld { cfg, settings: TrainSettings::default(), train, val, vocab }
    }

    fn inputs(&self) -> MetaInputs<'_> {
        MetaInputs {
            cfg: &self.cfg,
            settings: &self.settings,
            train: &self.train,
            val: &self.val,
            meta_val: None,
            test: None,
            vocab: &self.vocab,
        }
    }

    fn run_scripted(&self, meta: &MetaConfig, accs: &[f64]) -> MetaOutcome<f32> {
        let initial =
            EmbeddingTable::<f32>::init_random(&self.vocab, self.cfg.embedding_dim, 5).unwrap();
        let mut trainer = Scripted { accs: accs.to_vec() };
        run_meta_training_with(&mut trainer, &self.inputs(), meta, initial).unwrap()
    }
}

fn meta_cfg(step: f64, range: f64, policy: Policy, master: u64) -> MetaConfig {
    MetaConfig {
        step_size: step,
        noise_range: range,
        noise_kind: NoiseKind::Uniform,
        policy,
        max_meta_epochs: 64,
        master_seed: master,
    }
}

/// Accept flags implied by a score sequence: strict running-max improvements.
fn running_max_flags(accs: &[f64]) -> Vec<bool> {
    let mut max = f64::NEG_INFINITY;
    accs.iter()
        .map(|&a| {
            let up = a > max;
            if up {
                max = a;
            }
            up
        })
        .collect()
}

/// Independent model of the masking schedule: fresh or widened contiguous
/// windows over `n` positions, one advance per round, driven by the
/// previous round's acceptance.
fn expected_windows(n: usize, step: f64, policy: Policy, accepted: &[bool]) -> Vec<(usize, usize)> {
    let w = (step * n as f64).ceil() as usize;
    let mut rounds = vec![(0usize, 0usize)];
    let mut frontier = 0usize;
    let mut prev = (0usize, 0usize);
    while frontier < n {
        let window = (frontier, (frontier + w).min(n));
        frontier = window.1;
        let improved = accepted[rounds.len() - 1];
        let widen = match policy {
            Policy::Gradual => !improved,
            Policy::Reversed => improved,
            Policy::None => false,
            Policy::Both => true,
        };
        let cur = if widen { (prev.0.min(window.0), window.1) } else { window };
        rounds.push(cur);
        prev = cur;
    }
    rounds
}

fn observed_windows(outcome: &MetaOutcome<f32>) -> Vec<(usize, usize)> {
    outcome.records.iter().map(|r| (r.mask_start, r.mask_end)).collect()
}

#[test]
fn criterion_2_trace_conformance() {
    let n = 100;
    let world = StubWorld::new(n);
    assert_eq!(FrequencyOrder::new(&world.vocab).len(), n);

    let improving: Vec<f64> = (0..32).map(|i| 0.10 + 0.02 * i as f64).collect();
    let failing: Vec<f64> =
        std::iter::once(0.9).chain((0..32).map(|i| 0.8 - 0.01 * i as f64)).collect();
    let alternating: Vec<f64> = (0..32)
        .map(|i| if i % 2 == 0 { 0.5 + 0.05 * i as f64 } else { 0.1 + 0.01 * i as f64 })
        .collect();
    let scripts: [(&str, &Vec<f64>); 3] =
        [("improving", &improving), ("failing", &failing), ("alternating", &alternating)];

    let mut cases = 0;
    for &step in &[0.05f64, 0.1, 0.2, 0.5, 1.0] {
        let want_total = 1 + (1.0 / step).ceil() as usize;
        for policy in Policy::ALL {
            for (script_name, accs) in scripts {
                let outcome = world.run_scripted(&meta_cfg(step, 1.0, policy, 7), accs);
                let got = observed_windows(&outcome);
                let flags = running_max_flags(&accs[..got.len()]);
                let want = expected_windows(n, step, policy, &flags);

                assert_eq!(
                    got.len(),
                    want_total,
                    "round count for step {step} {policy} {script_name}"
                );
                assert_eq!(got, want, "windows for step {step} {policy} {script_name}");
                let got_flags: Vec<bool> =
                    outcome.records.iter().map(|r| r.accepted).collect();
                assert_eq!(got_flags, flags, "adoption for step {step} {policy} {script_name}");
                for (r, &(s, e)) in outcome.records.iter().zip(&want) {
                    assert_eq!(r.masked_words, e - s, "mask size at round {}", r.meta_epoch);
                }
                cases += 1;
            }
        }
    }

    // worked example, frozen by hand: improve, improve, fail, fail, improve
    let accs = [0.50, 0.60, 0.55, 0.58, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95, 0.99];
    let outcome = world.run_scripted(&meta_cfg(0.1, 1.0, Policy::Gradual, 7), &accs);
    let want = vec![
        (0, 0),
        (0, 10),
        (10, 20),
        (10, 30),
        (10, 40),
        (40, 50),
        (50, 60),
        (60, 70),
        (70, 80),
        (80, 90),
        (90, 100),
    ];
    assert_eq!(observed_windows(&outcome), want, "worked example windows");
    let want_flags =
        vec![true, true, false, false, true, true, true, true, true, true, true];
    let got_flags: Vec<bool> = outcome.records.iter().map(|r| r.accepted).collect();
    assert_eq!(got_flags, want_flags, "worked example adoption");

    // policy equivalences: all-improving collapses gradual to none, and
    // all-failing collapses gradual to both
    for &step in &[0.1, 0.2] {
        let a = world.run_scripted(&meta_cfg(step, 1.0, Policy::Gradual, 7), &improving);
        let b = world.run_scripted(&meta_cfg(step, 1.0, Policy::None, 7), &improving);
        assert_eq!(observed_windows(&a), observed_windows(&b), "improving: gradual == none");
        let a = world.run_scripted(&meta_cfg(step, 1.0, Policy::Gradual, 7), &failing);
        let b = world.run_scripted(&meta_cfg(step, 1.0, Policy::Both, 7), &failing);
        assert_eq!(observed_windows(&a), observed_windows(&b), "failing: gradual == both");
    }

    verdict(
        2,
        true,
        &format!(
            "trace conformance, zero tolerance: {cases} scripted runs over 5 step sizes x 4 \
             policies x 3 outcome scripts matched the reference schedule exactly \
             (round counts 1 + ceil(1/s), windows, mask sizes, adoption flags), \
             plus the frozen worked example and both policy equivalences"
        ),
    );
}

/// Clones every table it is handed, then returns a uniformly shifted copy
/// standing in for fine-tuning.
struct Shifting {
    accs: Vec<f64>,
    bump: f32,
    seen: Vec<EmbeddingTable<f32>>,
}

impl InnerTrainer<f32> for Shifting {
    fn run(&mut self, ctx: InnerContext<'_, f32>) -> Result<InnerOutcome<f32>> {
        self.seen.push(ctx.embeddings.clone());
        let mut emb = ctx.embeddings;
        for row in 0..emb.rows() {
            for v in emb.row_mut(row) {
                *v += self.bump;
            }
        }
        let acc = self.accs[ctx.meta_epoch];
        Ok(InnerOutcome {
            params: ClassifierParams::zeros(ctx.inputs.cfg)?,
            embeddings: emb,
            inner_best_val_acc: acc,
            inner_best_epoch: 0,
            epochs_run: 1,
            meta_val_acc: acc,
            test_acc: None,
            diverged: false,
        })
    }
}

fn bits(t: &EmbeddingTable<f32>) -> Vec<u32> {
    t.values().iter().map(|v| v.to_bits()).collect()
}

fn shifted(t: &EmbeddingTable<f32>, bump: f32) -> EmbeddingTable<f32> {
    let mut out = t.clone();
    for row in 0..out.rows() {
        for v in out.row_mut(row) {
            *v += bump;
        }
    }
    out
}

#[test]
fn criterion_3_rollback_and_noise_exactness() {
    let start = Instant::now();
    let n = 40;
    let range = 0.75;
    let bump = 1.5f32;
    let world = StubWorld::new(n);
    let order = FrequencyOrder::new(&world.vocab);
    let master = 23;

    // two adoption patterns: everything after round 0 fails, and round 1
    // is adopted before everything later fails
    let patterns: [Vec<f64>; 2] = [
        std::iter::once(0.9).chain((0..8).map(|i| 0.5 - 0.05 * i as f64)).collect(),
        [0.5, 0.9].iter().copied().chain((0..8).map(|i| 0.4 - 0.05 * i as f64)).collect(),
    ];

    let mut checked_rows = 0usize;
    for accs in &patterns {
        let initial =
            EmbeddingTable::<f32>::init_random(&world.vocab, world.cfg.embedding_dim, 5).unwrap();
        let run = |accs: &[f64]| {
            let mut tr = Shifting { accs: accs.to_vec(), bump, seen: Vec::new() };
            let out = run_meta_training_with(
                &mut tr,
                &world.inputs(),
                &meta_cfg(0.25, range, Policy::Gradual, master),
                initial.clone(),
            )
            .unwrap();
            (tr.seen, out)
        };
        let (seen, outcome) = run(accs);
        assert_eq!(seen.len(), 5, "5 rounds at step 0.25 over 40 words");

        let last_accepted = running_max_flags(&accs[..seen.len()])
            .iter()
            .rposition(|&f| f)
            .unwrap();
        // the carried table is the accepted round's output, bump included
        let accepted = shifted(&seen[last_accepted], bump);
        assert_eq!(bits(&outcome.carried), bits(&accepted), "carried == last accepted");
        assert_eq!(outcome.best_meta_epoch, last_accepted);

        for (k, record) in outcome.records.iter().enumerate().skip(last_accepted + 1) {
            let masked: std::collections::BTreeSet<usize> =
                order.window(record.mask_start, record.mask_end).iter().copied().collect();

            // route 1: bit-identity outside the mask, bounded noise inside
            for id in 0..world.vocab.len() {
                let got = seen[k].row(id);
                let want = accepted.row(id);
                if masked.contains(&id) {
                    for (g, w) in got.iter().zip(want) {
                        let delta = (*g as f64 - *w as f64).abs();
                        assert!(
                            delta <= range + 1e-5,
                            "round {k} word {id}: |delta| {delta} exceeds the noise range {range}"
                        );
                    }
                } else {
                    let same = got.iter().zip(want).all(|(g, w)| g.to_bits() == w.to_bits());
                    assert!(same, "round {k} word {id} drifted outside the mask");
                }
                checked_rows += 1;
            }

            // route 2: the whole table equals an independently derived
            // noising of the accepted table, bit for bit
            let expect = apply_maskers(
                &accepted,
                &masked,
                range,
                NoiseKind::Uniform,
                &mut stream_rng(master, Stream::MaskNoise, k as u64),
            )
            .unwrap();
            assert_eq!(bits(&seen[k]), bits(&expect), "round {k} noise derivation");
        }

        // same seeds, same bytes, run to run
        let (seen2, _) = run(accs);
        for (k, (a, b)) in seen.iter().zip(&seen2).enumerate() {
            assert_eq!(bits(a), bits(b), "round {k} differs between identical runs");
        }
    }

    let elapsed = start.elapsed();
    let ok = elapsed < Duration::from_secs(10);
    verdict(
        3,
        ok,
        &format!(
            "rollback/noise exactness, zero tolerance on carried bits: 2 adoption patterns, \
             {checked_rows} row comparisons, masked deltas within ±{range}, noise re-derived \
             bit-exactly, rerun identical; {:.2}s (budget 10s)",
            elapsed.as_secs_f64()
        ),
    );
}

// ---------------------------------------------------------------- 4 & 5

struct DirectionFixture {
    noise_1: Vec<RunStat>,
    noise_10: Vec<RunStat>,
    sizes: (usize, usize, usize),
    elapsed: Duration,
}

static DIRECTION: OnceLock<DirectionFixture> = OnceLock::new();

/// Shared by criteria 4 and 5: one 2-value noise sweep, 5 seeded runs each,
/// on the frozen 4-class corpus.
fn direction_runs() -> &'static DirectionFixture {
    DIRECTION.get_or_init(|| {
        let start = Instant::now();
        let spec = SyntheticSpec {
            classes: 4,
            vocab_size: 500,
            docs_per_class: 600,
            test_docs_per_class: 100,
            signal: 0.12,
            keywords_per_class: 5,
            doc_len: (20, 50),
            zipf_exponent: 1.1,
            seed: 0,
        };
        let run = RunConfig {
            data: DataSource::Synthetic(spec),
            embeddings: EmbeddingSource::Random,
            classifier: ClassifierConfig {
                model: ModelKind::TextCnn,
                embedding_dim: 24,
                seq_len: 32,
                kernel_sizes: vec![2, 3, 4],
                conv1_channels: 16,
                conv2_channels: 8,
                num_classes: 2,
                dropout_p: 0.0,
            },
            settings: TrainSettings {
                max_epochs: 8,
                patience: 2,
                batch_size: 64,
                word_drop: 0.0,
                ..TrainSettings::default()
            },
            meta: meta_cfg(0.1, 1.0, Policy::Gradual, 1000),
            seed: 1000,
            val_fraction: 1.0 / 6.0,
            out: std::env::temp_dir().join("direction-fixture-unused"),
            jobs: 1,
        };
        let prep = prepare_data(&run).unwrap();
        let sizes = (
            prep.train.docs.len(),
            prep.val.len(),
            prep.test.as_ref().map(|t| t.len()).unwrap_or(0),
        );
        let mut cfg = run.classifier.clone();
        cfg.num_classes = prep.num_classes;
        cfg.validate().unwrap();

        let base = SweepBase {
            cfg: &cfg,
            settings: &run.settings,
            meta: &run.meta,
            train: &prep.train,
            val: &prep.val,
            meta_val: None,
            test: prep.test.as_ref(),
            vocab: &prep.vocab,
        };
        let results = run_sweep::<f32>(
            &base,
            SweepAxis::NoiseRange,
            &["1.0".into(), "10.0".into()],
            5,
            run.seed,
            run.jobs,
        )
        .unwrap();
        assert!(results.iter().all(|r| r.failures.is_empty()), "no run may fail");
        let mut it = results.into_iter();
        let noise_1 = it.next().unwrap().runs;
        let noise_10 = it.next().unwrap().runs;
        DirectionFixture { noise_1, noise_10, sizes, elapsed: start.elapsed() }
    })
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

#[test]
fn criterion_4_synthetic_direction() {
    let fix = direction_runs();
    assert_eq!(fix.sizes, (2000, 400, 400), "train/val/test split sizes");
    assert_eq!(fix.noise_1.len(), 5, "five seeded runs");

    let base = mean(fix.noise_1.iter().map(|r| r.baseline_acc));
    let fin = mean(fix.noise_1.iter().map(|r| r.final_acc));
    let delta = mean(fix.noise_1.iter().map(|r| r.final_acc - r.baseline_acc));
    let not_worse = fin >= base - 0.005;
    let improves = delta > 0.0;
    let in_budget = fix.elapsed < Duration::from_secs(600);

    verdict(
        4,
        not_worse && improves && in_budget,
        &format!(
            "synthetic direction over 5 seeds (4 classes, 2000/400/400, step 0.1, noise 1.0, \
             gradual): mean test acc {:.2}% vs first-round {:.2}% (must be >= {:.2}%), \
             mean delta {:+.2}pts (must be positive), fixture took {:.0}s (budget 600s, \
             shared with criterion 5)",
            100.0 * fin,
            100.0 * base,
            100.0 * (base - 0.5 / 100.0),
            100.0 * delta,
            fix.elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_5_excessive_noise_degrades() {
    let fix = direction_runs();
    assert_eq!(fix.noise_10.len(), 5, "five seeded runs");
    let low = mean(fix.noise_1.iter().map(|r| r.final_acc));
    let high = mean(fix.noise_10.iter().map(|r| r.final_acc));
    verdict(
        5,
        high <= low,
        &format!(
            "excessive noise on the same corpus and seeds: range 10 mean test acc {:.2}% \
             must not exceed range 1.0 mean {:.2}%",
            100.0 * high,
            100.0 * low
        ),
    );
}

// ---------------------------------------------------------------- 6

#[test]
fn criterion_6_checkpoint_and_ledger_consistency() {
    let run = RunConfig {
        data: DataSource::Synthetic(SyntheticSpec {
            classes: 2,
            vocab_size: 80,
            docs_per_class: 60,
            test_docs_per_class: 15,
            signal: 0.3,
            doc_len: (8, 16),
            seed: 3,
            ..SyntheticSpec::default()
        }),
        embeddings: EmbeddingSource::Random,
        classifier: ClassifierConfig {
            model: ModelKind::TextCnn,
            embedding_dim: 10,
            seq_len: 16,
            kernel_sizes: vec![2, 3],
            conv1_channels: 6,
            conv2_channels: 4,
            num_classes: 2,
            dropout_p: 0.0,
        },
        settings: TrainSettings {
            max_epochs: 4,
            patience: 2,
            batch_size: 16,
            word_drop: 0.0,
            ..TrainSettings::default()
        },
        meta: meta_cfg(0.34, 1.0, Policy::Gradual, 17),
        seed: 17,
        val_fraction: 0.2,
        out: std::env::temp_dir().join("ledger-fixture-unused"),
        jobs: 1,
    };
    let prep = prepare_data(&run).unwrap();
    let mut cfg = run.classifier.clone();
    cfg.num_classes = prep.num_classes;
    let inputs = MetaInputs {
        cfg: &cfg,
        settings: &run.settings,
        train: &prep.train,
        val: &prep.val,
        meta_val: None,
        test: prep.test.as_ref(),
        vocab: &prep.vocab,
    };
    let initial =
        EmbeddingTable::<f32>::init_random(&prep.vocab, cfg.embedding_dim, 17).unwrap();
    let outcome = run_meta_training(&inputs, &run.meta, initial).unwrap();

    let accs: Vec<f64> = outcome.records.iter().map(|r| r.val_acc).collect();
    let max = accs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let winner = &outcome.records[outcome.best_meta_epoch];
    let max_matches = winner.val_acc == max;
    let first_argmax = accs.iter().position(|&a| a == max) == Some(outcome.best_meta_epoch);
    let flags: Vec<bool> = outcome.records.iter().map(|r| r.accepted).collect();
    let flags_match = flags == running_max_flags(&accs);

    // the persisted checkpoint records the same winner
    let dir = tempfile::tempdir().unwrap();
    save_checkpoint(
        dir.path(),
        &Checkpoint {
            classifier: &cfg,
            settings: &run.settings,
            meta: &run.meta,
            record: winner,
            params: &outcome.best_params,
            embeddings: &outcome.best_embeddings,
            vocab: &prep.vocab,
        },
    )
    .unwrap();
    let loaded = load_checkpoint::<f32>(dir.path()).unwrap();
    let persisted_matches = loaded.manifest.record.val_acc == max
        && loaded.manifest.record.meta_epoch == outcome.best_meta_epoch;

    verdict(
        6,
        max_matches && first_argmax && flags_match && persisted_matches,
        &format!(
            "ledger consistency, zero tolerance, over {} real rounds: checkpoint accuracy \
             {:.4} equals max of the record list, winner is the first round attaining it, \
             adoption flags equal the strict running-max pattern, and the reloaded manifest \
             agrees",
            accs.len(),
            max
        ),
    );
}

// ---------------------------------------------------------------- 7

#[test]
fn criterion_7_byte_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let train = |out: &PathBuf| {
        let status = Command::new(env!("CARGO_BIN_EXE_grover"))
            .args([
                "train",
                "--synthetic",
                "--classes", "2",
                "--vocab-size", "60",
                "--docs-per-class", "40",
                "--test-docs-per-class", "10",
                "--signal", "0.35",
                "--doc-len-min", "8",
                "--doc-len-max", "14",
                "--synth-seed", "6",
                "--model", "textcnn",
                "--embedding-dim", "8",
                "--seq-len", "12",
                "--kernel-sizes", "2,3",
                "--conv1-channels", "4",
                "--conv2-channels", "3",
                "--epochs", "3",
                "--patience", "1",
                "--batch-size", "16",
                "--step-size", "0.5",
                "--seed", "31",
                "--out", out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success(), "training run failed");
    };
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    train(&a);
    train(&b);

    let records_a = fs::read(a.join("records.jsonl")).unwrap();
    let records_b = fs::read(b.join("records.jsonl")).unwrap();
    let curves_a = fs::read(a.join("curves.csv")).unwrap();
    let curves_b = fs::read(b.join("curves.csv")).unwrap();
    let ok = records_a == records_b && curves_a == curves_b;
    verdict(
        7,
        ok,
        &format!(
            "two identically seeded training processes wrote byte-identical run reports \
             ({} bytes) and curve files ({} bytes)",
            records_a.len(),
            curves_a.len()
        ),
    );
}

// ---------------------------------------------------------------- 8

#[test]
fn criterion_8_analysis_oracles() {
    let mut rng = stream_rng(4242, Stream::Synthetic, 8);
    let dir = tempfile::tempdir().unwrap();
    let mut neighbor_checks = 0usize;

    for t in 0..100u32 {
        let words: usize = rng.gen_range(5..=30);
        let dim: usize = rng.gen_range(2..=8);
        let mut rows = vec![(PAD_TOKEN.to_string(), 0u64), (OOV_TOKEN.to_string(), 0u64)];
        for i in 0..words {
            rows.push((format!("t{i}"), rng.gen_range(1..=40u64)));
        }
        let vocab = Vocabulary::from_rows(rows).unwrap();

        // frequency order against a plain reference sort
        let order = FrequencyOrder::new(&vocab);
        let mut reference: Vec<usize> = (FIRST_WORD_ID..vocab.len()).collect();
        reference.sort_by_key(|&id| (vocab.frequencies()[id], id));
        assert_eq!(order.ids(), &reference[..], "frequency order, table {t}");

        let data: Vec<f32> =
            (0..vocab.len() * dim).map(|_| rng.gen_range(-2.0f32..2.0)).collect();
        let table =
            EmbeddingTable::from_parts(Arc::new(vocab.tokens().to_vec()), dim, data).unwrap();

        // text format round-trip, value-exact
        let path = dir.path().join(format!("t{t}.vec"));
        table.save(&path).unwrap();
        let loaded = EmbeddingTable::<f32>::load(&path).unwrap();
        assert_eq!(bits(&table), bits(&loaded), "round-trip values, table {t}");
        assert_eq!(table.tokens(), loaded.tokens(), "round-trip tokens, table {t}");

        // top-k neighbors against an exhaustive brute-force scan
        let cue_id = rng.gen_range(FIRST_WORD_ID..vocab.len());
        let cue = vocab.tokens()[cue_id].clone();
        let k = rng.gen_range(1..=(words - 1).min(10));
        let report = nearest_neighbors(&table, &vocab, &cue, k).unwrap();

        let mut brute: Vec<(usize, f64)> = (FIRST_WORD_ID..vocab.len())
            .filter(|&id| id != cue_id)
            .map(|id| {
                let (mut dot, mut nu, mut nv) = (0.0f64, 0.0f64, 0.0f64);
                for (a, b) in table.row(cue_id).iter().zip(table.row(id)) {
                    dot += *a as f64 * *b as f64;
                    nu += *a as f64 * *a as f64;
                    nv += *b as f64 * *b as f64;
                }
                (id, dot / (nu.sqrt() * nv.sqrt()))
            })
            .collect();
        brute.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        brute.truncate(k);

        assert_eq!(report.neighbors.len(), k, "table {t}");
        for ((token, sim), (want_id, want_sim)) in report.neighbors.iter().zip(&brute) {
            assert_eq!(token, &vocab.tokens()[*want_id], "neighbor order, table {t}");
            assert!(
                (sim - want_sim).abs() < 1e-9,
                "similarity mismatch on table {t}: {sim} vs {want_sim}"
            );
            neighbor_checks += 1;
        }
    }

    verdict(
        8,
        true,
        &format!(
            "analysis oracles over 100 random tables: frequency order equals a reference \
             sort, word-vector files round-trip value-exact, and {neighbor_checks} \
             neighbor rows match an exhaustive scan within 1e-9"
        ),
    );
}
