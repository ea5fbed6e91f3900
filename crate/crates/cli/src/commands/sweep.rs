use std::fs;
use std::io::Write as _;

use grover_core::analysis::{run_sweep, SweepAxis, SweepBase, SweepResult};
use grover_core::error::{Error, Result};
use grover_core::DefaultScalar;

use crate::args::SweepArgs;
use crate::config::{echo_toml, RunConfig};

use super::{fmt_opt4, prepare_data};

pub fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let run = args.common.resolve()?;
    sweep_over(&run, &args.sweep, args.repeats).map(|_| ())
}

/// Parses `name=v1,v2,...`, repeats the run grid, and writes sweep.json.
pub fn sweep_over(run: &RunConfig, grid: &str, repeats: usize) -> Result<Vec<SweepResult>> {
    let (axis, values) = parse_grid(grid)?;
    let prepared = prepare_data(run)?;
    let mut cfg = run.classifier.clone();
    cfg.num_classes = prepared.num_classes;
    cfg.validate()?;

    let base = SweepBase {
        cfg: &cfg,
        settings: &run.settings,
        meta: &run.meta,
        train: &prepared.train,
        val: &prepared.val,
        meta_val: None,
        test: prepared.test.as_ref(),
        vocab: &prepared.vocab,
    };
    let results = run_sweep::<DefaultScalar>(&base, axis, &values, repeats, run.seed, run.jobs)?;

    fs::create_dir_all(&run.out).map_err(|e| Error::io(&run.out, e))?;
    let config_path = run.out.join("config.toml");
    fs::write(&config_path, echo_toml(run)?).map_err(|e| Error::io(&config_path, e))?;
    let json_path = run.out.join("sweep.json");
    let mut file = fs::File::create(&json_path).map_err(|e| Error::io(&json_path, e))?;
    let body = serde_json::to_string_pretty(&results)
        .map_err(|e| Error::Contract(format!("sweep results do not serialize: {e}")))?;
    file.write_all(body.as_bytes())
        .and_then(|_| file.write_all(b"\n"))
        .map_err(|e| Error::io(&json_path, e))?;

    for r in &results {
        println!(
            "sweep {}={} runs={} mean={} stddev={} baseline={} failures={}",
            r.axis.name(),
            r.value,
            r.runs.len(),
            fmt_opt4(r.mean_final_acc),
            fmt_opt4(r.stddev_final_acc),
            fmt_opt4(r.mean_baseline_acc),
            r.failures.len()
        );
    }
    Ok(results)
}

fn parse_grid(spec: &str) -> Result<(SweepAxis, Vec<String>)> {
    let names = || {
        SweepAxis::ALL
            .iter()
            .map(|a| a.name())
            .collect::<Vec<_>>()
            .join(", ")
    };
    let Some((name, rest)) = spec.split_once('=') else {
        return Err(Error::Input(format!(
            "sweep spec {spec:?} must look like name=v1,v2,...; sweepable names: {}",
            names()
        )));
    };
    let axis: SweepAxis = name.trim().parse()?;
    let values: Vec<String> = rest
        .split(',')
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect();
    if values.is_empty() {
        return Err(Error::Input(format!(
            "sweep spec {spec:?} lists no values for {}",
            axis.name()
        )));
    }
    Ok((axis, values))
}
