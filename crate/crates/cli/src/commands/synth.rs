use std::fs;

use grover_core::data::corpus::save_corpus;
use grover_core::data::synthetic::generate_synthetic;
use grover_core::error::{Error, Result};

use crate::args::SynthArgs;

pub fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let spec = args.spec();
    let (train, test) = generate_synthetic(&spec)?;
    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    save_corpus(&args.out.join("train.csv"), &train)?;
    save_corpus(&args.out.join("test.csv"), &test)?;
    println!(
        "synth classes={} train_docs={} test_docs={} out={}",
        spec.classes,
        train.len(),
        test.len(),
        args.out.display()
    );
    Ok(())
}
