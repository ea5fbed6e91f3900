//! Command-line front end for the meta-training framework: argument
//! parsing, flat config files with flag precedence, and the train, sweep,
//! analyze, and synth subcommands.

pub mod args;
pub mod commands;
pub mod config;

use grover_core::error::Result;

use args::{Cli, Command};

pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Train(a) => commands::train::cmd_train(a),
        Command::Sweep(a) => commands::sweep::cmd_sweep(a),
        Command::Analyze(a) => commands::analyze::cmd_analyze(a),
        Command::Synth(a) => commands::synth::cmd_synth(a),
    }
}
