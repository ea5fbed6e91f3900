use std::process::ExitCode;

use clap::Parser;

use grover_cli::args::Cli;

fn main() -> ExitCode {
    // The runtime ignores SIGPIPE, which turns `grover ... | head` into a
    // panic mid-report. Restore the default so a closed pipe ends the
    // process quietly, as pipeline consumers expect.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }

    let cli = Cli::parse();
    match grover_cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
