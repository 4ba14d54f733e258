mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{expand_config, Cli, Command};

const EXIT_ERROR: u8 = 1;

fn run(cli: &Cli) -> anyhow::Result<u8> {
    match &cli.command {
        Command::Simulate(a) => commands::simulate_cmd(a),
        Command::Threshold(a) => commands::threshold_cmd(a),
        Command::Adversarial(a) => commands::adversarial_cmd(a),
        Command::Order(a) => commands::order_cmd(a),
        Command::Sweep(a) => commands::sweep_cmd(a),
        Command::Reproduce(a) => commands::reproduce_cmd(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let argv = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    // Usage errors exit with 1 so that 2 stays reserved for refused steps.
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let refused = matches!(e.downcast_ref(), Some(phasestep::Error::SolverRefused { .. }));
            ExitCode::from(if refused { commands::EXIT_REFUSED } else { EXIT_ERROR })
        }
    }
}
