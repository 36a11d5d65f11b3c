//! Argument parsing and dispatch for the `samtrace` executable.

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand};

use crate::commands::{self, AnalyzeArgs, CompareArgs, FitArgs, GenerateArgs, PredictArgs, SimulateArgs};
use crate::error::{Error, Result};

/// Video traffic modeling with the SAM seasonal ARIMA model, and a downlink
/// scheduler simulator. Tables go to standard output; artifacts are written
/// only to the files named by flags. Failures print a JSON error object to
/// standard error and exit nonzero.
#[derive(Debug, Parser)]
#[command(name = "samtrace", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a SAM model to a trace.
    Fit(FitArgs),
    /// Generate a synthetic trace from a model.
    Generate(GenerateArgs),
    /// Forecast a trace with a model and score SAM against an AR baseline.
    Predict(PredictArgs),
    /// Run a scheduler scenario under EDF, DRR and EDF_DRR.
    Simulate(SimulateArgs),
    /// Feature vectors, PCA and k-means over a directory of traces.
    Analyze(AnalyzeArgs),
    /// Compare a synthetic trace against a real one.
    Compare(CompareArgs),
}

/// Runs one command and returns the table destined for stdout.
pub fn execute(command: &Command) -> Result<String> {
    Ok(match command {
        Command::Fit(a) => commands::fit(a)?.1,
        Command::Generate(a) => commands::generate_cmd(a)?.1,
        Command::Predict(a) => commands::predict(a)?.1,
        Command::Simulate(a) => commands::simulate_cmd(a)?.1,
        Command::Analyze(a) => commands::analyze(a)?.1,
        Command::Compare(a) => commands::compare_cmd(a)?.1,
    })
}

/// Parses `argv`, runs the command and reports. Returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let message = e.render().to_string();
            let first = message
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ")
                .to_string();
            return report(&Error::Usage(first));
        }
    };
    match execute(&cli.command) {
        Ok(table) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(table.as_bytes());
            0
        }
        Err(e) => report(&e),
    }
}

fn report(e: &Error) -> i32 {
    eprintln!("{}", e.to_json());
    e.exit_code()
}
