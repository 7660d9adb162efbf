//! `slid-bench`: command-line driver for the spoken language identification
//! benchmark pipeline.
//!
//! Every subcommand resolves one [`Settings`] value (defaults, then the
//! config file, then `--set` overrides, then `--seed`) before doing any work,
//! and maps each error class onto a fixed exit code.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use slid_core::settings::Settings;
use slid_core::Error;

mod commands;
mod data;

/// Exit codes shared by all subcommands.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const DATA: i32 = 2;
    pub const NUMERIC: i32 = 3;
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Usage(_) | Error::Resource(_) => exit::USAGE,
        Error::Data(_) | Error::Io { .. } => exit::DATA,
        Error::Numeric(_) | Error::Degenerate(_) => exit::NUMERIC,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "slid-bench",
    version,
    about = "Spoken language identification benchmark toolkit"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Settings file applied before `--set` overrides.
    #[arg(long, global = true, env = "SLID_BENCH_CONFIG", value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Setting override; repeatable, applied in order.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Seed for every random choice; overrides `seed` from the settings.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for `featurize`.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
    /// Suppress progress and report output.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract MFCC feature files from WAV audio and rewrite the manifest.
    Featurize(commands::featurize::FeaturizeArgs),
    /// Build speaker-disjoint valid/test splits and the training selection.
    Prepare(commands::prepare::PrepareArgs),
    /// Train the baseline, optionally tuning conv dropout over a grid.
    Train(commands::train::TrainArgs),
    /// Predict languages for one split with a trained checkpoint.
    Predict(commands::predict::PredictArgs),
    /// Score predictions against a manifest split.
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Significance tests between two systems and correlation of F1 tables.
    Compare(commands::compare::CompareArgs),
    /// Print the language registry.
    Registry,
}

impl GlobalOpts {
    pub fn settings(&self) -> slid_core::Result<Settings> {
        let mut s = Settings::default();
        if let Some(path) = &self.config {
            s.apply_text(&slid_core::fsutil::read_to_string(path)?)
                .map_err(|e| match e {
                    Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
                    other => other,
                })?;
        }
        s.apply_overrides(&self.set)?;
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        s.resolve()
    }

    pub fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }
}

pub fn execute(cli: &Cli) -> slid_core::Result<()> {
    let settings = cli.global.settings()?;
    let g = &cli.global;
    match &cli.command {
        Command::Featurize(a) => commands::featurize::run(g, &settings, a),
        Command::Prepare(a) => commands::prepare::run(g, &settings, a),
        Command::Train(a) => commands::train::run(g, &settings, a),
        Command::Predict(a) => commands::predict::run(g, &settings, a),
        Command::Evaluate(a) => commands::evaluate::run(g, &settings, a),
        Command::Compare(a) => commands::compare::run(g, &settings, a),
        Command::Registry => {
            print!("{}", commands::registry_tsv());
            Ok(())
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            };
        }
    };
    match execute(&cli) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("slid-bench: {e}");
            exit_code(&e)
        }
    }
}
