//! Argument handling and command dispatch.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use underlay_core::validation::run_validation;

use crate::config::Config;
use crate::error::CliError;
use crate::figures::{self, FigureId};
use crate::output::write_table;
use crate::sweep;

#[derive(Debug, Parser)]
#[command(name = "underlay", version, about = "Underlay cognitive radio with estimated channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Scenario file (TOML). Built-in reference scenario when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output file. Standard output when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Override a config entry, e.g. `scenario.gamma_db=3`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,

    /// Overrides `mc.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Overrides `mc.trials` and `mc.figure_trials`.
    #[arg(long, global = true)]
    pub trials: Option<u64>,

    /// Worker threads. All cores when omitted.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Writes the CSV table behind a figure.
    Figure {
        #[arg(value_enum)]
        id: FigureId,
    },
    /// Runs the analytic-versus-simulation checks; exits 1 on any failure.
    Validate,
    /// Evaluates the `[sweep]` grid of the config.
    Sweep,
}

/// Exit status of a successful run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    ChecksFailed,
}

impl Cli {
    pub fn load_config(&self) -> Result<Config, CliError> {
        let text = match &self.config {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?,
            None => String::new(),
        };
        let mut overrides = self.set.clone();
        if let Some(s) = self.seed {
            overrides.push(format!("mc.seed={s}"));
        }
        if let Some(n) = self.trials {
            overrides.push(format!("mc.trials={n}"));
            overrides.push(format!("mc.figure_trials={n}"));
        }
        Config::parse(&text, &overrides)
    }

    fn writer(&self) -> Result<Box<dyn Write>, CliError> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
                CliError::Usage(format!("cannot create {}: {e}", p.display()))
            })?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    pub fn execute(&self) -> Result<Outcome, CliError> {
        if let Some(n) = self.jobs {
            if n == 0 {
                return Err(CliError::Usage("--jobs must be at least 1".into()));
            }
            // Fails only if a pool already exists, e.g. on a second call in tests.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        let cfg = self.load_config()?;
        match &self.command {
            Command::Figure { id } => {
                let table = figures::build(*id, &cfg)?;
                let trials = id.simulates().then_some(cfg.mc.figure_trials);
                let mut w = self.writer()?;
                write_table(&mut w, &format!("figure {}", id.name()), &cfg, trials, &table)?;
                w.flush()?;
                Ok(Outcome::Ok)
            }
            Command::Sweep => {
                let table = sweep::run(&cfg)?;
                let mut w = self.writer()?;
                write_table(&mut w, "sweep", &cfg, None, &table)?;
                w.flush()?;
                Ok(Outcome::Ok)
            }
            Command::Validate => {
                let checks = run_validation(&cfg.params(), &cfg.plan())?;
                let mut w = self.writer()?;
                for c in &checks {
                    writeln!(w, "{c}")?;
                }
                let failed = checks.iter().filter(|c| !c.passed).count();
                writeln!(
                    w,
                    "{} of {} checks passed (seed {}, {} trials per check)",
                    checks.len() - failed,
                    checks.len(),
                    cfg.mc.seed,
                    cfg.mc.trials
                )?;
                w.flush()?;
                Ok(if failed == 0 { Outcome::Ok } else { Outcome::ChecksFailed })
            }
        }
    }
}

/// Parses `args`, runs the command and maps the result to an exit code.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match cli.execute() {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("underlay: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
