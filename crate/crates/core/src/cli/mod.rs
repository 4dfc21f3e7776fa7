//! Command-line front end.
//!
//! `qfimirror <command> --config <file> [--out <path>] [--format csv|json] [--threads N] [--dump-config]`
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.

pub mod commands;
pub mod config;
pub mod output;

use std::fs;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use thiserror::Error;

use crate::error::Error;
use crate::qfi::ParameterTag;
use config::{Command, ConfigError, Format, FreqMode, RunConfig};
use output::Table;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] Error),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            // bad physical inputs are configuration problems, not solver failures
            CliError::Numerical(Error::Domain(_) | Error::Unphysical { .. }) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CommandArg {
    ScanBoundary,
    Evolve,
    Qfi,
    FreqOpt,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::ScanBoundary => Command::ScanBoundary,
            CommandArg::Evolve => Command::Evolve,
            CommandArg::Qfi => Command::Qfi,
            CommandArg::FreqOpt => Command::FreqOpt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParamArg {
    Theta,
    Phi,
    Omega0,
}

#[derive(Debug, Parser)]
#[command(name = "qfimirror", version, about = "Quantum Fisher information of an atom near a mirror")]
pub struct Args {
    #[arg(value_enum)]
    pub command: CommandArg,
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<Format>,
    /// Worker threads for grid evaluation.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    pub dump_config: bool,
    /// Parameter for the `qfi` command.
    #[arg(long, value_enum)]
    pub param: Option<ParamArg>,
    /// `single` or `ramsey` for `freq-opt`.
    #[arg(long)]
    pub mode: Option<FreqMode>,
    /// Total probing time in units of 1/gamma0 for ramsey mode.
    #[arg(long)]
    pub total_time: Option<f64>,
}

/// Loads the config file and applies command-line overrides.
pub fn load_config(args: &Args) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(&args.config).map_err(|source| CliError::Io { path: args.config.clone(), source })?;
    let mut cfg = RunConfig::from_json(&text)?;
    cfg.command = Some(args.command.into());
    if let Some(out) = &args.out {
        cfg.output.path = Some(out.clone());
    }
    if let Some(format) = args.format {
        cfg.output.format = format;
    }
    if let Some(p) = args.param {
        cfg.qfi.param = match p {
            ParamArg::Theta => ParameterTag::Theta,
            ParamArg::Phi => ParameterTag::Phi,
            ParamArg::Omega0 => ParameterTag::Omega0,
        };
    }
    if let Some(mode) = args.mode {
        cfg.freq_opt.mode = mode;
    }
    if let Some(t) = args.total_time {
        cfg.freq_opt.total_time = Some(t);
    }
    Ok(cfg.resolve()?)
}

/// Output of one run: the rendered document plus any warnings raised on the way.
pub struct RunOutput {
    pub table: Table,
    pub rendered: String,
    pub warnings: Vec<String>,
}

/// Runs a resolved configuration on a pool of `threads` workers.
pub fn execute(cfg: &RunConfig, threads: Option<usize>) -> Result<RunOutput, CliError> {
    let mut warnings = Vec::new();
    let atom = cfg.atom_spec()?;
    let alpha = cfg.polarization()?;
    warnings.extend(atom.warning().map(|w| w.to_string()));
    warnings.extend(alpha.warning().map(|w| w.to_string()));

    let command = cfg.command.ok_or_else(|| CliError::Config("no command given".into()))?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;

    let table = pool.install(|| -> Result<Table, CliError> {
        Ok(match command {
            Command::ScanBoundary => commands::scan_boundary(cfg)?,
            Command::Evolve => commands::evolve(cfg)?,
            Command::Qfi => {
                if commands::is_frequency(cfg) {
                    let audit = commands::frequency_audit(cfg)?;
                    let worst = audit.iter().map(|(_, d)| d.abs()).fold(0.0, f64::max);
                    warnings.push(format!(
                        "closed-form omega0 column uses the first-order expression; largest |approx - exact| on the grid is {worst:e}"
                    ));
                }
                commands::qfi(cfg)?
            }
            Command::FreqOpt => {
                let mut physics = Vec::new();
                let t = commands::freq_opt(cfg, &mut physics)?;
                warnings.extend(physics.iter().map(|w| w.to_string()));
                if matches!(t.column("shielded").map(|c| c[0].clone()), Some(output::Cell::Bool(true))) {
                    warnings.push("shielded: effective decay rate vanishes, no finite optimum".into());
                }
                t
            }
        })
    })?;

    let digits = cfg.output.precision;
    let rendered = match cfg.output.format {
        Format::Csv => output::to_csv(&table, digits),
        Format::Json => output::to_json(&table, cfg, digits),
    };
    Ok(RunOutput { table, rendered, warnings })
}

pub fn run(args: &Args) -> Result<(), CliError> {
    let cfg = load_config(args)?;
    if args.dump_config {
        println!("{}", cfg.to_json());
        return Ok(());
    }
    let out = execute(&cfg, args.threads)?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    match &cfg.output.path {
        Some(path) => fs::write(path, &out.rendered).map_err(|source| CliError::Io { path: path.clone(), source })?,
        None => print!("{}", out.rendered),
    }
    Ok(())
}
