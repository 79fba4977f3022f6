use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use lzslab_cli::commands::{run, Options};
use lzslab_cli::config::{Job, RunConfig};
use lzslab_cli::{presets, CliError};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    LzPopulations,
    LzsSweep,
    Waveguide,
    Selftest,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::LzPopulations => "lz-populations",
            Command::LzsSweep => "lzs-sweep",
            Command::Waveguide => "waveguide",
            Command::Selftest => "selftest",
        }
    }
}

/// Non-Hermitian Landau-Zener datasets, sweeps and self-test.
///
/// The run is taken from --config, else --preset, else the defaults of
/// COMMAND. With both a config and a COMMAND the two must agree.
#[derive(Debug, Parser)]
#[command(name = "lzslab", version)]
struct Args {
    command: Option<Command>,

    /// JSON run configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Named parameter set (see --list-presets).
    #[arg(long, value_name = "NAME", conflicts_with = "config")]
    preset: Option<String>,

    /// Output root; defaults to $LZSLAB_OUT_DIR, then the working directory.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Sweep worker threads; defaults to every core.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,

    /// Treat boundary contamination as a failure.
    #[arg(long)]
    strict: bool,

    /// Reduced self-test.
    #[arg(long)]
    quick: bool,

    /// Print the resolved configuration as JSON and exit.
    #[arg(long)]
    emit_config: bool,

    /// Print the preset names and exit.
    #[arg(long)]
    list_presets: bool,
}

fn resolve(args: &Args) -> Result<RunConfig, CliError> {
    let cfg = if let Some(path) = &args.config {
        RunConfig::load(path)?
    } else if let Some(name) = &args.preset {
        presets::preset(name).ok_or_else(|| {
            CliError::Config(format!(
                "unknown preset `{name}`; known: {}",
                presets::NAMES.join(", ")
            ))
        })?
    } else if let Some(cmd) = args.command {
        presets::for_command(cmd.name()).expect("every command has defaults")
    } else {
        return Err(CliError::Config(
            "nothing to run: give a COMMAND, --config or --preset".into(),
        ));
    };
    if let Some(cmd) = args.command {
        if cmd.name() != cfg.job.name() {
            return Err(CliError::Config(format!(
                "command {} does not match the configuration's {}",
                cmd.name(),
                cfg.job.name()
            )));
        }
    }
    Ok(cfg)
}

fn execute(args: &Args) -> Result<Option<String>, CliError> {
    let mut cfg = resolve(args)?;
    if args.quick {
        if let Job::Selftest(s) = &mut cfg.job {
            s.quick = true;
        }
    }
    if args.emit_config {
        print!("{}", cfg.to_json());
        return Ok(None);
    }
    let out_dir = args
        .out
        .clone()
        .or_else(|| std::env::var_os("LZSLAB_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let opts = Options {
        out_dir,
        jobs: args.jobs.map(|n| n as usize),
        strict: args.strict,
        quick: args.quick,
    };
    let outcome = run(&cfg, &opts)?;
    outcome.write()?;
    for line in &outcome.summary {
        println!("{line}");
    }
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    for a in &outcome.artifacts {
        eprintln!("wrote {}", a.path.display());
    }
    Ok(outcome.failure)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.list_presets {
        for name in presets::NAMES {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    match execute(&args) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(failure)) => {
            eprintln!("error: {failure}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
