//! eitpol: datasets for the optical response, polariton dispersion, group
//! velocity, and pulse kinematics of a coherently driven Lambda medium with
//! atomic motion.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{
    preset_fig2, preset_fig3a, preset_fig3b, preset_fig5, resolve_model, run_chi,
    run_dispersion, run_groupvel, run_kinematics,
};
use config::{CliError, CliResult, RunConfig, SweepAxis};
use output::{emit, suffixed_path, Dataset, Format};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PresetId {
    Fig2,
    Fig3a,
    Fig3b,
    Fig5,
}

#[derive(Debug, Parser)]
#[command(
    name = "eitpol",
    version,
    about = "Optical response, polariton dispersion, group velocity, and pulse kinematics for a driven Lambda medium with atomic motion"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Flat key=value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output path (stdout when omitted).  Kinematics/fig5 write one file
    /// per section with _omega/_vg/_trajectory/_snapshots suffixes.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Susceptibility model (beam|residue|quadrature|eit); default is the
    /// medium's exact model.
    #[arg(long, global = true)]
    model: Option<String>,

    /// Sweep axis "name:start:stop:count"; may be given up to twice.
    #[arg(long, global = true, action = clap::ArgAction::Append)]
    sweep: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Complex susceptibility chi at a probe point.
    Chi,
    /// Solved polariton dispersion branch.
    Dispersion,
    /// Group velocity (closed resonance form, or numeric with --model).
    Groupvel,
    /// Drive profile, v_g(z), and decelerating-pulse trajectory in a cell.
    Kinematics,
    /// Figure-preset datasets with hard-coded parameters.
    Preset {
        #[arg(value_enum)]
        id: PresetId,
    },
}

fn build_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.load_file(path)?;
    }
    Ok(cfg)
}

fn parse_axes(cli: &Cli) -> CliResult<Vec<SweepAxis>> {
    if cli.sweep.len() > 2 {
        return Err(CliError::Config(
            "at most two sweep axes are supported".into(),
        ));
    }
    cli.sweep.iter().map(|s| SweepAxis::parse(s)).collect()
}

fn emit_many(
    sections: Vec<(String, Dataset)>,
    out: Option<&PathBuf>,
    format: Format,
) -> CliResult<usize> {
    let mut warnings = 0;
    match out {
        Some(base) => {
            for (suffix, ds) in &sections {
                let path = suffixed_path(base, suffix);
                warnings += emit(ds, Some(&path), format)?;
            }
        }
        None => {
            for (suffix, ds) in &sections {
                println!("# section: {suffix}");
                warnings += emit(ds, None, format)?;
            }
        }
    }
    Ok(warnings)
}

fn run(cli: &Cli) -> CliResult<usize> {
    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let cfg = build_config(cli)?;
    let axes = parse_axes(cli)?;
    match &cli.cmd {
        Cmd::Chi => {
            let model = resolve_model(cli.model.as_deref(), &cfg.params)?;
            let ds = run_chi(&cfg, model, &axes)?;
            emit(&ds, cli.out.as_deref(), format)
        }
        Cmd::Dispersion => {
            let model = resolve_model(cli.model.as_deref(), &cfg.params)?;
            let ds = run_dispersion(&cfg, model, &axes)?;
            emit(&ds, cli.out.as_deref(), format)
        }
        Cmd::Groupvel => {
            let model = match cli.model.as_deref() {
                None => None,
                flag => Some(resolve_model(flag, &cfg.params)?),
            };
            let ds = run_groupvel(&cfg, model, &axes)?;
            emit(&ds, cli.out.as_deref(), format)
        }
        Cmd::Kinematics => {
            let sections = run_kinematics(&cfg)?;
            emit_many(sections, cli.out.as_ref(), format)
        }
        Cmd::Preset { id } => {
            if !axes.is_empty() {
                return Err(CliError::Config(
                    "presets have fixed grids; --sweep is not accepted".into(),
                ));
            }
            match id {
                PresetId::Fig2 => emit(&preset_fig2()?, cli.out.as_deref(), format),
                PresetId::Fig3a => emit(&preset_fig3a()?, cli.out.as_deref(), format),
                PresetId::Fig3b => emit(&preset_fig3b()?, cli.out.as_deref(), format),
                PresetId::Fig5 => emit_many(preset_fig5()?, cli.out.as_ref(), format),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(warnings) => {
            if warnings > 0 {
                eprintln!("warning: {warnings} non-finite output cells (written as NaN tokens)");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
