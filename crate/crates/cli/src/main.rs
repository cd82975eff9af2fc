use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use xxladder_cli::{aggregate, plot_data, run, CliError, ExperimentConfig, ExperimentKind, RunOptions};

#[derive(Parser)]
#[command(name = "xxladder", version, about = "Disordered ladder-XX ensembles: spectra, OTOCs, lightcones and protocol checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML, or JSON by extension).
    config: PathBuf,
    /// Output directory; overrides `output` in the config.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to XXLADDER_WORKERS or the CPU count.
    #[arg(short, long)]
    workers: Option<usize>,
    /// Allow L = 8 sectors (dimension 12870).
    #[arg(long)]
    allow_large: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Gap-ratio statistics (kind `level_stats`).
    Spectrum(RunArgs),
    /// Ensemble OTOC curves (kinds `otoc_decay`, `otoc_alpha_sweep`).
    Otoc(RunArgs),
    /// Space-time OTOC grid, contours and dynamical exponents (kind `lightcone`).
    Lightcone(RunArgs),
    /// Sampling error of state-averaged OTOCs (kind `sampling_error`).
    Sampling(RunArgs),
    /// Sign-reversal and protocol identities (kind `protocol_check`).
    ProtocolCheck(RunArgs),
    /// Recompute aggregated tables from the raw files of a run directory.
    Aggregate {
        dir: PathBuf,
    },
    /// Write plot-ready tables for a run directory.
    PlotData {
        dir: PathBuf,
        /// Also write gnuplot scripts.
        #[arg(long)]
        gnuplot: bool,
    },
}

fn execute(args: &RunArgs, allowed: &[ExperimentKind], command: &str) -> Result<(), CliError> {
    let cfg = ExperimentConfig::from_path(&args.config)?;
    if !allowed.contains(&cfg.kind) {
        let names: Vec<&str> = allowed.iter().map(|k| k.name()).collect();
        return Err(CliError::Guard(format!("`{command}` runs kind {}, config has `{}`", names.join(" or "), cfg.kind)));
    }
    let out = args.out.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("runs").join(cfg.kind.name()));
    let opts = RunOptions { workers: args.workers, allow_large: args.allow_large, max_new_tasks: None };
    let manifest = run(&cfg, &out, &opts)?;
    for a in &manifest.artifacts {
        println!("{}", out.join(a).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Spectrum(a) => execute(a, &[ExperimentKind::LevelStats], "spectrum"),
        Command::Otoc(a) => execute(a, &[ExperimentKind::OtocDecay, ExperimentKind::OtocAlphaSweep], "otoc"),
        Command::Lightcone(a) => execute(a, &[ExperimentKind::Lightcone], "lightcone"),
        Command::Sampling(a) => execute(a, &[ExperimentKind::SamplingError], "sampling"),
        Command::ProtocolCheck(a) => execute(a, &[ExperimentKind::ProtocolCheck], "protocol-check"),
        Command::Aggregate { dir } => aggregate(dir).map(|paths| paths.iter().for_each(|p| println!("{}", p.display()))),
        Command::PlotData { dir, gnuplot } => {
            plot_data(dir, *gnuplot).map(|paths| paths.iter().for_each(|p| println!("{}", p.display())))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
