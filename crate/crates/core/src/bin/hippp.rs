//! `hippp design | sweep | flow`

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hippp::cli::{self, CliError, DesignArtifact, ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(name = "hippp", version, about = "Partial power processing design and evaluation for series battery strings")]
struct Cli {
    /// Worker threads for Monte Carlo trials (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed; overrides `monte_carlo.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials; overrides `monte_carlo.trials`.
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Design LS-HiPPP for the config's battery supply and write design.toml.
    Design(RunArgs),
    /// Evaluate every configured architecture and write the CSV series.
    Sweep(RunArgs),
    /// Solve the operating point of one unit built from a design file.
    Flow {
        /// design.toml produced by `hippp design`.
        design: PathBuf,
        /// Measured battery capabilities in string order.
        capabilities: PathBuf,
    },
}

fn load(args: &RunArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    cfg.apply(&Overrides {
        out: args.out.clone(),
        seed: args.seed,
        trials: args.trials,
    })?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Design(args) => {
            let cfg = load(&args)?;
            let artifact = cli::run_design(&cfg)?;
            let path = cli::write_design(&artifact, &cfg.output.dir)?;
            println!(
                "wrote {} (M={}, Layer-2 rating {}, R̂ {:.4})",
                path.display(),
                artifact.layer1.len(),
                artifact.layer2_rating,
                artifact.rating_norm
            );
        }
        Command::Sweep(args) => {
            let cfg = load(&args)?;
            let output = cli::run_sweep(&cfg)?;
            for path in cli::write_sweep(&output, &cfg.output.dir)? {
                log::info!("wrote {}", path.display());
            }
            for line in cli::summary_lines(&output.utilization_vs_rating) {
                println!("{line}");
            }
        }
        Command::Flow { design, capabilities } => {
            let artifact = DesignArtifact::load(&design)?;
            let caps = cli::load_capabilities(&capabilities)?;
            print!("{}", cli::flow_report(&artifact, &caps)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HIPPP_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
