use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ellipthom::config::RunConfig;
use ellipthom::{commands, CliError};

#[derive(Parser)]
#[command(name = "ellipthom", version, about = "Homogenized tensors and ellipticity constants of periodic two-phase cells")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Effective tensor of the configured cell
    Homogenize(Common),
    /// Coercivity constants and their ordering checks
    Spectra(Common),
    /// Loss-of-ellipticity sweep over kinds and volume fractions
    PhaseDiagram(Common),
    /// Connectivity class of a grid
    Classify {
        /// Grid JSON as written by the other commands
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Laminate closed form against the finite-element tensor
    Oracle(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `output.dir`
    #[arg(long)]
    out: Option<PathBuf>,
    /// Concurrent sweep rows
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Seed of random grids, overriding the configured one
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::load(&self.config)?;
        if let Some(out) = &self.out {
            cfg.output.dir = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.override_seed(seed);
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let written = match cli.command {
        Command::Homogenize(c) => commands::homogenize(&c.load()?)?,
        Command::Spectra(c) => commands::spectra(&c.load()?)?,
        Command::PhaseDiagram(c) => commands::phase_diagram(&c.load()?, c.jobs)?,
        Command::Oracle(c) => commands::oracle(&c.load()?)?,
        Command::Classify { grid, config } => {
            let cfg = config.as_deref().map(RunConfig::load).transpose()?;
            println!("{}", commands::classify(grid.as_deref(), cfg.as_ref())?);
            return Ok(());
        }
    };
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::new().parse_filters(&std::env::var("ELLIPTHOM_LOG").unwrap_or_else(|_| "error".into())).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", CliError::Config(e.to_string()).to_json());
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
