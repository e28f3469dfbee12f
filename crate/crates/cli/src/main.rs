//! `zetaladder`: critical-line zeta samples, Jacob's ladder tables, grid cache
//! management and convergence experiments.
//!
//! Exit codes: 0 success, 1 numerical or output failure, 2 domain or usage
//! error, 3 cache error, 4 trend violation in `experiment all`.

mod commands;
mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zetaladder::experiments::Lab;
use zetaladder::grid::GridStore;
use zetaladder::ErrorClass;

use commands::{CommandError, ExperimentId, ExperimentParams};
use config::{ConfigError, OutputFormat, Overrides, RunConfig, CACHE_ENV};

#[derive(Debug, Parser)]
#[command(name = "zetaladder", version, about = "Critical-line zeta, Jacob's ladders and divisor-sum experiments")]
struct Cli {
    /// Configuration file with key = value lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Grid cache file (overrides the config file and ZETALADDER_CACHE).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Grid tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Operational threshold T0.
    #[arg(long = "t0", global = true)]
    t0: Option<f64>,
    /// Constant term c0 of the ladder representation.
    #[arg(long, global = true, allow_negative_numbers = true)]
    c0: Option<f64>,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format.
    #[arg(long, global = true)]
    format: Option<OutputFormat>,
    /// Write output to a file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Fail with exit code 3 instead of building a missing grid.
    #[arg(long, global = true)]
    no_build: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Z(t) and |zeta(1/2+it)|^2 at one height or on a range.
    Zeta(ZetaArgs),
    /// Reverse or forward iterates of the ladder.
    Ladder(LadderArgs),
    /// Run an experiment and emit its convergence report.
    Experiment(ExperimentArgs),
    /// Manage the grid cache.
    Grid {
        #[command(subcommand)]
        action: GridAction,
    },
}

#[derive(Debug, Args)]
struct ZetaArgs {
    /// Single height
    #[arg(long, conflicts_with = "range", allow_negative_numbers = true)]
    t: Option<f64>,
    /// Height range, sampled every --step
    #[arg(long, num_args = 2, value_names = ["FROM", "TO"], allow_negative_numbers = true)]
    range: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.1)]
    step: f64,
}

#[derive(Debug, Args)]
struct LadderArgs {
    /// Base height
    #[arg(long = "T", visible_alias = "height")]
    t: f64,
    /// Number of reverse steps
    #[arg(long, conflicts_with = "forward")]
    reverse: Option<usize>,
    /// Number of forward steps
    #[arg(long)]
    forward: Option<usize>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    id: ExperimentId,
    /// Scale x of the scaled functionals.
    #[arg(long, default_value_t = 1.0)]
    x: f64,
    /// Checkpoints as a comma list, e.g. 1e3,1e4,1e5.
    #[arg(long, value_delimiter = ',')]
    tau: Option<Vec<f64>>,
    /// Fermat rational x,y,z,n.
    #[arg(long, default_value = "1,1,1,3")]
    fr: String,
    /// Ladder level r.
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Moment order l of |S1|^(2l).
    #[arg(long, default_value_t = 1)]
    l: u32,
    /// sigma(l); estimated when omitted.
    #[arg(long)]
    sigma: Option<f64>,
    /// Scale a of the product identity.
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    /// Argument x0 of the Gamma and D substitutions.
    #[arg(long, default_value_t = 3.0)]
    x0: f64,
    /// Gamma nesting depth (1 or 2).
    #[arg(long, default_value_t = 1)]
    depth: u32,
    /// d_linear, d_log, zeta_linear, zeta_log or s1:<l>:<sigma>.
    #[arg(long)]
    functional: Option<String>,
    /// Use the divisor increment in the logarithmic functional.
    #[arg(long)]
    divisor: bool,
    /// Reduced checkpoints.
    #[arg(long)]
    quick: bool,
}

#[derive(Debug, Subcommand)]
enum GridAction {
    /// Build or extend the cached grid.
    Build {
        /// Height the grid must reach
        #[arg(long)]
        t_max: f64,
    },
    /// Print the cached grid's build metadata.
    Info,
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Command(#[from] CommandError),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Command(CommandError::Usage(_)) => 2,
            Failure::Command(CommandError::TrendViolation(_)) => 4,
            Failure::Command(CommandError::Output(_)) => 1,
            Failure::Command(CommandError::Core(e)) => match e.class() {
                ErrorClass::Domain => 2,
                ErrorClass::Cache => 3,
                ErrorClass::Numerical => 1,
            },
        }
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CommandError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CommandError::Output(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    let overrides = Overrides {
        cache_path: cli.cache.clone(),
        tol: cli.tol,
        t0: cli.t0,
        c0: cli.c0,
        thread_budget: cli.threads,
        output_format: cli.format,
    };
    let config = RunConfig::resolve(
        cli.config.as_deref(),
        std::env::var(CACHE_ENV).ok(),
        &overrides,
    )?;
    // a second initialisation only fails if a pool already exists
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(config.thread_budget)
        .build_global();
    let format = config.output_format;
    let open_store = || -> Result<GridStore, CommandError> {
        if let Some(dir) = config.cache_path.parent().filter(|d| !d.as_os_str().is_empty()) {
            if !cli.no_build {
                std::fs::create_dir_all(dir).map_err(|source| {
                    CommandError::Core(zetaladder::Error::Io {
                        path: dir.to_path_buf(),
                        source,
                    })
                })?;
            }
        }
        Ok(GridStore::open(&config.cache_path, !cli.no_build)?)
    };
    match cli.command {
        Command::Zeta(args) => {
            let range = args.range.map(|r| (r[0], r[1]));
            let rows = commands::zeta_samples(args.t, range, args.step)?;
            commands::write_rows(&rows, format, output(&cli.output)?)?;
        }
        Command::Ladder(args) => {
            let mut store = open_store()?;
            let rows = commands::ladder_rows(&mut store, &config, args.t, args.reverse, args.forward)?;
            commands::write_rows(&rows, format, output(&cli.output)?)?;
        }
        Command::Grid { action } => {
            let mut store = open_store()?;
            let info = match action {
                GridAction::Build { t_max } => commands::grid_build(&mut store, &config, t_max)?,
                GridAction::Info => commands::grid_info(&store)?,
            };
            commands::write_rows(&[info], format, output(&cli.output)?)?;
        }
        Command::Experiment(args) => {
            let params = ExperimentParams {
                x: args.x,
                taus: args.tau,
                fr: args.fr,
                r: args.r,
                l: args.l,
                sigma: args.sigma,
                a: args.a,
                x0: args.x0,
                depth: args.depth,
                functional: args.functional,
                divisor: args.divisor,
                quick: args.quick,
            };
            let mut lab = Lab::new(open_store()?, config.lab_config()).map_err(CommandError::from)?;
            let result = commands::run_experiment(&mut lab, args.id, &params)?;
            result.write(format, output(&cli.output)?)?;
            for line in result.summary() {
                eprintln!("{line}");
            }
            let violations = result.violations();
            if args.id == ExperimentId::All && violations > 0 {
                return Err(CommandError::TrendViolation(violations).into());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
