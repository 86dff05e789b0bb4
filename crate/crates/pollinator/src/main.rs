use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pollinator::commands;
use pollinator::config::Overrides;
use pollinator::{Failure, OUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "pollinator", version, about = "Simulate and analyse traffic between social media platforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Scenario config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trips: Option<u64>,
    #[arg(long, global = true)]
    cutoff: Option<u32>,
    #[arg(long, global = true)]
    cpc: Option<f64>,
    #[arg(long, global = true)]
    cpm: Option<f64>,
    /// Monte Carlo worker threads. Results do not depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo traffic report.
    Simulate {
        /// Also write every trip as JSON lines.
        #[arg(long)]
        trace: bool,
    },
    /// Expected trip time from both evaluators.
    Expect {
        /// Also report the recursive value for every cutoff up to N.
        #[arg(long, value_name = "N")]
        sweep: Option<u32>,
    },
    /// Advertising revenue indices from a usage CSV.
    Revenue {
        /// Usage CSV; overrides the config's revenue.usage_csv.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Sensitivity of expected trip time to one platform's dwell time.
    Sensitivity {
        #[arg(long)]
        platform: String,
        /// Finite-difference step in seconds.
        #[arg(long, default_value_t = commands::DEFAULT_FD_STEP)]
        step: f64,
    },
    /// Median media length and preference convergence.
    Hetero,
    /// Monte Carlo with pools disabled and enabled.
    PoolCompare,
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, Failure> {
    let c = cli.common;
    let overrides = Overrides {
        seed: c.seed,
        trips: c.trips,
        cutoff: c.cutoff,
        cpc: c.cpc,
        cpm: c.cpm,
        workers: c.workers,
    };
    let config = || c.config.as_deref().ok_or_else(|| Failure::validation("--config is required"));
    match cli.command {
        Command::Simulate { trace } => commands::simulate(config()?, &c.out, &overrides, trace),
        Command::Expect { sweep } => commands::expect(config()?, &c.out, &overrides, sweep),
        Command::Revenue { csv } => commands::revenue(c.config.as_deref(), csv.as_deref(), &c.out, &overrides),
        Command::Sensitivity { platform, step } => commands::sensitivity(config()?, &platform, step, &c.out, &overrides),
        Command::Hetero => commands::hetero(config()?, &c.out, &overrides),
        Command::PoolCompare => commands::pool_compare(config()?, &c.out, &overrides),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(written) => {
            for path in written {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
