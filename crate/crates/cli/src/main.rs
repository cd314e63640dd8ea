use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mcarch_cli::{commands, CliError, Overrides, RunConfig};

#[derive(Parser)]
#[command(
    name = "mcarch",
    version,
    about = "Multi-component ARCH volatility forecasts"
)]
struct Cli {
    /// TOML run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Business days per year used for annualization
    #[arg(long, global = true)]
    year_days: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Forecast weight tables w_k(horizon)
    Weights {
        #[arg(long)]
        max_horizon: Option<usize>,
    },
    /// Term structures of forward and forecasted volatility
    Forecast {
        #[arg(long)]
        prices: Option<PathBuf>,
    },
    /// Monte Carlo paths and optional martingale check
    Simulate {
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        paths: Option<usize>,
    },
    /// Rolling forecast / implied / realized comparison
    Evaluate {
        #[arg(long)]
        prices: Option<PathBuf>,
        #[arg(long)]
        implied: Option<PathBuf>,
    },
    /// Fit factor market models to forward-variance curves
    MarketFit {
        #[arg(long)]
        curve: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    let mut config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    config.apply(&Overrides {
        seed: cli.seed,
        out_dir: cli.out_dir,
        year_days: cli.year_days,
    });
    match cli.command {
        Command::Weights { max_horizon } => {
            if let Some(h) = max_horizon {
                config.weights.max_horizon = h;
            }
            commands::cmd_weights(&config)
        }
        Command::Forecast { prices } => {
            if prices.is_some() {
                config.forecast.prices = prices;
            }
            commands::cmd_forecast(&config)
        }
        Command::Simulate { steps, paths } => {
            if let Some(s) = steps {
                config.simulate.steps = s;
            }
            if let Some(p) = paths {
                config.simulate.paths = p;
            }
            commands::cmd_simulate(&config)
        }
        Command::Evaluate { prices, implied } => {
            if prices.is_some() {
                config.evaluate.prices = prices;
            }
            if implied.is_some() {
                config.evaluate.implied = implied;
            }
            commands::cmd_evaluate(&config)
        }
        Command::MarketFit { curve } => {
            if curve.is_some() {
                config.market_fit.curve = curve;
            }
            commands::cmd_market_fit(&config)
        }
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(1)
        }
    }
}
