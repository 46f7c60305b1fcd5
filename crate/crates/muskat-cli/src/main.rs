use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use muskat_cli::commands::{
    parse_modes, rtcheck_cmd, simulate_cmd, spectrum_cmd, symbols_cmd, write_spectrum, write_symbols,
};
use muskat_cli::config::SimConfig;
use muskat_cli::{verify, CliError};

#[derive(Parser)]
#[command(name = "muskat", version, about = "Two-interface periodic Muskat solver")]
struct Cli {
    /// JSON run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir` from the config)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the interfaces and write snapshots plus run metadata
    Simulate,
    /// Print the Rayleigh-Taylor margins of the initial state as JSON
    Rtcheck,
    /// Tabulate the Fourier symbols at a frozen point of the initial state
    Symbols {
        #[arg(long, default_value_t = 16, allow_negative_numbers = true)]
        m_max: i64,
        #[arg(long, default_value_t = 0.0)]
        tau: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x: f64,
        /// Add the ODE oracle columns
        #[arg(long)]
        oracle: bool,
    },
    /// Per-mode linearized matrices about a flat state
    Spectrum {
        #[arg(long, default_value = "1..4")]
        modes: String,
    },
    /// Run the built-in oracle checks
    Verify {
        #[arg(long)]
        quick: bool,
    },
}

fn load(cli: &Cli) -> Result<SimConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    SimConfig::load(path)
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    match &cli.command {
        Command::Simulate => {
            let cfg = load(cli)?;
            let out = cfg.out_dir(cli.out.as_deref());
            let meta = simulate_cmd(&cfg, &out)?;
            let t = meta.samples.last().map_or(0.0, |s| s.t);
            println!(
                "{}: {} samples, t = {t}, wrote {}",
                meta.termination,
                meta.samples.len(),
                out.display()
            );
        }
        Command::Rtcheck => {
            let cfg = load(cli)?;
            println!("{}", serde_json::to_string_pretty(&rtcheck_cmd(&cfg)?)?);
        }
        Command::Symbols { m_max, tau, x, oracle } => {
            let cfg = load(cli)?;
            let tables = symbols_cmd(&cfg, *m_max, *tau, *x, *oracle)?;
            let (l, p) = write_symbols(&tables, &cfg.out_dir(cli.out.as_deref()))?;
            println!("wrote {} and {}", l.display(), p.display());
        }
        Command::Spectrum { modes } => {
            let cfg = load(cli)?;
            let rows = spectrum_cmd(&cfg, parse_modes(modes)?)?;
            println!(
                "wrote {}",
                write_spectrum(&rows, &cfg.out_dir(cli.out.as_deref()))?.display()
            );
        }
        Command::Verify { quick } => {
            let results = verify::run(*quick);
            print!("{}", verify::table(&results));
            return Ok(results.iter().all(|r| r.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
