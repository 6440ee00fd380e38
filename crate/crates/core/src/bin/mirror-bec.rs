use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mirror_bec::cli::{cmd_displacement, cmd_fringes, cmd_spectrum, cmd_validate, exit_code, Format, Scenario};
use mirror_bec::Error;

#[derive(Parser)]
#[command(name = "mirror-bec", version, about = "Macro-state fringes, BEC Bragg spectra and mirror kicks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Photon-number fringes versus trigger phase
    Fringes(Common),
    /// Reflectivity of the lattice condensate versus detuning
    Spectrum(Common),
    /// Condensate displacement fringe
    Displacement(Common),
    /// Run the invariant checks on a scenario
    Validate(Common),
}

#[derive(clap::Args)]
struct Common {
    /// Scenario file (TOML); built-in defaults when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    format: OutFormat,
    /// Worker threads for parallel scans
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

fn run(cli: Cli) -> Result<bool, Error> {
    let (Command::Fringes(common)
    | Command::Spectrum(common)
    | Command::Displacement(common)
    | Command::Validate(common)) = &cli.command;

    let scenario = match &common.config {
        Some(path) => Scenario::load(path)?,
        None => Scenario::from_toml("")?,
    };
    let format = match common.format {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    let (text, ok) = pool.install(|| -> Result<_, Error> {
        Ok(match &cli.command {
            Command::Fringes(_) => (cmd_fringes(&scenario)?.render(format), true),
            Command::Spectrum(_) => (cmd_spectrum(&scenario)?.render(format), true),
            Command::Displacement(_) => (cmd_displacement(&scenario)?.render(format), true),
            Command::Validate(_) => {
                let report = cmd_validate(&scenario);
                (report.render(format), report.passed())
            }
        })
    })?;

    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(mirror_bec::error::IoError(e.to_string())))?,
        None => print!("{text}"),
    }
    Ok(ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
