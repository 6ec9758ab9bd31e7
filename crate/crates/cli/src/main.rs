//! `toeplitz`: periods, periodic structures, Toeplitz constructions and
//! odometer addresses for sequence-definition files.

mod commands;
mod odometer;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use toeplitz_core::{format, SequenceRule};

use report::{Config, Format, Report};

#[derive(Parser)]
#[command(name = "toeplitz", version, about = "Period analysis and Toeplitz constructions for two-sided sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args)]
struct Flags {
    /// Half-width of the analysis window [-radius, radius).
    #[arg(long, global = true, default_value_t = 4096)]
    radius: u64,
    /// Largest candidate period.
    #[arg(long, global = true, default_value_t = 64)]
    period_cap: usize,
    /// Levels of the periodic structure (or odometer) to use.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Shifts S^t x with |t| <= t-max are sampled.
    #[arg(long, global = true, default_value_t = 64)]
    t_max: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Output file: the eta definition for `eta`, the report otherwise.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

const DEFAULT_DEPTH: usize = 8;

#[derive(Subcommand)]
enum Command {
    /// Skeleton table, aperiodic positions, recurrence and growth series.
    Analyze { file: PathBuf },
    /// Periodic structure with the provenance of each level.
    Structure { file: PathBuf },
    /// Build a Toeplitz sequence in the orbit closure.
    Eta { file: PathBuf },
    /// Arithmetic in the odometer of a divisibility chain.
    Odometer(odometer::OdometerArgs),
    /// Odometer addresses of orbit samples, equivariance and fibers.
    Factor { file: PathBuf },
    /// Run every invariant check on one sequence.
    Verify { file: PathBuf },
}

fn load(path: &Path) -> Result<SequenceRule, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    format::parse(&text).map_err(|e| format!("{}:{e}", path.display()))
}

fn run(cli: Cli) -> Result<(Report, Config), String> {
    let flags = &cli.flags;
    if flags.radius < 2 * flags.period_cap as u64 || flags.period_cap == 0 {
        return Err(format!(
            "--radius {} must be at least twice --period-cap {}",
            flags.radius, flags.period_cap
        ));
    }
    if flags.depth == Some(0) || flags.t_max == 0 {
        return Err("--depth and --t-max must be positive".to_owned());
    }
    let mut config = Config {
        input: None,
        radius: flags.radius,
        period_cap: flags.period_cap,
        depth: flags.depth.unwrap_or(DEFAULT_DEPTH),
        t_max: flags.t_max,
        format: flags.format,
    };
    let with_file = |file: &Path, config: &mut Config| {
        config.input = Some(file.display().to_string());
        load(file)
    };
    let report = match &cli.command {
        Command::Analyze { file } => commands::analyze(&with_file(file, &mut config)?, &config),
        Command::Structure { file } => commands::structure_cmd(&with_file(file, &mut config)?, &config),
        Command::Eta { file } => commands::eta(&with_file(file, &mut config)?, &config, flags.out.as_deref()),
        Command::Factor { file } => commands::factor(&with_file(file, &mut config)?, &config),
        Command::Verify { file } => commands::verify(&with_file(file, &mut config)?, &config),
        Command::Odometer(args) => odometer::run(args, flags.depth, &mut config)?,
    };
    Ok((report, config))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let report_file = match &cli.command {
        Command::Eta { .. } => None,
        _ => cli.flags.out.clone(),
    };
    let (report, config) = match run(cli) {
        Ok(r) => r,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(1);
        }
    };
    let text = report.render(&config);
    match report_file {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(report.status.code())
}
