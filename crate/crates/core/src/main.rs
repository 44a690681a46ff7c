use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use splitorder::cli::{
    cmd_analyze, cmd_scan, parse_prime_range, render_summary, render_table, CliError, ProblemFile, RunOptions,
};

#[derive(Parser)]
#[command(
    name = "splitorder",
    version,
    about = "Splitting-order sequences and splitting verdicts for weighted hypersurfaces"
)]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(clap::Args)]
struct Common {
    /// Problem file of `key = value` lines.
    file: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Depth of the splitting-order prefix.
    #[arg(long = "n-max")]
    n_max: Option<usize>,
    /// Analyze rings whose weights are not well-formed.
    #[arg(long)]
    allow_ill_formed: bool,
    /// Degree ceiling for the m-primary scans.
    #[arg(long)]
    ceiling: Option<u64>,
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions { n_max: self.n_max, ceiling: self.ceiling, allow_ill_formed: self.allow_ill_formed }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Verdict for the prime given in the file.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verdicts for every prime in a range, logged as JSON lines.
    Scan {
        #[command(flatten)]
        common: Common,
        /// Inclusive range `A..B`; defaults to `primes` from the file.
        #[arg(long, value_parser = parse_prime_range)]
        primes: Option<(u64, u64)>,
        /// Log file; existing records are kept and their primes skipped.
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(args: Args) -> Result<(), CliError> {
    match args.cmd {
        Cmd::Analyze { common, out } => {
            let problem = ProblemFile::read(&common.file)?;
            let rep = cmd_analyze(&problem, &common.options())?;
            let text = match common.format {
                Format::Json => serde_json::to_string_pretty(&rep).expect("reports serialize") + "\n",
                Format::Table => render_table(&rep),
            };
            match out {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|source| CliError::Io { path: path.display().to_string(), source }),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Cmd::Scan { common, primes, out } => {
            let problem = ProblemFile::read(&common.file)?;
            let range = primes
                .or(problem.primes)
                .ok_or_else(|| CliError::Input("scan needs --primes or 'primes' in the problem file".into()))?;
            let summary = cmd_scan(&problem, range, &out, &common.options())?;
            match common.format {
                Format::Json => println!("{}", serde_json::to_string(&summary).expect("summaries serialize")),
                Format::Table => print!("{}", render_summary(&summary)),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
