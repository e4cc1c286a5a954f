use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use arwmass::cli::{run_path, EXIT_CONFIG};

/// Mass of asymptotically Robertson-Walker spacetimes.
///
/// Reads a JSON scenario and writes `<command>.csv` or `<command>.json`.
/// Set ARWMASS_THREADS to cap the worker count.
#[derive(Parser, Debug)]
#[command(name = "arwmass", version)]
struct Args {
    /// Scenario configuration (JSON).
    config: PathBuf,
    /// Directory for the output table.
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Ok(v) = std::env::var("ARWMASS_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: ARWMASS_THREADS must be a positive integer, got `{v}`");
                return ExitCode::from(EXIT_CONFIG as u8);
            }
        }
    }
    match run_path(&args.config, &args.output_dir) {
        Ok(outcome) => {
            println!("{}", outcome.output.display());
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
