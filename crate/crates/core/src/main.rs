use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;
use thermolab::cli::{run_from_file, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "thermolab", version, about = "Thermostat flows on the Bolza surface")]
struct Args {
    #[arg(value_enum)]
    command: Subcommand,
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides `n_states`.
    #[arg(long)]
    states: Option<usize>,
    /// Overrides `rng_seed`.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run_from_file(args.command, &args.config, &args.out, args.states, args.seed) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("thermolab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
