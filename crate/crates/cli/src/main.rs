use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use translab::config::CommandKind;
use translab::report::error_record;

/// Transmission-problem laboratory: single-layer solves, flat companions,
/// averaging identities, stability sweeps and regularity fits on the ball.
#[derive(Parser)]
#[command(name = "translab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the transmission problem on the configured interface and dump
    /// the solution on a grid.
    Solve(RunArgs),
    /// Solve a flat-slab problem and emit vertical profiles.
    Flat(RunArgs),
    /// Run the curved-vs-flat stability sweep.
    StabilitySweep(RunArgs),
    /// Dyadic polynomial fits and the decay exponent.
    RegularityFit(RunArgs),
    /// Run the averaging verification suite (pass/fail table).
    Verify(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: $TRANSLAB_OUT or the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores). Output bytes do not depend on
    /// this.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Solve(a) => (CommandKind::Solve, a),
        Command::Flat(a) => (CommandKind::Flat, a),
        Command::StabilitySweep(a) => (CommandKind::StabilitySweep, a),
        Command::RegularityFit(a) => (CommandKind::RegularityFit, a),
        Command::Verify(a) => (CommandKind::Verify, a),
    };
    if let Some(threads) = args.threads {
        if let Err(e) =
            rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()
        {
            eprintln!("{}", error_record("threads", &e.to_string()));
            return ExitCode::from(1);
        }
    }
    let out_dir = args
        .out
        .or_else(|| std::env::var_os("TRANSLAB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    match translab::run_experiment(kind, &args.config, &out_dir, args.seed) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if outcome.failed_checks > 0 {
                eprintln!(
                    "{}",
                    error_record(
                        "verification",
                        &format!("{} check(s) failed", outcome.failed_checks)
                    )
                );
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("{}", error_record("config-or-runtime", &format!("{e:#}")));
            ExitCode::from(1)
        }
    }
}
