use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ufp_cli::{default_summary_path, read_grid, run_command, sweep_command, verify_command, CliError, RunConfig};
use ufp_core::{NumericMode, ProtocolVariant, SignPolicy};

#[derive(Parser)]
#[command(name = "ufp", version, about = "Play and check the unbounded forecasting game")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one matchup and write the trace plus `<out>.verdict.json`.
    Run {
        #[arg(long)]
        forecaster: String,
        #[arg(long)]
        skeptic: String,
        #[arg(long, value_enum, default_value_t = Variant::Standard)]
        variant: Variant,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        #[arg(long)]
        rounds: u64,
        #[arg(long, value_enum, default_value_t = Policy::Positive)]
        sign_policy: Policy,
        /// End the game at the first round with negative capital.
        #[arg(long)]
        stop_on_bankruptcy: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every acceptance check; exit 1 if any fails.
    Verify,
    /// Play a JSON grid of matchups in parallel and write a CSV summary.
    Sweep {
        #[arg(long)]
        grid: PathBuf,
        /// Defaults to `<grid>.summary.csv`.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Standard,
    Modified,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Positive,
    Alternate,
}

fn execute(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Run {
            forecaster,
            skeptic,
            variant,
            mode,
            rounds,
            sign_policy,
            stop_on_bankruptcy,
            out,
        } => {
            let config = RunConfig {
                id: None,
                forecaster,
                skeptic,
                variant: match variant {
                    Variant::Standard => ProtocolVariant::Standard,
                    Variant::Modified => ProtocolVariant::Modified,
                },
                mode: match mode {
                    Mode::Exact => NumericMode::Exact,
                    Mode::Float => NumericMode::Float,
                },
                horizon: rounds,
                sign_policy: match sign_policy {
                    Policy::Positive => SignPolicy::PreferPositive,
                    Policy::Alternate => SignPolicy::Alternate,
                },
                stop_on_bankruptcy,
                out,
            };
            let report = run_command(&config)?;
            let v = &report.document.verdict;
            println!(
                "rounds={} triggers={} bankrupt_at={} final_capital~{:e}",
                report.records.len(),
                v.trigger_rounds.len(),
                v.bankrupt_at.map_or_else(|| "none".to_string(), |n| n.to_string()),
                v.final_capital.to_f64()
            );
            Ok(0)
        }
        Command::Verify => Ok(verify_command(std::io::stdout().lock()) as u8),
        Command::Sweep { grid, summary } => {
            let summary = summary.unwrap_or_else(|| default_summary_path(&grid));
            let rows = sweep_command(&read_grid(&grid)?, &summary)?;
            println!("{} games, summary in {}", rows.len(), summary.display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("ufp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
