use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use p2p_reins_cli::commands::{parse_allocation, rounding_radius};
use p2p_reins_cli::{emit, load_config, run_command, Command, Format, Options, EXIT_CONDITION_FAILED, EXIT_ERROR, EXIT_OK};

#[derive(Parser)]
#[command(name = "p2p-reins", version, about = "P2P insurance pools with a reinsurer: contracts, welfare and the coalition game")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Market configuration (JSON); `-` reads standard input.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Single loading for the JPO2 contract.
    #[arg(long = "jpo2-t", global = true)]
    jpo2_t: Option<f64>,
    /// Leader restricted to one common loading (bowley).
    #[arg(long, global = true)]
    single_loading: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Pareto-optimal risk sharing and cession.
    Pareto,
    /// Leader–follower contract.
    Bowley,
    /// Coalition values.
    Game,
    /// Check a welfare allocation ω_1,…,ω_n,ω_R against the core.
    CoreCheck { allocation: String },
    /// The baseline comparison tables.
    Tables,
    /// Contracts across a grid of reinsurer risk aversion.
    Sweep,
    /// Every condition and verification.
    Validate,
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    let path = cli.config.context("--config <path> is required")?;
    let (cfg, params) = load_config(&path)?;
    let command = match cli.command {
        Cmd::Pareto => Command::Pareto,
        Cmd::Bowley => Command::Bowley,
        Cmd::Game => Command::Game,
        Cmd::CoreCheck { allocation } => {
            Command::CoreCheck { radius: rounding_radius(&allocation), allocation: parse_allocation(&allocation)? }
        }
        Cmd::Tables => Command::Tables,
        Cmd::Sweep => Command::Sweep,
        Cmd::Validate => Command::Validate,
    };
    let opts = Options { jpo2_t: cli.jpo2_t, single_loading: cli.single_loading };
    let output = run_command(&command, &cfg, &params, &opts)?;
    let bytes = emit(&output, cli.format);
    match &cli.out {
        Some(p) => std::fs::write(p, &bytes).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().lock().write_all(&bytes).context("writing standard output")?,
    }
    if output.has_required_failures() {
        for e in output.conditions.entries.iter().filter(|e| e.severity == p2p_reins::Severity::Required && !e.passed()) {
            log::warn!("required condition failed: {}", e.name);
        }
        return Ok(EXIT_CONDITION_FAILED);
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("P2P_LOG", "warn")).init();
    // clap's own usage-error code (2) would read as a failed condition.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    };
    ExitCode::from(code as u8)
}
