use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tdqsp::config::RunConfig;
use tdqsp::runner::{cmd_simulate, cmd_sweep, cmd_verify, SweepParam};
use tdqsp::Error;

#[derive(Parser)]
#[command(
    name = "tdqsp",
    about = "Block-encoding simulator for commuting time-dependent Hamiltonians",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the exponentiation mode (effective-time | m-fold).
    #[arg(long)]
    mode: Option<String>,
    /// Skip the commutativity gate; the output then approximates
    /// exp(-i integral H) rather than the time-ordered propagator.
    #[arg(long)]
    force_noncommuting: bool,
    /// Override the time-ordered oracle's step count.
    #[arg(long)]
    oracle_steps: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline once and write a single-row CSV.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Output CSV path (defaults to the config's output_path).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run the pipeline over a list of parameter values.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Parameter to vary: eps, t, n, or steps.
        #[arg(long)]
        param: String,
        /// Comma-separated values; an empty string sweeps nothing.
        #[arg(long)]
        values: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run commutativity, Hermiticity, and oracle self-convergence checks.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn load_config(common: &CommonArgs) -> tdqsp::Result<RunConfig> {
    let mut config = RunConfig::load(&common.config)?;
    if let Some(mode) = &common.mode {
        config.mode = match mode.as_str() {
            "effective-time" => tdqsp::config::ModeConfig::EffectiveTime,
            "m-fold" => tdqsp::config::ModeConfig::MFold,
            other => return Err(Error::Config(format!("unknown mode '{other}'"))),
        };
    }
    if common.force_noncommuting {
        config.force_noncommuting = true;
    }
    if let Some(steps) = common.oracle_steps {
        config.oracle_steps = steps;
        config.validate()?;
    }
    Ok(config)
}

fn run() -> tdqsp::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate { common, out } => {
            let config = load_config(&common)?;
            let out_path = out
                .or_else(|| config.output_path.clone().map(PathBuf::from))
                .ok_or_else(|| {
                    Error::Config("no output path: pass --out or set output_path".into())
                })?;
            let row = cmd_simulate(&config, &out_path)?;
            println!(
                "{} n={} t={} eps={:e}: error_vs_expm={:.3e} error_vs_timeordered={:.3e} ({} ms)",
                row.model,
                row.n,
                row.t,
                row.eps,
                row.error_vs_expm,
                row.error_vs_timeordered,
                row.runtime_ms
            );
            println!("wrote {}", out_path.display());
        }
        Command::Sweep { common, param, values, out } => {
            let config = load_config(&common)?;
            let param: SweepParam = param.parse()?;
            let values = values
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad sweep value '{s}'")))
                })
                .collect::<tdqsp::Result<Vec<f64>>>()?;
            let rows = cmd_sweep(&config, param, &values, &out)?;
            println!("wrote {} rows to {}", rows.len(), out.display());
        }
        Command::Verify { common } => {
            let config = load_config(&common)?;
            let report = cmd_verify(&config)?;
            println!(
                "commuting: {} (max commutator {:.3e})",
                report.commuting_pass, report.max_commutator_norm
            );
            println!("hermitian grid check: {}", report.hermitian_pass);
            match report.oracle_ratio {
                Some(r) => {
                    println!("oracle Richardson ratio: {r:.2} (pass: {})", report.oracle_pass)
                }
                None => println!("oracle Richardson ratio: exact regime (pass: true)"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
