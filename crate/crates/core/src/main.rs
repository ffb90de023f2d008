use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use thinfilm::config::RunConfig;
use thinfilm::harness::{self, CommandOptions, ExitStatus, HarnessError};

/// Certificate checker and spectral solver for two-phase thin-film flows.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory for reports, series and scripts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides every seed in the config (and the verify seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate certificates and gates of the initial datum.
    Check {
        #[arg(long)]
        config: PathBuf,
    },
    /// Integrate, write the series and audit the trajectory.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Run even when required gates fail.
        #[arg(long)]
        force: bool,
        /// Also write a plotting script for the series.
        #[arg(long)]
        emit_plot_script: bool,
    },
    /// Certificates (and optional short runs) over a parameter grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Time-step and bandwidth refinement study.
    Convergence {
        #[arg(long)]
        config: PathBuf,
    },
    /// Randomized inequality and oracle suites.
    Verify,
}

fn load(path: &Path) -> Result<(RunConfig, toml::Table), HarnessError> {
    Ok(RunConfig::load(path)?)
}

fn execute(cli: &Cli) -> Result<ExitStatus, HarnessError> {
    let opts = CommandOptions {
        seed: cli.seed,
        force: matches!(cli.command, Command::Run { force: true, .. }),
    };
    match &cli.command {
        Command::Check { config } => {
            let (cfg, _) = load(config)?;
            let out = harness::check(&cfg, &opts)?;
            let path = harness::write_output(&cli.out, &cfg.output.report, &out.report_document()?)?;
            println!("{}", path.display());
            Ok(out.exit_status())
        }
        Command::Run {
            config,
            emit_plot_script,
            ..
        } => {
            let (cfg, _) = load(config)?;
            let out = match harness::run(&cfg, &opts) {
                Err(HarnessError::GateFailed(msg)) => {
                    // Still leave the certificate report behind.
                    let checked = harness::check(&cfg, &opts)?;
                    harness::write_output(&cli.out, &cfg.output.report, &checked.report_document()?)?;
                    return Err(HarnessError::GateFailed(msg));
                }
                other => other?,
            };
            harness::write_output(&cli.out, &cfg.output.csv, &out.series.to_csv())?;
            harness::write_output(&cli.out, &cfg.output.report, &out.report_document()?)?;
            if *emit_plot_script {
                let script = harness::plot_script(
                    &cfg.output.csv,
                    out.check.report.e0,
                    out.check.report.predicted_rate,
                );
                harness::write_output(&cli.out, &cfg.output.plot_script, &script)?;
            }
            println!(
                "audits {}; report in {}",
                if out.audits.passed { "passed" } else { "failed" },
                cli.out.join(&cfg.output.report).display()
            );
            Ok(out.exit_status())
        }
        Command::Sweep { config } => {
            let (cfg, table) = load(config)?;
            let out = harness::sweep(&cfg, &table, &opts)?;
            let csv = cfg.sweep.as_ref().map_or("sweep.csv", |s| s.csv.as_str());
            let path = harness::write_output(&cli.out, csv, &out.to_csv())?;
            println!("{} rows in {}", out.rows.len(), path.display());
            Ok(ExitStatus::Success)
        }
        Command::Convergence { config } => {
            let (cfg, _) = load(config)?;
            let out = harness::convergence(&cfg, &opts)?;
            harness::write_output(&cli.out, &cfg.convergence.csv, &out.to_csv())?;
            let doc = harness::report_document("convergence", true, &out)?;
            let path = harness::write_output(&cli.out, &cfg.output.report, &doc)?;
            println!("{}", path.display());
            Ok(ExitStatus::Success)
        }
        Command::Verify => {
            let report = harness::verify(&opts);
            let passed = report.passed();
            let doc = harness::report_document("verify", passed, &report)?;
            let path = harness::write_output(&cli.out, "verify.toml", &doc)?;
            for s in &report.suites {
                println!("{:<40} {:>6} trials {:>4} violations", s.name, s.trials, s.violations);
            }
            println!("{}", path.display());
            Ok(if passed {
                ExitStatus::Success
            } else {
                ExitStatus::Failed
            })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let status = match execute(&cli) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_status()
        }
    };
    ExitCode::from(status.code() as u8)
}
