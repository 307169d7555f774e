use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use saso_metrics::harness::{self, RunConfig};
use saso_metrics::scenario::ScenarioKind;

#[derive(Parser)]
#[command(
    name = "saso",
    version,
    about = "Run the reference scenarios through the SASO metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one seeded scenario and write a CSV per metric plus a summary.
    Run {
        #[arg(long)]
        scenario: ScenarioKind,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Defaults to the scenario's standard run length.
        #[arg(long)]
        ticks: Option<u64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Metric or scenario override, e.g. `--param epsilon=1.5`.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Run the acceptance suite and print one line per criterion.
    Check,
}

fn run(
    scenario: ScenarioKind,
    seed: u64,
    ticks: Option<u64>,
    out: PathBuf,
    params: &[String],
) -> saso_metrics::Result<()> {
    let mut config = RunConfig::defaults(scenario, seed);
    if let Some(t) = ticks {
        config.ticks = t;
    }
    for p in params {
        config.apply_param(p)?;
    }
    config.out_dir = Some(out.clone());
    let output = harness::run(&config)?;
    output.write_to(&out)?;
    print!("{}", output.summary_text());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            scenario,
            seed,
            ticks,
            out,
            params,
        } => match run(scenario, seed, ticks, out, &params) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Command::Check => {
            let outcomes = harness::check::run_all();
            for o in &outcomes {
                println!("{o}");
            }
            let failed: Vec<String> = outcomes
                .iter()
                .filter(|o| !o.passed)
                .map(|o| o.id.to_string())
                .collect();
            if failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                println!("failures=[{}]", failed.join(","));
                ExitCode::FAILURE
            }
        }
    }
}
