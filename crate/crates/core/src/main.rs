use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use pcf::harness::{self, CampaignConfig, Command, HarnessError, EXIT_CONFIG};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    VerifyLemmas,
    SweepEstimates,
    Picard,
    AppendixB,
    GammaTrace,
}

/// Verification campaigns for parabolic cylinder function estimates.
#[derive(Debug, Parser)]
#[command(name = "pcf", version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    delta: Option<String>,
    /// Output directory (default: $PCF_OUT, then ./pcf_out).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Ceiling override, repeatable.
    #[arg(long, value_name = "NAME=R")]
    ceiling: Vec<String>,
    #[arg(long)]
    jobs: Option<usize>,
}

fn config(cli: &Cli) -> Result<CampaignConfig, HarnessError> {
    let command = match cli.command {
        Cmd::VerifyLemmas => Command::VerifyLemmas,
        Cmd::SweepEstimates => Command::SweepEstimates,
        Cmd::Picard => Command::Picard,
        Cmd::AppendixB => Command::AppendixB,
        Cmd::GammaTrace => Command::GammaTrace,
    };
    let file = match &cli.config {
        Some(p) => harness::read_config_file(p)?,
        None => Vec::new(),
    };
    let mut over = Vec::new();
    if let Some(d) = &cli.delta {
        over.push(("delta".to_string(), d.clone()));
    }
    if let Some(o) = &cli.out {
        over.push(("output_dir".to_string(), o.display().to_string()));
    }
    if let Some(s) = cli.seed {
        over.push(("seed".to_string(), s.to_string()));
    }
    if let Some(j) = cli.jobs {
        over.push(("jobs".to_string(), j.to_string()));
    }
    for c in &cli.ceiling {
        let Some((name, r)) = c.split_once('=') else {
            return Err(HarnessError::Config(format!("--ceiling {c:?}: expected NAME=R")));
        };
        over.push((format!("ceiling.{}", name.trim()), r.trim().to_string()));
    }
    CampaignConfig::resolve(command, &file, &over, std::env::var(harness::OUT_ENV).ok())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    let result = config(&cli).and_then(|cfg| harness::run(&cfg));
    match result {
        Ok(m) => {
            for c in &m.checks {
                println!("{:4} {} observed {} {} {}", c.status, c.name, c.observed, c.comparison, c.limit);
            }
            println!("{} checks, {} failed; artifacts in {}", m.checks.len(), m.checks.iter().filter(|c| !c.passed()).count(), m.config["output_dir"]);
            ExitCode::from(m.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("pcf: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
