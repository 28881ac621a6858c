use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Parser;

use backflow_cli::config::Format;
use backflow_cli::{presets, resolve, run};

const AFTER_HELP: &str = "\
Targets:
  Scenarios: current-map, left-prob, two-particle, fidelity-scan, fidelity-backflow, validate
  Presets:   fig1 (current-map), fig2 (left-prob), fig3 (two-particle),
             fig4 (fidelity-scan), fig5 (fidelity-backflow)

Precedence: command-line flags > --config file > preset or scenario defaults.
A config file is TOML and may set any subset of the keys shown by --print-config.

Output tables (numbers carry 17 significant digits):
  current-map        theta,t,j_times_1000    (theta,t,j with --raw)
  left-prob          eta,t,P
                     <out>.intervals: eta,t_start,t_end,probability_gain,t_peak
  two-particle       t,P_plus,P_minus
                     <out>.intervals: symmetry,t_start,t_end,probability_gain,t_peak
  fidelity-scan      alpha_phi,fidelity
  fidelity-backflow  alpha_phi,fidelity,backflow_amount,max_interval_gain,interval_count
                     <out>.curves: alpha_phi,t,P_plus
  validate           name,value,threshold,passed,seconds
With several damping rates each table is written once per rate as <out>.gamma-<rate>.
Every run also writes <out>.manifest.json (resolved config, version, files, timing).";

#[derive(Debug, Parser)]
#[command(name = "backflow", version, about = "Quantum backflow under Caldirola-Kanai damping", after_help = AFTER_HELP)]
struct Cli {
    /// Scenario or preset name
    target: Option<String>,
    /// TOML file layered over the preset or scenario defaults
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output path without extension [default: ./<target>]
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Table format
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write raw current values instead of j × 1000
    #[arg(long)]
    raw: bool,
    /// Run the analytic-versus-oracle checks before the scenario; abort if any fails
    #[arg(long)]
    validate: bool,
    /// Worker threads [default: all cores]
    #[arg(long, env = "BACKFLOW_THREADS", value_name = "N")]
    threads: Option<usize>,
    /// List the presets and exit
    #[arg(long)]
    list_presets: bool,
    /// Print the resolved configuration as TOML and exit
    #[arg(long)]
    print_config: bool,
}

enum Failure {
    Usage(anyhow::Error),
    Run(anyhow::Error),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn real_main(cli: Cli) -> Result<(), Failure> {
    if cli.list_presets {
        for p in presets::builtin_presets() {
            println!("{:<6} {}", p.name, p.description);
        }
        return Ok(());
    }
    let target = cli
        .target
        .clone()
        .ok_or_else(|| Failure::Usage(anyhow::anyhow!("missing scenario or preset name (see --help)")))?;
    let config = load(&cli, &target).map_err(Failure::Usage)?;
    if cli.print_config {
        print!("{}", config.to_toml().map_err(Failure::Run)?);
        return Ok(());
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot configure the thread pool")
            .map_err(Failure::Usage)?;
    }

    let started = Instant::now();
    if cli.validate {
        let (lines, passed) = run::self_check();
        for line in &lines {
            println!("{line}");
        }
        if !passed {
            return Err(Failure::Run(anyhow::anyhow!("validation failed; no scenario was run")));
        }
    }
    let stem = cli.out.clone().unwrap_or_else(|| PathBuf::from(&target));
    let outcome = run::execute(&config, &stem).map_err(Failure::Run)?;
    for note in &outcome.notes {
        println!("{note}");
    }
    let manifest = run::write_manifest(&stem, &target, &config, &outcome, started).map_err(Failure::Run)?;
    for file in outcome.files.iter().chain([&manifest]) {
        println!("wrote {}", file.display());
    }
    if outcome.passed {
        Ok(())
    } else {
        Err(Failure::Run(anyhow::anyhow!("one or more validation checks failed")))
    }
}

fn load(cli: &Cli, target: &str) -> Result<backflow_cli::config::RunConfig> {
    if cli.threads == Some(0) {
        anyhow::bail!("--threads must be at least 1");
    }
    let text = match &cli.config {
        Some(path) => Some(std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?),
        None => None,
    };
    let config = resolve(target, text.as_deref(), cli.format, cli.raw);
    match &cli.config {
        Some(path) => config.with_context(|| format!("in {}", path.display())),
        None => config,
    }
}
