use std::path::PathBuf;
use std::process::ExitCode;

use blpp_cli::{execute, output_dir, plot, CliError, ExperimentConfig, RunManifest};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "blpp", version, about = "Brownian LPP simulation and verification runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every per-sample exact identity.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named experiment.
    Run {
        experiment: String,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render estimator CSVs as SVG line plots.
    Plot {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
        /// Logarithmic axes with ticks at powers of two.
        #[arg(long)]
        log_log: bool,
    },
}

fn report(m: &RunManifest, out: &std::path::Path) {
    for c in &m.criteria {
        println!("{} [{}] {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.id, c.name, c.detail);
        if !c.counterexamples.is_empty() {
            println!("    counterexample seeds: {:?}", c.counterexamples);
        }
    }
    println!("wrote {} ({:.1} s, {} threads)", out.display(), m.wall_time_seconds, m.threads);
}

fn run_config(name: Option<String>, config: PathBuf, threads: Option<usize>, out: Option<PathBuf>) -> Result<bool, CliError> {
    let mut cfg = ExperimentConfig::load(&config)?;
    if let Some(n) = name {
        if !blpp_cli::config::EXPERIMENTS.contains(&n.as_str()) || n == "verify" {
            return Err(CliError::Config(format!("unknown experiment {n:?}")));
        }
        cfg.experiment = n;
    } else {
        cfg.experiment = "verify".into();
    }
    let threads = cfg.effective_threads(threads)?;
    let dir = output_dir(&cfg, out.as_deref());
    let m = execute(&cfg, threads, &dir)?;
    report(&m, &dir);
    Ok(m.all_pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { config, threads, out } => run_config(None, config, threads, out),
        Command::Run { experiment, config, threads, out } => run_config(Some(experiment), config, threads, out),
        Command::Plot { csv, log_log } => plot::plot_files(&csv, log_log).map(|files| {
            for f in files {
                println!("wrote {}", f.display());
            }
            true
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
