//! `cbp-abc`: simulate controlled branching processes, run SMC ABC, sweep
//! priors and law families, and compute density diagnostics.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cbpabc::{Error, Metric, SummaryKind};
use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "cbp-abc", version, about = "Controlled branching processes and SMC ABC inference")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "CBP_ABC_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one trajectory (or two-type tree summary) from `truth`.
    Simulate(RunArgs),
    /// SMC ABC, optional regression adjustment, densities and a report.
    Infer(RunArgs),
    /// One inference per prior / law-family cell of the config's `sweep`.
    Sweep(RunArgs),
    /// KDE grids for every parameter of a particle CSV.
    Density {
        #[arg(long)]
        particles: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// ISE, KL and total variation between two density grids.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    no_adjust: bool,
    #[arg(long, value_parser = parse_metric)]
    metric: Option<Metric>,
    #[arg(long, value_parser = parse_summary)]
    summary: Option<SummaryKind>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_summary(s: &str) -> Result<SummaryKind, String> {
    match s.parse::<SummaryKind>() {
        Ok(k) if k.is_single_type() => Ok(k),
        Ok(_) => Err("expected one of s, s1, s2, s3".into()),
        Err(e) => Err(e.to_string()),
    }
}

impl RunArgs {
    /// Loads the config and applies command-line overrides.
    fn load(&self) -> cbpabc::Result<(RunConfig, PathBuf)> {
        let mut cfg = RunConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if self.no_adjust {
            cfg.adjust = false;
        }
        if let Some(m) = self.metric {
            cfg.metric = Some(m);
        }
        if let Some(k) = self.summary {
            cfg.summary = Some(k);
        }
        cfg.validate()?;
        let out = match &self.out {
            Some(o) => o.clone(),
            None => cfg.resolve(&cfg.out.clone()),
        };
        Ok((cfg, out))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Usage(_) | Error::Parse(_) => 2,
        Error::Budget(_) => 3,
        Error::Io(_) => 4,
        _ => 1,
    }
}

fn run(cli: Cli) -> cbpabc::Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Simulate(a) => {
            let (cfg, out) = a.load()?;
            commands::simulate(&cfg, &out)?;
            println!("seed {}; wrote {}", cfg.seed, out.display());
        }
        Command::Infer(a) => {
            let (cfg, out) = a.load()?;
            commands::infer(&cfg, &out)?;
            println!("seed {}; wrote {}", cfg.seed, out.display());
        }
        Command::Sweep(a) => {
            let (cfg, out) = a.load()?;
            commands::sweep(&cfg, &out)?;
            println!("seed {}; wrote {}", cfg.seed, out.display());
        }
        Command::Density { particles, out } => {
            commands::density(&particles, &out)?;
            println!("wrote {}", out.display());
        }
        Command::Compare { a, b, out } => {
            let c = commands::compare(&a, &b, out.as_deref())?;
            println!("ise,kl,total_variation");
            println!("{},{},{}", c.ise, c.kl, c.total_variation);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cbp-abc: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
