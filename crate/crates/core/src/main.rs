use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use lfpp::harness::{self, ExperimentConfig, ExperimentKind};
use lfpp::LfppError;

/// Runs one LFPP experiment described by a configuration file.
#[derive(Debug, Parser)]
#[command(name = "lfpp", version)]
struct Cli {
    /// sample-field, estimate-a, estimate-q, estimate-cr, ratio-scan,
    /// events, multiscale, compare or subadd-demo
    kind: String,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to the config value, then LFPP_WORKERS, then 1.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, LfppError> {
    let kind: ExperimentKind = cli.kind.parse()?;
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| LfppError::Config(format!("cannot read {}: {e}", cli.config.display())))?;
    let mut cfg = ExperimentConfig::parse(&text, Some(kind))?;
    let env_workers = std::env::var("LFPP_WORKERS").ok();
    if let Some(w) = cli.workers {
        cfg.workers = w;
    } else if !text.lines().any(|l| l.split('#').next().unwrap_or("").trim_start().starts_with("workers")) {
        if let Some(w) = env_workers {
            cfg.workers = w
                .trim()
                .parse()
                .map_err(|_| LfppError::Config(format!("LFPP_WORKERS = `{w}` is not an integer")))?;
        }
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load(&cli).and_then(|cfg| harness::run(&cfg).map(|m| (cfg, m)));
    match result {
        Ok((cfg, manifest)) => {
            println!(
                "{{\"status\":\"ok\",\"kind\":\"{}\",\"files\":{},\"manifest\":\"{}\"}}",
                manifest.kind.name(),
                manifest.files.len(),
                cfg.out.join(harness::MANIFEST_NAME).display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", harness::error_report(&e));
            ExitCode::from(harness::exit_code(&e) as u8)
        }
    }
}
