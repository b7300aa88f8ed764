use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hstn_core::caching::Scheme;
use hstn_core::checks::{run_all, CheckOptions};
use hstn_core::config::Config;
use hstn_core::experiment::{run, write_csv, write_csv_file};
use hstn_core::mobility::MobilityMode;
use hstn_core::Error;
use log::info;

const EXIT_FAILURE: u8 = 1;
const EXIT_ACCURACY: u8 = 2;
const EXIT_VALIDATION: u8 = 3;

/// Outage probability sweeps for cache-enabled UAV relays fed by a satellite.
#[derive(Debug, Parser)]
#[command(name = "hstn", version)]
struct Cli {
    /// TOML configuration; every key is optional.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// CSV destination (`-` for standard output).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Monte Carlo trials per point.
    #[arg(long, value_name = "N")]
    trials: Option<u64>,
    /// Comma-separated subset of NC,MPC,UC.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    schemes: Option<Vec<String>>,
    /// Comma-separated subset of fully3d,fixed_height.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    modes: Option<Vec<String>>,
    /// SNR sweep in dB.
    #[arg(long, value_name = "LO:HI:STEP")]
    snr: Option<String>,
    /// Exact (and asymptotic, if enabled) analysis only.
    #[arg(long, conflicts_with = "sim_only")]
    analytic_only: bool,
    /// Monte Carlo only.
    #[arg(long)]
    sim_only: bool,
    /// Add the high-SNR asymptotic column.
    #[arg(long, conflicts_with = "sim_only")]
    asymptotic: bool,
    /// Run the cross-validation suite instead of a sweep.
    #[arg(long)]
    check: bool,
    /// Print the effective configuration as TOML and exit.
    #[arg(long)]
    dump_config: bool,
}

fn parse_snr(text: &str) -> Result<(f64, f64, f64), Error> {
    let bad = || Error::Parse(format!("--snr expects LO:HI:STEP in dB, got `{text}`"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let v = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((v[0], v[1], v[2]))
}

fn apply_flags(cli: &Cli, cfg: &mut Config) -> Result<(), Error> {
    if let Some(out) = &cli.out {
        cfg.sweep.out = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.sim.seed = seed;
    }
    if let Some(trials) = cli.trials {
        cfg.sim.trials = trials;
    }
    if let Some(list) = &cli.schemes {
        cfg.sweep.schemes = list.iter().map(|s| s.parse::<Scheme>()).collect::<Result<_, _>>()?;
    }
    if let Some(list) = &cli.modes {
        cfg.sweep.modes = list.iter().map(|s| s.parse::<MobilityMode>()).collect::<Result<_, _>>()?;
    }
    if let Some(snr) = &cli.snr {
        let (lo, hi, step) = parse_snr(snr)?;
        cfg.sweep.snr_db_start = lo;
        cfg.sweep.snr_db_stop = hi;
        cfg.sweep.snr_db_step = step;
    }
    if cli.analytic_only {
        cfg.sweep.exact = true;
        cfg.sweep.simulated = false;
    }
    if cli.sim_only {
        cfg.sweep.exact = false;
        cfg.sweep.asymptotic = false;
        cfg.sweep.simulated = true;
    }
    if cli.asymptotic {
        cfg.sweep.asymptotic = true;
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<u8, Error> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    apply_flags(cli, &mut cfg)?;
    if cli.dump_config {
        print!("{}", cfg.to_toml());
        return Ok(0);
    }
    let spec = cfg.to_spec()?;

    if cli.check {
        let opts = CheckOptions {
            workers: spec.sim.workers,
            trials: cli.trials.unwrap_or(CheckOptions::default().trials),
            ..CheckOptions::default()
        };
        let outcomes = run_all(&opts)?;
        for o in &outcomes {
            println!("{}", o.line());
        }
        let failed = outcomes.iter().filter(|o| !o.passed).count();
        eprintln!("{} of {} checks passed", outcomes.len() - failed, outcomes.len());
        return Ok(if failed == 0 { 0 } else { EXIT_FAILURE });
    }

    info!(
        "sweeping {} SNR points, {} schemes, {} modes with {} workers",
        spec.snr_db.len(),
        spec.schemes.len(),
        spec.modes.len(),
        spec.sim.workers
    );
    let report = run(&spec)?;
    if spec.output_path.as_os_str() == "-" {
        write_csv(&report.rows, std::io::stdout().lock())?;
    } else {
        write_csv_file(&report.rows, &spec.output_path)?;
        info!("wrote {} rows to {}", report.rows.len(), spec.output_path.display());
    }
    for line in &report.summary {
        eprintln!("{line}");
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_VALIDATION } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_accuracy() {
                EXIT_ACCURACY
            } else if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_FAILURE
            })
        }
    }
}
