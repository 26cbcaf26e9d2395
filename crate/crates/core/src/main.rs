use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;

use track_sentinel::detect::BaselineStats;
use track_sentinel::scenario::{self, plot, ScenarioConfig};
use track_sentinel::Error;

/// Simulates train passages over a bridge and detects local track
/// irregularities from the bridge acceleration.
#[derive(Parser, Debug)]
#[command(name = "track-sentinel", version, about)]
struct Cli {
    /// Master seed; overrides the scenario's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (or stats file for `calibrate`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; TRACK_SENTINEL_JOBS takes precedence.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// More log output; repeat for debug.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate every speed of a scenario and write the run directories.
    Simulate {
        config: PathBuf,
        /// Also analyze each run against these baseline statistics.
        #[arg(long)]
        baseline: Option<PathBuf>,
    },
    /// Calibrate baseline statistics from bump-free runs.
    Calibrate {
        config: PathBuf,
        #[arg(long, default_value_t = 20)]
        runs: usize,
    },
    /// Run detection on a run directory.
    Detect {
        run_dir: PathBuf,
        #[arg(long)]
        baseline: PathBuf,
    },
    /// Simulate, analyze and summarize a speed sweep.
    Sweep {
        config: PathBuf,
        /// Baseline statistics; calibrated from the scenario without bumps when absent.
        #[arg(long)]
        baseline: Option<PathBuf>,
    },
    /// Write a plot bundle for a run directory.
    Plot {
        run_dir: PathBuf,
        #[arg(long)]
        kind: String,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::InvalidParameter { .. } | Error::TooFewRuns { .. } | Error::UnknownPlotKind(_) => 1,
        Error::ContaminatedBaseline(_) => 3,
        _ => 2,
    }
}

fn jobs(flag: Option<usize>) -> Result<Option<usize>, Error> {
    match std::env::var("TRACK_SENTINEL_JOBS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&j| j > 0)
            .map(Some)
            .ok_or_else(|| Error::Config(format!("TRACK_SENTINEL_JOBS: `{v}` is not a positive integer"))),
        Err(_) => match flag {
            Some(0) => Err(Error::Config("--jobs: must be at least 1".into())),
            other => Ok(other),
        },
    }
}

fn out_dir(cli_out: &Option<PathBuf>, cfg: &ScenarioConfig) -> PathBuf {
    cli_out
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(&cfg.name))
}

fn load_stats(path: &Path) -> Result<BaselineStats, Error> {
    BaselineStats::load(path)
}

fn run(cli: Cli) -> Result<(), Error> {
    let jobs = jobs(cli.jobs)?;
    match cli.command {
        Command::Simulate { config, baseline } => {
            let cfg = ScenarioConfig::load(&config)?;
            let stats = baseline.as_deref().map(load_stats).transpose()?;
            let master = cli.seed.unwrap_or(cfg.seed);
            let out = out_dir(&cli.out, &cfg);
            let summaries = scenario::run_all(&cfg, master, &out, stats.as_ref(), jobs)?;
            if stats.is_some() {
                scenario::write_json(&out.join("summary.json"), &scenario::summarize(&cfg, master, summaries))?;
            }
            println!("{}", out.display());
        }
        Command::Calibrate { config, runs } => {
            let cfg = ScenarioConfig::load(&config)?;
            let master = cli.seed.unwrap_or(cfg.seed);
            let stats = scenario::calibrate(&cfg, runs, master, jobs)?;
            let path = cli
                .out
                .clone()
                .or_else(|| cfg.output.baseline.clone())
                .unwrap_or_else(|| out_dir(&None, &cfg).join("baseline.json"));
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            stats.save(&path)?;
            for s in &stats.sensors {
                info!(
                    "sensor {}: mu {:.4e} sigma {:.4e} F {:.4e}",
                    s.id, s.mu, s.sigma, s.threshold
                );
            }
            println!("{}", path.display());
        }
        Command::Detect { run_dir, baseline } => {
            let stats = load_stats(&baseline)?;
            let report = scenario::detect_run_dir(&run_dir, &stats)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Sweep { config, baseline } => {
            let cfg = ScenarioConfig::load(&config)?;
            let master = cli.seed.unwrap_or(cfg.seed);
            let stats = match baseline.or_else(|| cfg.output.baseline.clone()) {
                Some(p) => load_stats(&p)?,
                None => {
                    info!("calibrating on {} bump-free runs", scenario::SELF_CALIBRATION_RUNS);
                    scenario::calibrate(
                        &cfg.without_bumps(),
                        scenario::SELF_CALIBRATION_RUNS,
                        scenario::calibration_master(master),
                        jobs,
                    )?
                }
            };
            let out = out_dir(&cli.out, &cfg);
            let summaries = scenario::run_all(&cfg, master, &out, Some(&stats), jobs)?;
            stats.save(&out.join("baseline.json"))?;
            let summary = scenario::summarize(&cfg, master, summaries);
            let path = out.join("summary.json");
            scenario::write_json(&path, &summary)?;
            info!(
                "{}: {}/{} detected, {} localized",
                summary.scenario, summary.detected, summary.runs, summary.localized
            );
            println!("{}", path.display());
        }
        Command::Plot { run_dir, kind } => {
            let path = plot::emit(&run_dir, &kind)?;
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
