//! `triadic`: run, analyze and check adaptive higher-order network simulations.

mod config;
mod error;
mod report;
mod trajfile;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use triadic_core::analysis::{scan_retention, Flavor, Projection};
use triadic_core::experiment::{preset, Experiment, PRESET_NAMES};

use config::{Overrides, RunConfig};
use error::{CliError, Result};

pub const GENERATOR: &str = concat!("triadic ", env!("CARGO_PKG_VERSION"));

const TRAJECTORY_FILE: &str = "trajectory.bin";

#[derive(Debug, Parser)]
#[command(name = "triadic", version, about)]
struct Cli {
    /// Increase log verbosity (repeatable). `RUST_LOG` takes precedence.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct AnalysisFlags {
    /// Closure threshold δ.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    flavor: Option<Flavor>,
    /// Relative threshold for the regime classifier.
    #[arg(long)]
    epsilon_rel: Option<f64>,
    /// Trailing window as a fraction of the time span.
    #[arg(long)]
    window: Option<f64>,
}

#[derive(Debug, Clone, Args)]
struct RunFlags {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    dt: Option<f64>,
    #[command(flatten)]
    analysis: AnalysisFlags,
}

impl RunFlags {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            dt: self.dt,
            ..self.analysis.overrides()
        }
    }
}

impl AnalysisFlags {
    fn overrides(&self) -> Overrides {
        Overrides {
            delta: self.delta,
            flavor: self.flavor,
            epsilon_rel: self.epsilon_rel,
            window: self.window,
            ..Overrides::default()
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the configured experiment and write `trajectory.bin`.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to the config's `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Write norm series, regime, retention and snapshot reports for a trajectory.
    Analyze {
        trajectory: PathBuf,
        /// Defaults to the trajectory's directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        flags: AnalysisFlags,
    },
    /// Scan a trajectory for closure violations and print the retention record.
    Check {
        trajectory: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        flavor: Flavor,
        /// Check the raw tensors instead of their flavor component.
        #[arg(long)]
        raw: bool,
        /// Also write `retention.json` here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a built-in experiment end to end.
    Preset {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
        name: Option<String>,
        /// List preset names.
        #[arg(long, conflicts_with = "name")]
        list: bool,
        /// Print the preset as a config file instead of running it.
        #[arg(long, requires = "name")]
        dump_config: bool,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run several configs concurrently, each into `<out>/<experiment name>`.
    Sweep {
        #[arg(long = "config", required = true, num_args = 1..)]
        configs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
}

fn simulate_into(experiment: &Experiment, dir: &Path) -> Result<report::Reports> {
    experiment.validate()?;
    info!(
        "{}: integrating n = {} over [{}, {}]",
        experiment.name, experiment.n, experiment.plan.t0, experiment.plan.t1
    );
    let traj = experiment.run()?;
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    trajfile::write(&dir.join(TRAJECTORY_FILE), &traj, experiment)?;
    report::analyze(&traj, experiment)
}

fn print_summary(name: &str, reports: &report::Reports, dir: &Path) {
    let r = &reports.retention;
    let entry = r
        .first_entry_time
        .map_or("never".to_string(), |t| format!("t = {t}"));
    println!(
        "{name}: regime {:?}, in region {entry}, exit {}, wrote {}",
        reports.verdict.regime,
        r.first_exit_after_entry
            .map_or("none".to_string(), |t| format!("t = {t}")),
        dir.display()
    );
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, out, flags } => {
            let cfg = RunConfig::load(&config)?;
            let mut e = cfg.experiment;
            flags.overrides().apply(&mut e);
            let dir = out.or(cfg.output.dir).ok_or_else(|| {
                CliError::Config("no output directory: pass --out or set output.dir".into())
            })?;
            e.validate()?;
            let traj = e.run()?;
            std::fs::create_dir_all(&dir).map_err(CliError::io(&dir))?;
            let path = dir.join(TRAJECTORY_FILE);
            trajfile::write(&path, &traj, &e)?;
            println!(
                "{}: {} samples written to {}",
                e.name,
                traj.samples.len(),
                path.display()
            );
        }
        Command::Analyze {
            trajectory,
            out,
            flags,
        } => {
            let (header, traj) = trajfile::read(&trajectory)?;
            let mut e = header.experiment;
            flags.overrides().apply(&mut e);
            let dir =
                out.unwrap_or_else(|| trajectory.parent().unwrap_or(Path::new(".")).to_path_buf());
            let reports = report::analyze(&traj, &e)?;
            reports.write(&dir)?;
            print_summary(&e.name, &reports, &dir);
        }
        Command::Check {
            trajectory,
            delta,
            flavor,
            raw,
            out,
        } => {
            let (header, traj) = trajfile::read(&trajectory)?;
            let mut e = header.experiment;
            e.closure.delta = delta;
            e.closure.flavor = flavor;
            if raw {
                e.closure.projection = Projection::Raw;
            }
            e.validate()?;
            let reports = report::analyze(&traj, &e)?;
            let record = scan_retention(&traj, delta, flavor, e.closure.projection)?;
            debug_assert_eq!(record, reports.retention);
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(&dir).map_err(CliError::io(&dir))?;
                    let path = dir.join(report::RETENTION_FILE);
                    std::fs::write(&path, &reports.retention_json).map_err(CliError::io(&path))?;
                    print_summary(&e.name, &reports, &dir);
                }
                None => print!("{}", report::to_json(&record)),
            }
        }
        Command::Preset {
            name,
            list,
            dump_config,
            out,
            flags,
        } => {
            let Some(name) = name.filter(|_| !list) else {
                for n in PRESET_NAMES {
                    println!("{n}");
                }
                return Ok(());
            };
            let mut e = preset(&name)?;
            flags.overrides().apply(&mut e);
            if dump_config {
                print!("{}", RunConfig::new(e).to_toml()?);
                return Ok(());
            }
            let reports = simulate_into(&e, &out)?;
            reports.write(&out)?;
            print_summary(&name, &reports, &out);
        }
        Command::Sweep {
            configs,
            out,
            flags,
        } => {
            let mut experiments = Vec::with_capacity(configs.len());
            for path in &configs {
                let mut e = RunConfig::load(path)?.experiment;
                flags.overrides().apply(&mut e);
                e.validate()?;
                if experiments.iter().any(|x: &Experiment| x.name == e.name) {
                    return Err(CliError::Config(format!(
                        "{}: experiment name `{}` is used twice in this sweep",
                        path.display(),
                        e.name
                    )));
                }
                experiments.push(e);
            }
            let results: Vec<Result<(PathBuf, report::Reports)>> = std::thread::scope(|scope| {
                let handles: Vec<_> = experiments
                    .iter()
                    .map(|e| {
                        let dir = out.join(&e.name);
                        scope.spawn(move || {
                            let reports = simulate_into(e, &dir)?;
                            reports.write(&dir)?;
                            Ok((dir, reports))
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("sweep worker panicked"))
                    .collect()
            });
            let mut first_err = None;
            for (e, r) in experiments.iter().zip(results) {
                match r {
                    Ok((dir, reports)) => print_summary(&e.name, &reports, &dir),
                    Err(err) => {
                        eprintln!("{}: {err}", e.name);
                        first_err.get_or_insert(err);
                    }
                }
            }
            if let Some(err) = first_err {
                return Err(err);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
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
            ExitCode::from(e.exit_code())
        }
    }
}
