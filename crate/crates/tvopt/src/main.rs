use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tvopt::presets::Preset;
use tvopt::sweep::{run_sweep, GridAxis};
use tvopt::{report, run_experiment, Error, ExperimentConfig, Result};

/// Time-varying optimization experiments.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write trace, metrics, bounds and manifest.
    Run(Source),
    /// Run a config once per point of a parameter grid and write summary.csv.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// Grid axis `key=v1,v2,...` with a dotted config path (repeatable).
        #[arg(long = "grid", required = true)]
        grid: Vec<String>,
    },
    /// Write plot-ready series files from a run directory.
    Report {
        run_dir: PathBuf,
        /// Destination directory (default: <run_dir>/series).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Source {
    /// Experiment config file (TOML).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in config.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace the problem seed.
    #[arg(long)]
    seed_override: Option<u64>,
    /// Root for output directories when neither --out nor the config sets one.
    #[arg(long, env = "TVOPT_OUT", default_value = "tvopt-out")]
    out_root: PathBuf,
}

impl Source {
    /// Raw TOML, a short name for the output directory, and the directory that
    /// relative paths in the config resolve against.
    fn load(&self) -> Result<(String, String, Option<PathBuf>)> {
        match (&self.config, self.preset) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                let name = path
                    .file_stem()
                    .map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned());
                Ok((text, name, path.parent().map(Path::to_path_buf)))
            }
            (None, Some(p)) => Ok((p.toml().to_string(), p.name().to_string(), None)),
            (None, None) => Err(Error::Config("give --config or --preset".into())),
        }
    }

    fn out_dir(&self, cfg: &ExperimentConfig, name: &str) -> PathBuf {
        self.out
            .clone()
            .or_else(|| cfg.output.dir.clone())
            .unwrap_or_else(|| self.out_root.join(name))
    }

    fn raw_value(&self, text: &str) -> Result<toml::Value> {
        let mut value: toml::Value = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(seed) = self.seed_override {
            let cfg = ExperimentConfig::from_value(value)?;
            let mut cfg = cfg;
            cfg.override_seed(seed);
            value = toml::Value::try_from(&cfg).map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(value)
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(source) => {
            let (text, name, base) = source.load()?;
            let cfg = ExperimentConfig::from_value(source.raw_value(&text)?)?;
            let dir = source.out_dir(&cfg, &name);
            let summary = run_experiment(&cfg, base.as_deref(), &dir)?;
            println!("wrote {}", summary.dir.display());
            for m in &summary.methods {
                println!(
                    "{:<24} final tracking error {:.6e}  bound violations {}",
                    m.method, m.final_tracking_error, m.violations
                );
            }
            Ok(())
        }
        Command::Sweep { source, grid } => {
            let (text, name, base) = source.load()?;
            let value = source.raw_value(&text)?;
            let axes = grid.iter().map(|g| GridAxis::parse(g)).collect::<Result<Vec<_>>>()?;
            let cfg = ExperimentConfig::from_value(value.clone())?;
            let dir = source.out_dir(&cfg, &format!("{name}-sweep"));
            let summary = run_sweep(&value, &axes, base.as_deref(), &dir)?;
            println!("wrote {}", summary.path.display());
            match summary.failed() {
                0 => Ok(()),
                failed => {
                    for (p, r) in &summary.runs {
                        if let Err(e) = r {
                            eprintln!("run_{:04}: {e}", p.index);
                        }
                    }
                    Err(Error::SweepFailed {
                        failed,
                        total: summary.runs.len(),
                    })
                }
            }
        }
        Command::Report { run_dir, out } => {
            for path in report::report(&run_dir, out.as_deref())? {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Core(tvopt_core::Error::Config(_)) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
